use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ea_core::config::{parse_config_with, Config};
use ea_core::engine::run_many;
use ea_core::problems::{brute_force_optimum, menu, ProblemRegistry, ProblemSpec};
use ea_core::report::{export_csv, format_number, write_run_file, write_stats_file, StatsRecord};
use ea_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 1;

#[derive(Parser)]
#[command(name = "ea", version, about = "Evolutionary algorithms on binary benchmark problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a parameter file.
    Run {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        runs: Option<u64>,
        /// Output directory (overrides outputDir).
        #[arg(long, env = "EA_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Also write every generation of every run to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Extra `name=value` overrides, applied last.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
    /// List the built-in problems.
    Problems,
    /// Exhaustive optimum of a small problem.
    Oracle {
        #[arg(long)]
        problem: u32,
        #[arg(long)]
        string_size: usize,
        #[arg(long)]
        trap_k: Option<usize>,
    },
    /// Check a parameter file without running it.
    Validate { file: PathBuf },
}

enum Failure {
    Config(Vec<String>),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Config(vec![other.to_string()]),
        }
    }
}

fn load(path: &Path, overrides: &[(String, String)]) -> Result<Config, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    match parse_config_with(&text, &ProblemRegistry::default(), overrides) {
        Ok(parsed) => {
            for w in parsed.warnings {
                eprintln!("warning: {}: {w}", path.display());
            }
            Ok(parsed.config)
        }
        Err(errors) => Err(Failure::Config(
            errors
                .iter()
                .map(|e| format!("{}: {e}", path.display()))
                .collect(),
        )),
    }
}

fn run_command(
    file: &Path,
    overrides: Vec<(String, String)>,
    out_dir: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<(), Failure> {
    let config = load(file, &overrides)?;
    let problem = ProblemRegistry::default().build(&config.problem)?;
    let out_dir = out_dir.unwrap_or_else(|| config.output_dir.clone());
    let mut records = run_many(
        &config.algorithm,
        &problem,
        config.population_size,
        &config.stop,
        config.seed,
        config.n_runs,
    )?;
    for record in &mut records {
        let mut params = config.echo();
        for (k, v) in record.header.params.drain(..) {
            if !params.iter().any(|(p, _)| *p == k) {
                params.push((k, v));
            }
        }
        record.header.params = params;
        write_run_file(record, &out_dir)?;
    }
    let stats = StatsRecord::from_runs(&records)?;
    let stats_path = write_stats_file(&stats, &out_dir)?;
    if let Some(csv) = csv {
        export_csv(&records, &csv)?;
    }
    print!("{}", stats.render_aggregate());
    println!("statsFile {}", stats_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            file,
            seed,
            algorithm,
            runs,
            out_dir,
            csv,
            set,
        } => {
            let mut overrides = Vec::new();
            let mut bad = Vec::new();
            for s in &set {
                match s.split_once('=') {
                    Some((k, v)) => overrides.push((k.trim().to_string(), v.trim().to_string())),
                    None => bad.push(format!("--set {s:?}: expected NAME=VALUE")),
                }
            }
            if let Some(s) = seed {
                overrides.push(("seed".into(), s.to_string()));
            }
            if let Some(a) = algorithm {
                overrides.push(("algorithm".into(), a));
            }
            if let Some(r) = runs {
                overrides.push(("nRuns".into(), r.to_string()));
            }
            if bad.is_empty() {
                run_command(&file, overrides, out_dir, csv)
            } else {
                Err(Failure::Config(bad))
            }
        }
        Command::Problems => {
            for (code, name) in menu() {
                println!("{code} {name}");
            }
            Ok(())
        }
        Command::Oracle {
            problem,
            string_size,
            trap_k,
        } => {
            let mut spec = ProblemSpec::new(problem, string_size);
            if let Some(k) = trap_k {
                spec = spec.with_trap_k(k);
            }
            ProblemRegistry::default()
                .build(&spec)
                .and_then(|p| brute_force_optimum(&p))
                .map(|(value, genome)| println!("{} {genome}", format_number(value)))
                .map_err(Failure::from)
        }
        Command::Validate { file } => load(&file, &[]).map(|c| {
            println!(
                "ok: {} on problem {} (n = {}, N = {}, {} run(s))",
                c.algorithm.name(),
                c.problem.problem_id,
                c.problem.string_size,
                c.population_size,
                c.n_runs
            )
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(lines)) => {
            for l in lines {
                eprintln!("error: {l}");
            }
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
