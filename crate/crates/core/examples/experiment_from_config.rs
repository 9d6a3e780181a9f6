//! Parse a parameter file, run it and write run, stats and CSV files.
//!
//! `cargo run --example experiment_from_config -- params.txt out/`

use std::path::PathBuf;

use ea_core::config::parse_config;
use ea_core::engine::run_many;
use ea_core::problems::ProblemRegistry;
use ea_core::report::{export_csv, write_run_file, write_stats_file, StatsRecord};

const DEFAULT: &str = "\
algorithm = ECGA
problemType = 12    # One 3-Deceptive
stringSize = 30
populationSize = 1000
nRuns = 4
seed = 2
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let out = args.next().map_or_else(std::env::temp_dir, PathBuf::from).join("ea-example");
    let config = match parse_config(&text) {
        Ok(parsed) => parsed.config,
        Err(errors) => {
            for e in errors {
                eprintln!("{e}");
            }
            std::process::exit(2);
        }
    };
    let problem = ProblemRegistry::default().build(&config.problem)?;
    let records = run_many(
        &config.algorithm,
        &problem,
        config.population_size,
        &config.stop,
        config.seed,
        config.n_runs,
    )?;
    for r in &records {
        println!("wrote {}", write_run_file(r, &out)?.display());
    }
    let stats = StatsRecord::from_runs(&records)?;
    println!("wrote {}", write_stats_file(&stats, &out)?.display());
    println!("wrote {}", export_csv(&records, &out.join("generations.csv"))?.display());
    print!("{}", stats.render_aggregate());
    Ok(())
}
