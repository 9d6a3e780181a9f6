//! Run records, multi-run statistics and their file formats.
//!
//! - `<ALG>_<problemId>_<run>.txt`: `#`-prefixed header, one whitespace
//!   separated row per generation, `#`-prefixed footer.
//! - `<ALG>-STATS_<problemId>_<nRuns>.txt`: one summary line per run and an
//!   aggregate block.
//! - CSV: every generation of every run, one row each.
//!
//! Numbers are written as plain decimals with at most 9 significant digits.
//! Every file is written to a temporary file in the target directory and
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::engine::{ModelSnapshot, StopReason};
use crate::error::{Error, Result};
use crate::genome::Genome;

/// Prefix of the only header line that differs between identical runs.
pub const TIMESTAMP_PREFIX: &str = "# timestamp:";

/// Column header of the CSV export.
pub const CSV_HEADER: [&str; 8] = [
    "algorithm",
    "problem",
    "run",
    "generation",
    "fitness_calls",
    "best",
    "avg",
    "best_so_far",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunHeader {
    pub algorithm: String,
    pub problem_id: u32,
    pub problem_name: String,
    pub string_size: usize,
    pub sigma_k: f64,
    pub population_size: usize,
    pub seed: u64,
    pub run_index: u64,
    pub generator: String,
    /// Parameter echo, written in order.
    pub params: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationRow {
    pub generation: u64,
    pub fitness_calls: u64,
    pub best: f64,
    pub average: f64,
    pub best_so_far: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub header: RunHeader,
    pub rows: Vec<GenerationRow>,
    pub stop_reason: StopReason,
    pub total_fitness_calls: u64,
    pub best_fitness: f64,
    pub best_genome: Genome,
    pub final_model: Option<ModelSnapshot>,
    pub wall_time_seconds: f64,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.stop_reason == StopReason::OptimumFound
    }

    /// Index of the last generation (the initial population is 0).
    pub fn final_generation(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.generation)
    }
}

/// Format `x` as a plain decimal with at most 9 significant digits.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp >= 8 {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', (exp - 8) as usize));
    } else if exp >= 0 {
        let split = exp as usize + 1;
        out.push_str(&digits[..split]);
        out.push('.');
        out.push_str(&digits[split..]);
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.');
        out = trimmed.to_string();
    }
    out
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn run_file_name(record: &RunRecord) -> String {
    format!(
        "{}_{}_{}.txt",
        record.header.algorithm, record.header.problem_id, record.header.run_index
    )
}

/// Text of a run file.
pub fn render_run(record: &RunRecord) -> String {
    let h = &record.header;
    let mut s = String::new();
    let mut line = |l: String| {
        s.push_str(&l);
        s.push('\n');
    };
    line(format!("# algorithm: {}", h.algorithm));
    line(format!("# problem: {} ({})", h.problem_id, h.problem_name));
    line(format!("# stringSize: {}", h.string_size));
    line(format!("# sigmaK: {}", format_number(h.sigma_k)));
    line(format!("# populationSize: {}", h.population_size));
    line(format!("# seed: {}", h.seed));
    line(format!("# run: {}", h.run_index));
    line(format!("# generator: {}", h.generator));
    for (k, v) in &h.params {
        line(format!("# param {k} = {v}"));
    }
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    line(format!(
        "{TIMESTAMP_PREFIX} {now} wallTimeSeconds: {}",
        format_number(record.wall_time_seconds)
    ));
    line("# columns: generation fitnessCalls bestFitness averageFitness bestSoFar".into());
    for r in &record.rows {
        line(format!(
            "{} {} {} {} {}",
            r.generation,
            r.fitness_calls,
            format_number(r.best),
            format_number(r.average),
            format_number(r.best_so_far)
        ));
    }
    line(format!("# stopReason: {}", record.stop_reason));
    line(format!("# totalFitnessCalls: {}", record.total_fitness_calls));
    line(format!("# bestFitness: {}", format_number(record.best_fitness)));
    line(format!("# bestGenome: {}", record.best_genome));
    if let Some(model) = &record.final_model {
        line(format!("# finalModel: {model}"));
    }
    s
}

/// Write `<ALG>_<problemId>_<run>.txt` into `dir` and return its path.
pub fn write_run_file(record: &RunRecord, dir: &Path) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(run_file_name(record));
    write_atomic(&path, render_run(record).as_bytes())?;
    Ok(path)
}

/// Data rows of a run file (comment lines stripped).
pub fn parse_run_rows(text: &str) -> Result<Vec<GenerationRow>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let bad = || Error::state(format!("malformed run file row {l:?}"));
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(GenerationRow {
                generation: f[0].parse().map_err(|_| bad())?,
                fitness_calls: f[1].parse().map_err(|_| bad())?,
                best: f[2].parse().map_err(|_| bad())?,
                average: f[3].parse().map_err(|_| bad())?,
                best_so_far: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (0 for a single value).
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Summary {
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub run_index: u64,
    pub stop_reason: StopReason,
    pub generations: u64,
    pub total_fitness_calls: u64,
    pub best_fitness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatsRecord {
    pub algorithm: String,
    pub problem_id: u32,
    pub runs: Vec<RunSummary>,
    pub success_count: usize,
    pub success_rate: f64,
    /// Fitness calls over successful runs; `None` when no run succeeded.
    pub fitness_calls: Option<Summary>,
    /// Final best-so-far over all runs.
    pub best_fitness: Summary,
}

impl StatsRecord {
    pub fn from_runs(records: &[RunRecord]) -> Result<StatsRecord> {
        let first = records
            .first()
            .ok_or_else(|| Error::state("statistics need at least one run"))?;
        let runs: Vec<RunSummary> = records
            .iter()
            .map(|r| RunSummary {
                run_index: r.header.run_index,
                stop_reason: r.stop_reason,
                generations: r.final_generation(),
                total_fitness_calls: r.total_fitness_calls,
                best_fitness: r.best_fitness,
            })
            .collect();
        let calls: Vec<f64> = records
            .iter()
            .filter(|r| r.succeeded())
            .map(|r| r.total_fitness_calls as f64)
            .collect();
        let best: Vec<f64> = records.iter().map(|r| r.best_fitness).collect();
        Ok(StatsRecord {
            algorithm: first.header.algorithm.clone(),
            problem_id: first.header.problem_id,
            success_count: calls.len(),
            success_rate: calls.len() as f64 / records.len() as f64,
            fitness_calls: Summary::of(&calls),
            best_fitness: Summary::of(&best).expect("at least one run"),
            runs,
        })
    }

    pub fn n_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn file_name(&self) -> String {
        format!("{}-STATS_{}_{}.txt", self.algorithm, self.problem_id, self.n_runs())
    }

    /// The aggregate block, as written at the end of the stats file.
    pub fn render_aggregate(&self) -> String {
        let na = |f: &dyn Fn(&Summary) -> f64| {
            self.fitness_calls
                .as_ref()
                .map_or("NA".to_string(), |s| format_number(f(s)))
        };
        [
            format!("nRuns {}", self.n_runs()),
            format!("successCount {}", self.success_count),
            format!("successRate {:.6}", self.success_rate),
            format!("meanFitnessCalls {}", na(&|s| s.mean)),
            format!("stdFitnessCalls {}", na(&|s| s.std)),
            format!("minFitnessCalls {}", na(&|s| s.min)),
            format!("maxFitnessCalls {}", na(&|s| s.max)),
            format!("meanBestFitness {}", format_number(self.best_fitness.mean)),
            format!("stdBestFitness {}", format_number(self.best_fitness.std)),
        ]
        .join("\n")
            + "\n"
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "# algorithm: {}\n# problem: {}\n# columns: run stopReason generations totalFitnessCalls bestFitness\n",
            self.algorithm, self.problem_id
        );
        for r in &self.runs {
            s.push_str(&format!(
                "{} {} {} {} {}\n",
                r.run_index,
                r.stop_reason,
                r.generations,
                r.total_fitness_calls,
                format_number(r.best_fitness)
            ));
        }
        s.push_str("# aggregate\n");
        s.push_str(&self.render_aggregate());
        s
    }
}

/// Write `<ALG>-STATS_<problemId>_<nRuns>.txt` into `dir`.
pub fn write_stats_file(stats: &StatsRecord, dir: &Path) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(stats.file_name());
    write_atomic(&path, stats.render().as_bytes())?;
    Ok(path)
}

/// One CSV row per generation of every record.
pub fn export_csv(records: &[RunRecord], path: &Path) -> Result<PathBuf> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for rec in records {
        for row in &rec.rows {
            w.write_record([
                rec.header.algorithm.clone(),
                rec.header.problem_id.to_string(),
                rec.header.run_index.to_string(),
                row.generation.to_string(),
                row.fitness_calls.to_string(),
                format_number(row.best),
                format_number(row.average),
                format_number(row.best_so_far),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_atomic(path, &bytes)?;
    Ok(path.to_path_buf())
}
