//! Parameter files.
//!
//! The format is line oriented: `name = value`, `#` starts a comment, blank
//! lines are ignored and names are case-sensitive. A later assignment of
//! the same name overrides the earlier one with a warning. Every error is
//! collected and reported with its line number.
//!
//! ```text
//! algorithm = ECGA
//! problemType = 12      # One 3-Deceptive
//! stringSize = 30
//! populationSize = 500
//! nRuns = 20
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::ecga::EcgaParams;
use crate::engine::{Algorithm, Selection, StopConfig};
use crate::hboa::HboaParams;
use crate::problems::{validate_length, ProblemRegistry, ProblemSpec};
use crate::sga::{CrossoverType, SgaParams};
use crate::umda::UmdaParams;

/// Every accepted option name, in echo order.
pub const KEYS: &[&str] = &[
    "algorithm",
    "problemType",
    "stringSize",
    "sigmaK",
    "trapK",
    "hierFHighLow",
    "hierFLowLow",
    "hierFHighTop",
    "hierFLowTop",
    "populationSize",
    "nRuns",
    "seed",
    "maxGenerations",
    "maxFitnessCalls",
    "stopOnOptimum",
    "convergenceThreshold",
    "noImprovementWindow",
    "outputDir",
    "sgaTournamentSize",
    "sgaCrossoverType",
    "sgaPc",
    "sgaPm",
    "sgaElitism",
    "umdaSelection",
    "umdaTau",
    "umdaTournamentSize",
    "umdaClampMargins",
    "umdaElitism",
    "ecgaTournamentSize",
    "ecgaMaxGroupSize",
    "ecgaElitism",
    "hboaOffspringFraction",
    "hboaRtrWindow",
    "hboaMaxIncoming",
];

const REQUIRED: &[&str] = &["algorithm", "problemType", "stringSize", "populationSize"];

/// A problem found while parsing; `line` is `None` for command-line
/// overrides and for missing options.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub algorithm: Algorithm,
    pub problem: ProblemSpec,
    pub population_size: usize,
    pub n_runs: u64,
    pub seed: u64,
    pub stop: StopConfig,
    pub output_dir: PathBuf,
    /// Options as given (file then overrides), in [`KEYS`] order.
    pub given: Vec<(String, String)>,
}

impl Config {
    /// Parameter echo for run files: the given options verbatim, then the
    /// resolved values of the algorithm options that were left at their
    /// defaults.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = self.given.clone();
        for (k, v) in self.algorithm.describe() {
            if !out.iter().any(|(g, _)| *g == k) {
                out.push((k, v));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub config: Config,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: Option<usize>,
}

/// Parse with the built-in problem set and no overrides.
pub fn parse_config(text: &str) -> Result<Parsed, Vec<ConfigError>> {
    parse_config_with(text, &ProblemRegistry::default(), &[])
}

/// Parse raw bytes; invalid UTF-8 is replaced rather than rejected, so any
/// input yields either a config or a nonempty error list.
pub fn parse_config_bytes(bytes: &[u8]) -> Result<Parsed, Vec<ConfigError>> {
    parse_config(&String::from_utf8_lossy(bytes))
}

/// Parse `text`, then apply `overrides` (as if appended to the file), then
/// validate.
pub fn parse_config_with(
    text: &str,
    registry: &ProblemRegistry,
    overrides: &[(String, String)],
) -> Result<Parsed, Vec<ConfigError>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();

    let mut put = |name: &str, value: &str, line: Option<usize>, errors: &mut Vec<ConfigError>| {
        let Some(key) = KEYS.iter().find(|k| **k == name) else {
            errors.push(ConfigError {
                line,
                message: format!("unknown option {name:?}"),
            });
            return;
        };
        if value.is_empty() {
            errors.push(ConfigError {
                line,
                message: format!("option {name} has an empty value"),
            });
            return;
        }
        let entry = Entry {
            value: value.to_string(),
            line,
        };
        if let Some(prev) = entries.insert(key, entry) {
            if let Some(line) = line {
                warnings.push(format!(
                    "line {line}: {name} set again, overriding the value from line {}",
                    prev.line.map_or("?".to_string(), |l| l.to_string())
                ));
            }
        }
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        match content.split_once('=') {
            Some((name, value)) if !name.trim().is_empty() => {
                put(name.trim(), value.trim(), Some(line), &mut errors)
            }
            _ => errors.push(ConfigError {
                line: Some(line),
                message: format!("malformed line {content:?} (expected name = value)"),
            }),
        }
    }
    for (name, value) in overrides {
        put(name, value.trim(), None, &mut errors);
    }

    let config = build(&entries, registry, &mut errors);
    match config {
        Some(config) if errors.is_empty() => Ok(Parsed { config, warnings }),
        _ => Err(errors),
    }
}

/// Typed access to the entries, recording an error for every bad value.
struct Reader<'a> {
    entries: &'a BTreeMap<&'static str, Entry>,
    errors: &'a mut Vec<ConfigError>,
}

impl Reader<'_> {
    fn fail(&mut self, key: &str, message: String) {
        let line = self.entries.get(key).and_then(|e| e.line);
        self.errors.push(ConfigError { line, message });
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn parse<T: FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let raw = self.raw(key)?.to_string();
        match raw.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.fail(key, format!("{key} must be {what}, got {raw:?}"));
                None
            }
        }
    }

    fn get<T: FromStr>(&mut self, key: &str, what: &str, default: T) -> T {
        self.parse(key, what).unwrap_or(default)
    }

    /// Positive integer, or one of `sentinels` for `None`.
    fn optional_count(&mut self, key: &str, sentinels: &[&str], default: Option<u64>) -> Option<u64> {
        match self.raw(key) {
            None => default,
            Some(v) if sentinels.contains(&v) => None,
            Some(_) => {
                let what = format!("a positive integer or {}", sentinels.join("/"));
                match self.parse::<u64>(key, &what) {
                    Some(0) => {
                        self.fail(key, format!("{key} must be positive"));
                        default
                    }
                    Some(v) => Some(v),
                    None => default,
                }
            }
        }
    }

    fn fraction(&mut self, key: &str, default: f64, open_zero: bool) -> f64 {
        let v = self.get(key, "a number", default);
        let ok = if open_zero {
            v > 0.0 && v <= 1.0
        } else {
            (0.0..=1.0).contains(&v)
        };
        if !ok {
            let range = if open_zero { "(0, 1]" } else { "[0, 1]" };
            self.fail(key, format!("{key} must lie in {range}, got {v}"));
        }
        v
    }
}

fn build(
    entries: &BTreeMap<&'static str, Entry>,
    registry: &ProblemRegistry,
    errors: &mut Vec<ConfigError>,
) -> Option<Config> {
    for key in REQUIRED {
        if !entries.contains_key(key) {
            errors.push(ConfigError {
                line: None,
                message: format!("missing required option {key}"),
            });
        }
    }
    let mut r = Reader { entries, errors };

    let algorithm_name = r.raw("algorithm").unwrap_or("SGA").to_string();
    let mut algorithm = Algorithm::by_name(&algorithm_name).ok();
    if algorithm.is_none() {
        r.fail(
            "algorithm",
            format!("unknown algorithm {algorithm_name:?} (expected SGA, UMDA, ECGA or HBOA)"),
        );
    }

    let problem_id: Option<u32> = r.parse("problemType", "a problem code");
    if let Some(id) = problem_id {
        if !registry.is_known(id) {
            r.fail("problemType", format!("unknown problem code {id}"));
        }
    }
    let string_size: usize = r.get("stringSize", "a positive integer", 0);
    let mut spec = ProblemSpec::new(problem_id.unwrap_or(10), string_size);
    spec.sigma_k = r.get("sigmaK", "a number", 0.0);
    if !(spec.sigma_k >= 0.0 && spec.sigma_k.is_finite()) {
        r.fail("sigmaK", format!("sigmaK must be a finite nonnegative number, got {}", spec.sigma_k));
    }
    spec.trap_k = r.get("trapK", "a positive integer", spec.trap_k);
    if spec.trap_k == 0 {
        r.fail("trapK", "trapK must be at least 1".into());
    }
    spec.hier.f_high_low = r.parse("hierFHighLow", "a number");
    spec.hier.f_low_low = r.parse("hierFLowLow", "a number");
    spec.hier.f_high_top = r.parse("hierFHighTop", "a number");
    spec.hier.f_low_top = r.parse("hierFLowTop", "a number");
    if entries.contains_key("stringSize") && string_size == 0 {
        r.fail("stringSize", "stringSize must be at least 1".into());
    } else if problem_id.is_some_and(|id| registry.is_known(id)) && string_size > 0 {
        if let Err(e) = validate_length(&spec) {
            let msg = match e {
                crate::Error::Config(m) => m,
                other => other.to_string(),
            };
            if !msg.starts_with("sigmaK") && !msg.starts_with("trapK") {
                r.fail("stringSize", msg);
            }
        }
    }

    let population_size: usize = r.get("populationSize", "a positive integer", 0);
    if entries.contains_key("populationSize") && population_size == 0 {
        r.fail("populationSize", "populationSize must be at least 1".into());
    }
    let n_runs: u64 = r.get("nRuns", "a positive integer", 1);
    if n_runs == 0 {
        r.fail("nRuns", "nRuns must be at least 1".into());
    }
    let seed: u64 = r.get("seed", "an unsigned 64-bit integer", 1);

    let defaults = StopConfig::default();
    let stop = StopConfig {
        max_generations: r.optional_count("maxGenerations", &["unlimited"], defaults.max_generations),
        max_fitness_calls: r.optional_count("maxFitnessCalls", &["unlimited"], defaults.max_fitness_calls),
        stop_on_optimum: r.get("stopOnOptimum", "true or false", defaults.stop_on_optimum),
        convergence_threshold: match r.raw("convergenceThreshold") {
            None | Some("disabled") => None,
            Some(_) => r.parse("convergenceThreshold", "a number in [0.5, 1] or disabled"),
        },
        no_improvement_window: r.optional_count("noImprovementWindow", &["disabled"], None),
    };
    if let Err(e) = stop.validate() {
        let key = if e.to_string().contains("convergence") {
            "convergenceThreshold"
        } else if e.to_string().contains("noImprovement") {
            "noImprovementWindow"
        } else {
            "maxGenerations"
        };
        r.fail(key, e.to_string().trim_start_matches("configuration error: ").to_string());
    }
    let output_dir = PathBuf::from(r.raw("outputDir").unwrap_or("."));

    let sga = {
        let d = SgaParams::default();
        SgaParams {
            tournament_size: r.get("sgaTournamentSize", "a positive integer", d.tournament_size),
            crossover: match r.raw("sgaCrossoverType") {
                None => d.crossover,
                Some(v) => match CrossoverType::from_str(v) {
                    Ok(c) => c,
                    Err(e) => {
                        r.fail("sgaCrossoverType", e.to_string().trim_start_matches("configuration error: ").into());
                        d.crossover
                    }
                },
            },
            crossover_probability: r.fraction("sgaPc", d.crossover_probability, false),
            mutation_probability: match r.raw("sgaPm") {
                None | Some("1/n") => None,
                Some(_) => Some(r.fraction("sgaPm", 0.0, false)),
            },
            elitism: r.get("sgaElitism", "a nonnegative integer", d.elitism),
        }
    };
    let umda = {
        let d = UmdaParams::default();
        let tau = r.fraction("umdaTau", 0.5, true);
        let tsize: usize = r.get("umdaTournamentSize", "a positive integer", 2);
        let selection = match r.raw("umdaSelection") {
            None | Some("truncation") => Selection::Truncation { tau },
            Some("tournament") => Selection::Tournament {
                size: tsize,
                with_replacement: true,
            },
            Some(other) => {
                let msg = format!("umdaSelection must be truncation or tournament, got {other:?}");
                r.fail("umdaSelection", msg);
                d.selection
            }
        };
        UmdaParams {
            selection,
            clamp_margins: r.get("umdaClampMargins", "true or false", d.clamp_margins),
            elitism: r.get("umdaElitism", "a nonnegative integer", d.elitism),
        }
    };
    let ecga = {
        let d = EcgaParams::default();
        EcgaParams {
            tournament_size: r.get("ecgaTournamentSize", "a positive integer", d.tournament_size),
            max_group_size: r.get("ecgaMaxGroupSize", "a positive integer", d.max_group_size),
            elitism: r.get("ecgaElitism", "a nonnegative integer", d.elitism),
        }
    };
    let hboa = {
        let d = HboaParams::default();
        HboaParams {
            offspring_fraction: r.fraction("hboaOffspringFraction", d.offspring_fraction, false),
            rtr_window: match r.raw("hboaRtrWindow") {
                None | Some("auto") => None,
                Some(_) => r.parse("hboaRtrWindow", "a positive integer or auto"),
            },
            max_incoming: match r.raw("hboaMaxIncoming") {
                None | Some("unlimited") => None,
                Some(_) => r.parse("hboaMaxIncoming", "a nonnegative integer or unlimited"),
            },
        }
    };

    if let Some(alg) = algorithm.as_mut() {
        *alg = match alg {
            Algorithm::Sga(_) => Algorithm::Sga(sga),
            Algorithm::Umda(_) => Algorithm::Umda(umda),
            Algorithm::Ecga(_) => Algorithm::Ecga(ecga),
            Algorithm::Hboa(_) => Algorithm::Hboa(hboa),
        };
        if population_size > 0 {
            if let Err(e) = alg.validate(population_size) {
                let msg = e.to_string();
                let msg = msg.trim_start_matches("configuration error: ").to_string();
                let prefix = alg.name().to_lowercase();
                let suffix = [
                    ("tournament", "TournamentSize"),
                    ("elitism", "Elitism"),
                    ("group", "MaxGroupSize"),
                    ("window", "RtrWindow"),
                    ("offspring", "OffspringFraction"),
                    ("incoming", "MaxIncoming"),
                    ("tau", "Tau"),
                    ("crossover", "Pc"),
                    ("mutation", "Pm"),
                ]
                .iter()
                .find(|(word, _)| msg.to_lowercase().contains(word))
                .map(|(_, suffix)| format!("{prefix}{suffix}"));
                let key = suffix
                    .as_deref()
                    .and_then(|k| KEYS.iter().find(|key| **key == k && entries.contains_key(**key)))
                    .copied()
                    .unwrap_or("populationSize");
                r.fail(key, msg);
            }
        }
    }

    let given = KEYS
        .iter()
        .filter_map(|k| entries.get(k).map(|e| (k.to_string(), e.value.clone())))
        .collect();
    Some(Config {
        algorithm: algorithm?,
        problem: spec,
        population_size,
        n_runs,
        seed,
        stop,
        output_dir,
        given,
    })
}
