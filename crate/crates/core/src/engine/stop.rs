use std::fmt;

use crate::error::{Error, Result};
use crate::population::Population;

/// Tolerance used when comparing the best fitness against the optimum.
pub const OPTIMUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StopConfig {
    pub max_generations: Option<u64>,
    pub max_fitness_calls: Option<u64>,
    pub stop_on_optimum: bool,
    /// Stop once every position's majority allele reaches this frequency.
    pub convergence_threshold: Option<f64>,
    /// Stop after this many generations without a new best-so-far.
    pub no_improvement_window: Option<u64>,
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            max_generations: Some(1_000),
            max_fitness_calls: Some(10_000_000),
            stop_on_optimum: true,
            convergence_threshold: None,
            no_improvement_window: None,
        }
    }
}

impl StopConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_generations.is_none() && self.max_fitness_calls.is_none() {
            return Err(Error::config(
                "at least one of maxGenerations or maxFitnessCalls must be bounded",
            ));
        }
        if self.max_generations == Some(0) || self.max_fitness_calls == Some(0) {
            return Err(Error::config(
                "maxGenerations and maxFitnessCalls must be positive",
            ));
        }
        if let Some(eps) = self.convergence_threshold {
            if !(0.5..=1.0).contains(&eps) {
                return Err(Error::config(format!(
                    "convergenceThreshold must lie in [0.5, 1.0], got {eps}"
                )));
            }
        }
        if self.no_improvement_window == Some(0) {
            return Err(Error::config("noImprovementWindow must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    OptimumFound,
    MaxGenerations,
    MaxFitnessCalls,
    Converged,
    NoImprovement,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::OptimumFound => "OptimumFound",
            StopReason::MaxGenerations => "MaxGenerations",
            StopReason::MaxFitnessCalls => "MaxFitnessCalls",
            StopReason::Converged => "Converged",
            StopReason::NoImprovement => "NoImprovement",
        })
    }
}

impl std::str::FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "OptimumFound" => StopReason::OptimumFound,
            "MaxGenerations" => StopReason::MaxGenerations,
            "MaxFitnessCalls" => StopReason::MaxFitnessCalls,
            "Converged" => StopReason::Converged,
            "NoImprovement" => StopReason::NoImprovement,
            other => return Err(Error::config(format!("unknown stop reason {other:?}"))),
        })
    }
}

/// Everything the stopper looks at after a generation.
#[derive(Clone, Copy, Debug)]
pub struct StopState<'a> {
    pub generation: u64,
    pub fitness_calls: u64,
    pub population: &'a Population,
    pub best_so_far: f64,
    /// Known optimum of a noise-free problem; `None` disables the optimum
    /// criterion.
    pub optimum: Option<f64>,
    /// Generation at which `best_so_far` last improved.
    pub last_improvement: u64,
}

/// The first matching criterion, in the fixed order optimum, fitness calls,
/// generations, convergence, stagnation.
pub fn should_stop(state: &StopState<'_>, cfg: &StopConfig) -> Option<StopReason> {
    if cfg.stop_on_optimum {
        if let Some(opt) = state.optimum {
            if state.best_so_far >= opt - OPTIMUM_TOLERANCE {
                return Some(StopReason::OptimumFound);
            }
        }
    }
    if cfg
        .max_fitness_calls
        .is_some_and(|max| state.fitness_calls >= max)
    {
        return Some(StopReason::MaxFitnessCalls);
    }
    if cfg
        .max_generations
        .is_some_and(|max| state.generation >= max)
    {
        return Some(StopReason::MaxGenerations);
    }
    if let Some(eps) = cfg.convergence_threshold {
        let converged = state
            .population
            .one_frequencies()
            .into_iter()
            .all(|p| p.max(1.0 - p) >= eps);
        if converged {
            return Some(StopReason::Converged);
        }
    }
    if let Some(window) = cfg.no_improvement_window {
        if state.generation - state.last_improvement >= window {
            return Some(StopReason::NoImprovement);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Genome, RandomStream};

    fn state(population: &Population) -> StopState<'_> {
        StopState {
            generation: 3,
            fitness_calls: 100,
            population,
            best_so_far: 5.0,
            optimum: Some(10.0),
            last_improvement: 3,
        }
    }

    fn random_pop() -> Population {
        Population::random(20, 10, &mut RandomStream::new(1)).unwrap()
    }

    #[test]
    fn optimum_found() {
        let p = random_pop();
        let s = StopState {
            best_so_far: 10.0,
            ..state(&p)
        };
        assert_eq!(should_stop(&s, &StopConfig::default()), Some(StopReason::OptimumFound));
        let cfg = StopConfig {
            stop_on_optimum: false,
            ..StopConfig::default()
        };
        assert_eq!(should_stop(&s, &cfg), None);
        let s = StopState { optimum: None, ..s };
        assert_eq!(should_stop(&s, &StopConfig::default()), None);
    }

    #[test]
    fn max_generations_and_calls() {
        let p = random_pop();
        let cfg = StopConfig {
            max_generations: Some(3),
            ..StopConfig::default()
        };
        assert_eq!(should_stop(&state(&p), &cfg), Some(StopReason::MaxGenerations));
        let cfg = StopConfig {
            max_generations: Some(3),
            max_fitness_calls: Some(100),
            ..StopConfig::default()
        };
        // calls outrank generations
        assert_eq!(should_stop(&state(&p), &cfg), Some(StopReason::MaxFitnessCalls));
    }

    #[test]
    fn converged_population() {
        let p = Population::from_members(vec![Genome::ones(5); 4]).unwrap();
        let cfg = StopConfig {
            convergence_threshold: Some(0.99),
            ..StopConfig::default()
        };
        assert_eq!(should_stop(&state(&p), &cfg), Some(StopReason::Converged));
        assert_eq!(should_stop(&state(&random_pop()), &cfg), None);
    }

    #[test]
    fn stagnation_window() {
        let p = random_pop();
        let cfg = StopConfig {
            no_improvement_window: Some(2),
            ..StopConfig::default()
        };
        let s = StopState {
            generation: 5,
            ..state(&p)
        };
        assert_eq!(should_stop(&s, &cfg), Some(StopReason::NoImprovement));
        let s = StopState {
            generation: 4,
            ..state(&p)
        };
        assert_eq!(should_stop(&s, &cfg), None);
    }

    #[test]
    fn validation() {
        assert!(StopConfig::default().validate().is_ok());
        let unbounded = StopConfig {
            max_generations: None,
            max_fitness_calls: None,
            ..StopConfig::default()
        };
        assert!(unbounded.validate().is_err());
        let bad_eps = StopConfig {
            convergence_threshold: Some(0.3),
            ..StopConfig::default()
        };
        assert!(bad_eps.validate().is_err());
    }
}
