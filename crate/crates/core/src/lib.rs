//! Four evolutionary algorithms over fixed-length binary strings:
//!
//! - the Simple Genetic Algorithm ([`sga`]),
//! - the Univariate Marginal Distribution Algorithm ([`umda`]),
//! - the Extended Compact Genetic Algorithm ([`ecga`]),
//! - the Hierarchical Bayesian Optimization Algorithm ([`hboa`]).
//!
//! They share one genome representation ([`Genome`]), one population type
//! ([`Population`]), a benchmark suite of deceptive and hierarchical
//! problems ([`problems`]), a generation loop with a common set of stop
//! criteria ([`engine`]) and text/CSV reporting ([`report`]). Experiments
//! can be driven from a `name = value` parameter file ([`config`]).
//!
//! Every individual has the same string length and the population size
//! stays constant for a whole run. Larger fitness is always better.
//!
//! # Example
//!
//! ```
//! use ea_core::engine::{run, Algorithm, StopConfig};
//! use ea_core::problems::{ProblemRegistry, ProblemSpec};
//! use ea_core::umda::UmdaParams;
//!
//! let spec = ProblemSpec::new(10, 20); // OneMax, 20 bits
//! let problem = ProblemRegistry::default().build(&spec).unwrap();
//! let algorithm = Algorithm::Umda(UmdaParams::default());
//! let record = run(&algorithm, &problem, 100, &StopConfig::default(), 7, 0).unwrap();
//! assert!(record.succeeded());
//! assert_eq!(record.best_genome.len(), 20);
//! ```

pub mod config;
pub mod ecga;
pub mod engine;
mod error;
mod genome;
pub mod hboa;
mod population;
pub mod problems;
pub mod report;
mod rng;
pub mod sga;
pub mod umda;

pub use error::{Error, Result};
pub use genome::{hamming_distance, Genome};
pub use population::{Population, PopulationStats};
pub use rng::RandomStream;
