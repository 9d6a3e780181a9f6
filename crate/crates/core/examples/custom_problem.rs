//! Plugging in a new problem under its own id.

use std::sync::Arc;

use ea_core::engine::{run, Algorithm, StopConfig};
use ea_core::problems::{ProblemRegistry, ProblemSpec};
use ea_core::Genome;

/// Leading ones: number of ones before the first zero.
fn leading_ones(g: &Genome) -> f64 {
    g.iter().take_while(|&b| b).count() as f64
}

fn main() -> ea_core::Result<()> {
    let mut registry = ProblemRegistry::new();
    registry.register(99, Arc::new(leading_ones), Some(20.0))?;
    let problem = registry.build(&ProblemSpec::new(99, 20))?;
    let r = run(
        &Algorithm::by_name("SGA")?,
        &problem,
        60,
        &StopConfig::default(),
        4,
        0,
    )?;
    println!("{}: {} -> {}", problem.name(), r.stop_reason, r.best_genome);
    Ok(())
}
