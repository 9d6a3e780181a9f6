//! Gaussian fitness noise. The optimum check is disabled for noisy
//! problems, so runs end on a budget or a stagnation criterion.

use ea_core::engine::{run, Algorithm, StopConfig};
use ea_core::problems::{ProblemRegistry, ProblemSpec};

fn main() -> ea_core::Result<()> {
    let stop = StopConfig {
        max_generations: Some(300),
        no_improvement_window: Some(40),
        ..StopConfig::default()
    };
    for sigma in [0.0, 1.0, 3.0] {
        let problem = ProblemRegistry::default().build(&ProblemSpec::new(10, 40).with_noise(sigma))?;
        let r = run(&Algorithm::by_name("UMDA")?, &problem, 200, &stop, 8, 0)?;
        println!(
            "sigma {sigma}: {} at generation {}, true fitness of best {}",
            r.stop_reason,
            r.final_generation(),
            problem.base_fitness(&r.best_genome)
        );
    }
    Ok(())
}
