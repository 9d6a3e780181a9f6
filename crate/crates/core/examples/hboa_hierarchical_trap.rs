//! hBOA on the 27-bit hierarchical trap, doubling the population until the
//! optimum is found.

use ea_core::engine::{run, Algorithm, StopConfig};
use ea_core::hboa::HboaParams;
use ea_core::problems::{ProblemRegistry, ProblemSpec};

fn main() -> ea_core::Result<()> {
    let problem = ProblemRegistry::default().build(&ProblemSpec::new(21, 27))?;
    println!("{} optimum {:?}", problem.name(), problem.optimum_value());
    let algorithm = Algorithm::Hboa(HboaParams::default());
    let stop = StopConfig {
        max_fitness_calls: Some(1_000_000),
        ..StopConfig::default()
    };
    for (attempt, size) in [250, 500, 1000, 2000].into_iter().enumerate() {
        let r = run(&algorithm, &problem, size, &stop, 21, attempt as u64)?;
        println!(
            "N = {size}: {} best {} in {} evaluations",
            r.stop_reason, r.best_fitness, r.total_fitness_calls
        );
        if r.succeeded() {
            println!("dependencies: {}", r.final_model.unwrap());
            break;
        }
    }
    Ok(())
}
