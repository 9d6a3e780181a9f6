//! Simple GA with uniform crossover on OneMax.

use ea_core::engine::{run_many, Algorithm, StopConfig};
use ea_core::problems::{ProblemRegistry, ProblemSpec};
use ea_core::report::StatsRecord;
use ea_core::sga::{CrossoverType, SgaParams};

fn main() -> ea_core::Result<()> {
    let problem = ProblemRegistry::default().build(&ProblemSpec::new(10, 30))?;
    let params = SgaParams {
        crossover: CrossoverType::Uniform,
        ..SgaParams::default()
    };
    let stop = StopConfig {
        max_generations: Some(200),
        ..StopConfig::default()
    };
    let records = run_many(&Algorithm::Sga(params), &problem, 100, &stop, 1, 10)?;
    for r in &records {
        println!(
            "run {}: {} after {} generations, {} evaluations",
            r.header.run_index,
            r.stop_reason,
            r.final_generation(),
            r.total_fitness_calls
        );
    }
    print!("{}", StatsRecord::from_runs(&records)?.render_aggregate());
    Ok(())
}
