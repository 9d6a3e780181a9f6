//! UMDA on OneMax, stepping the run by hand to watch the marginals converge.

use ea_core::engine::{Algorithm, Runner, StopConfig};
use ea_core::problems::{ProblemRegistry, ProblemSpec};
use ea_core::umda::UmdaParams;

fn main() -> ea_core::Result<()> {
    let problem = ProblemRegistry::default().build(&ProblemSpec::new(10, 50))?;
    let algorithm = Algorithm::Umda(UmdaParams::default());
    let stop = StopConfig::default();
    let mut runner = Runner::new(&algorithm, &problem, 200, &stop, 3, 0)?;
    loop {
        let p = runner.population().one_frequencies();
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        println!(
            "gen {:>3}  best {:>4}  mean p(1) {:.3}",
            runner.generation(),
            runner.best_fitness(),
            mean
        );
        if let Some(reason) = runner.check_stop() {
            println!("stopped: {reason}");
            break;
        }
        runner.step()?;
    }
    Ok(())
}
