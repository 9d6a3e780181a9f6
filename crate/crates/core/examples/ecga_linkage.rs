//! ECGA vs UMDA on concatenated 3-bit deceptive blocks. ECGA learns the
//! block structure; UMDA is pulled toward the deceptive attractor.

use ea_core::engine::{run_many, Algorithm, StopConfig};
use ea_core::problems::{ProblemRegistry, ProblemSpec};

fn main() -> ea_core::Result<()> {
    let problem = ProblemRegistry::default().build(&ProblemSpec::new(12, 30))?;
    let stop = StopConfig::default();
    for name in ["UMDA", "ECGA"] {
        let algorithm = Algorithm::by_name(name)?;
        let records = run_many(&algorithm, &problem, 1000, &stop, 11, 5)?;
        for r in &records {
            let model = r.final_model.as_ref().map(|m| m.to_string()).unwrap_or_default();
            println!("{name} run {}: best {} {model}", r.header.run_index, r.best_fitness);
        }
    }
    Ok(())
}
