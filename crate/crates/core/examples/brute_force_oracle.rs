//! Exhaustive optima of every built-in problem at a small length.

use ea_core::problems::{brute_force_optimum, menu, validate_length, ProblemRegistry, ProblemSpec};

fn main() -> ea_core::Result<()> {
    let registry = ProblemRegistry::default();
    for (code, name) in menu() {
        let Some(n) = (6..=15).find(|&n| validate_length(&ProblemSpec::new(code, n)).is_ok()) else {
            continue;
        };
        let problem = registry.build(&ProblemSpec::new(code, n))?;
        let (value, genome) = brute_force_optimum(&problem)?;
        println!("{code:>2} {name:<32} n={n:<2} {value:>6} {genome}");
    }
    Ok(())
}
