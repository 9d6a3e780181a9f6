//! Benchmark problems, the Gaussian noise wrapper and the plug-in registry.
//!
//! Built-in problems are identified by their menu code:
//!
//! | code | problem                      | code | problem                   |
//! |-----:|------------------------------|-----:|---------------------------|
//! |    0 | ZeroMax                      |   10 | OneMax                    |
//! |    1 | Zero Quadratic               |   11 | Quadratic                 |
//! |    2 | Zero 3-Deceptive             |   12 | 3-Deceptive               |
//! |    3 | Zero 3-Deceptive Bipolar     |   13 | 3-Deceptive Bipolar       |
//! |    4 | Zero 3-Deceptive Overlapping |   14 | 3-Deceptive Overlapping   |
//! |    5 | Zero Concatenated Trap-k     |   15 | Concatenated Trap-k       |
//! |    6 | Zero Uniform 6-Blocks        |   16 | Uniform 6-Blocks          |
//! |   21 | Hierarchical Trap One        |   22 | Hierarchical Trap Two     |
//!
//! Zero problems are the One problems evaluated on the complemented string,
//! so their optimum is the all-zeros string.
//!
//! New problems implement [`Problem`] and are made selectable through
//! [`ProblemRegistry::register`].

mod functions;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::genome::Genome;

pub use functions::{hier_levels, HierParams};

/// Largest string size accepted by [`brute_force_optimum`].
pub const BRUTE_FORCE_MAX_LEN: usize = 24;

/// Default block size of Concatenated Trap-k.
pub const DEFAULT_TRAP_K: usize = 5;

/// A fitness function over binary strings. Larger is better.
///
/// Implementations must be pure functions of the alleles; noise is added by
/// the [`Evaluator`], not here.
pub trait Problem: Send + Sync {
    fn name(&self) -> String;

    fn fitness(&self, genome: &Genome) -> f64;
}

impl<F> Problem for F
where
    F: Fn(&Genome) -> f64 + Send + Sync,
{
    fn name(&self) -> String {
        "custom".to_string()
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        self(genome)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinKind {
    OneMax,
    Quadratic,
    Deceptive3,
    Deceptive3Bipolar,
    Deceptive3Overlapping,
    TrapK,
    Uniform6Blocks,
    HierarchicalTrapOne,
    HierarchicalTrapTwo,
}

impl BuiltinKind {
    fn label(self) -> &'static str {
        match self {
            BuiltinKind::OneMax => "OneMax",
            BuiltinKind::Quadratic => "Quadratic",
            BuiltinKind::Deceptive3 => "3-Deceptive",
            BuiltinKind::Deceptive3Bipolar => "3-Deceptive Bipolar",
            BuiltinKind::Deceptive3Overlapping => "3-Deceptive Overlapping",
            BuiltinKind::TrapK => "Concatenated Trap-k",
            BuiltinKind::Uniform6Blocks => "Uniform 6-Blocks",
            BuiltinKind::HierarchicalTrapOne => "Hierarchical Trap One",
            BuiltinKind::HierarchicalTrapTwo => "Hierarchical Trap Two",
        }
    }
}

/// A built-in menu entry: the block function plus whether it is the Zero
/// (complemented) variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Builtin {
    pub kind: BuiltinKind,
    pub zero: bool,
}

impl Builtin {
    pub fn from_code(code: u32) -> Option<Builtin> {
        use BuiltinKind::*;
        let kind_of = |c: u32| match c {
            0 => Some(OneMax),
            1 => Some(Quadratic),
            2 => Some(Deceptive3),
            3 => Some(Deceptive3Bipolar),
            4 => Some(Deceptive3Overlapping),
            5 => Some(TrapK),
            6 => Some(Uniform6Blocks),
            _ => None,
        };
        match code {
            0..=6 => kind_of(code).map(|kind| Builtin { kind, zero: true }),
            10..=16 => kind_of(code - 10).map(|kind| Builtin { kind, zero: false }),
            21 => Some(Builtin {
                kind: HierarchicalTrapOne,
                zero: false,
            }),
            22 => Some(Builtin {
                kind: HierarchicalTrapTwo,
                zero: false,
            }),
            _ => None,
        }
    }

    pub fn name(self) -> String {
        match (self.kind, self.zero) {
            (BuiltinKind::OneMax, true) => "ZeroMax".to_string(),
            (kind, true) => format!("Zero {}", kind.label()),
            (kind, false) => kind.label().to_string(),
        }
    }
}

/// The menu codes of all built-in problems, in menu order.
pub const MENU_CODES: [u32; 16] = [0, 1, 2, 3, 4, 5, 6, 10, 11, 12, 13, 14, 15, 16, 21, 22];

/// `(code, name)` for every built-in problem.
pub fn menu() -> Vec<(u32, String)> {
    MENU_CODES
        .iter()
        .map(|&c| (c, Builtin::from_code(c).unwrap().name()))
        .collect()
}

/// Overrides for the four hierarchical trap constants; unset values take
/// the problem's defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HierOverrides {
    pub f_high_low: Option<f64>,
    pub f_low_low: Option<f64>,
    pub f_high_top: Option<f64>,
    pub f_low_top: Option<f64>,
}

impl HierOverrides {
    fn apply(&self, base: HierParams) -> HierParams {
        HierParams {
            f_high_low: self.f_high_low.unwrap_or(base.f_high_low),
            f_low_low: self.f_low_low.unwrap_or(base.f_low_low),
            f_high_top: self.f_high_top.unwrap_or(base.f_high_top),
            f_low_top: self.f_low_top.unwrap_or(base.f_low_top),
        }
    }
}

/// Which problem to solve and at what size.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub problem_id: u32,
    pub string_size: usize,
    /// Standard deviation of the additive Gaussian noise; 0 disables it.
    pub sigma_k: f64,
    pub trap_k: usize,
    pub hier: HierOverrides,
}

impl ProblemSpec {
    pub fn new(problem_id: u32, string_size: usize) -> Self {
        ProblemSpec {
            problem_id,
            string_size,
            sigma_k: 0.0,
            trap_k: DEFAULT_TRAP_K,
            hier: HierOverrides::default(),
        }
    }

    pub fn with_noise(mut self, sigma_k: f64) -> Self {
        self.sigma_k = sigma_k;
        self
    }

    pub fn with_trap_k(mut self, k: usize) -> Self {
        self.trap_k = k;
        self
    }
}

/// Check that the string size fits the block structure of a built-in
/// problem. Custom problem ids only need `n >= 1`.
pub fn validate_length(spec: &ProblemSpec) -> Result<()> {
    let n = spec.string_size;
    if n == 0 {
        return Err(Error::config("stringSize must be at least 1"));
    }
    if !(spec.sigma_k >= 0.0 && spec.sigma_k.is_finite()) {
        return Err(Error::config(format!(
            "sigmaK must be a finite nonnegative number, got {}",
            spec.sigma_k
        )));
    }
    let Some(b) = Builtin::from_code(spec.problem_id) else {
        return Ok(());
    };
    let label = b.kind.label();
    let divisible = |d: usize| -> Result<()> {
        if n.is_multiple_of(d) {
            Ok(())
        } else {
            Err(Error::config(format!(
                "{label} requires stringSize divisible by {d} (got {n})"
            )))
        }
    };
    match b.kind {
        BuiltinKind::OneMax => Ok(()),
        BuiltinKind::Quadratic => divisible(2),
        BuiltinKind::Deceptive3 => divisible(3),
        BuiltinKind::Deceptive3Bipolar | BuiltinKind::Uniform6Blocks => divisible(6),
        BuiltinKind::Deceptive3Overlapping => {
            if n >= 3 && n % 2 == 1 {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "{label} requires an odd stringSize of at least 3 (got {n})"
                )))
            }
        }
        BuiltinKind::TrapK => {
            if spec.trap_k == 0 {
                return Err(Error::config("trapK must be at least 1"));
            }
            divisible(spec.trap_k)
        }
        BuiltinKind::HierarchicalTrapOne | BuiltinKind::HierarchicalTrapTwo => {
            if hier_levels(n).is_some() {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "{label} requires stringSize = 3^l for some l >= 1 (got {n})"
                )))
            }
        }
    }
}

#[derive(Clone, Debug)]
struct BuiltinProblem {
    builtin: Builtin,
    trap_k: usize,
    hier: HierParams,
}

impl BuiltinProblem {
    fn eval_units(&self, bits: &[u8]) -> f64 {
        use BuiltinKind::*;
        match self.builtin.kind {
            OneMax => functions::one_max(bits),
            Quadratic => functions::quadratic(bits),
            Deceptive3 => functions::deceptive3(bits),
            Deceptive3Bipolar => functions::deceptive3_bipolar(bits),
            Deceptive3Overlapping => functions::deceptive3_overlapping(bits),
            TrapK => functions::concatenated_trap(bits, self.trap_k),
            Uniform6Blocks => functions::uniform_6_blocks(bits),
            HierarchicalTrapOne | HierarchicalTrapTwo => {
                functions::hierarchical_trap(bits, &self.hier)
            }
        }
    }
}

impl Problem for BuiltinProblem {
    fn name(&self) -> String {
        self.builtin.name()
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        self.eval_units(&genome.to_units(self.builtin.zero))
    }
}

/// A validated problem ready for evaluation: the spec, its fitness
/// function, and the optimum value if one is known.
#[derive(Clone)]
pub struct ProblemInstance {
    spec: ProblemSpec,
    problem: Arc<dyn Problem>,
    optimum: Option<f64>,
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("spec", &self.spec)
            .field("name", &self.problem.name())
            .field("optimum", &self.optimum)
            .finish()
    }
}

impl ProblemInstance {
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn name(&self) -> String {
        self.problem.name()
    }

    pub fn string_size(&self) -> usize {
        self.spec.string_size
    }

    pub fn sigma_k(&self) -> f64 {
        self.spec.sigma_k
    }

    pub fn is_noisy(&self) -> bool {
        self.spec.sigma_k > 0.0
    }

    /// Noise-free fitness. Does not count as a fitness call.
    pub fn base_fitness(&self, genome: &Genome) -> f64 {
        assert_eq!(
            genome.len(),
            self.spec.string_size,
            "genome length does not match the problem's string size"
        );
        self.problem.fitness(genome)
    }

    /// Base fitness of the best string, or `None` for custom problems
    /// registered without a known optimum.
    pub fn optimum_value(&self) -> Option<f64> {
        self.optimum
    }
}

/// Built-in problems plus any registered custom ones.
#[derive(Clone, Default)]
pub struct ProblemRegistry {
    custom: BTreeMap<u32, (Arc<dyn Problem>, Option<f64>)>,
}

impl ProblemRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Make `id` selectable as a problem type.
    pub fn register(
        &mut self,
        id: u32,
        problem: Arc<dyn Problem>,
        optimum: Option<f64>,
    ) -> Result<()> {
        if Builtin::from_code(id).is_some() {
            return Err(Error::config(format!(
                "problem id {id} collides with a built-in problem"
            )));
        }
        if self.custom.contains_key(&id) {
            return Err(Error::config(format!("problem id {id} is already registered")));
        }
        self.custom.insert(id, (problem, optimum));
        Ok(())
    }

    pub fn is_known(&self, id: u32) -> bool {
        Builtin::from_code(id).is_some() || self.custom.contains_key(&id)
    }

    /// Every selectable id with its display name, built-ins first.
    pub fn entries(&self) -> Vec<(u32, String)> {
        let mut v = menu();
        v.extend(self.custom.iter().map(|(&id, (p, _))| (id, p.name())));
        v
    }

    pub fn build(&self, spec: &ProblemSpec) -> Result<ProblemInstance> {
        validate_length(spec)?;
        if let Some((problem, optimum)) = self.custom.get(&spec.problem_id) {
            return Ok(ProblemInstance {
                spec: spec.clone(),
                problem: Arc::clone(problem),
                optimum: *optimum,
            });
        }
        let builtin = Builtin::from_code(spec.problem_id)
            .ok_or_else(|| Error::config(format!("unknown problem code {}", spec.problem_id)))?;
        let hier = match builtin.kind {
            BuiltinKind::HierarchicalTrapTwo => {
                HierParams::trap_two(hier_levels(spec.string_size).unwrap_or(1))
            }
            _ => HierParams::trap_one(),
        };
        let problem = BuiltinProblem {
            builtin,
            trap_k: spec.trap_k,
            hier: spec.hier.apply(hier),
        };
        let n = spec.string_size;
        let best = if builtin.zero {
            Genome::zeros(n)
        } else {
            Genome::ones(n)
        };
        let optimum = Some(problem.fitness(&best));
        Ok(ProblemInstance {
            spec: spec.clone(),
            problem: Arc::new(problem),
            optimum,
        })
    }
}

/// Exhaustive search over all `2^n` strings.
///
/// Returns the best base fitness and the lexicographically smallest string
/// attaining it. Refuses noisy problems and `n > 24`.
pub fn brute_force_optimum(problem: &ProblemInstance) -> Result<(f64, Genome)> {
    let n = problem.string_size();
    if n > BRUTE_FORCE_MAX_LEN {
        return Err(Error::config(format!(
            "brute force enumerates 2^n strings and is limited to n <= {BRUTE_FORCE_MAX_LEN} (got n = {n})"
        )));
    }
    if problem.is_noisy() {
        return Err(Error::config(
            "brute force needs a deterministic problem (sigmaK = 0)",
        ));
    }
    let mut genome = Genome::zeros(n);
    let mut best = (problem.base_fitness(&genome), genome.clone());
    // Position 0 is the most significant bit, so counting upward visits
    // strings in lexicographic order.
    for x in 1u64..(1u64 << n) {
        for i in 0..n {
            genome.set_allele(i, (x >> (n - 1 - i)) & 1 == 1);
        }
        let f = problem.base_fitness(&genome);
        if f > best.0 {
            best = (f, genome.clone());
        }
    }
    Ok(best)
}

/// Counts fitness calls and adds Gaussian noise when `sigmaK > 0`.
#[derive(Debug)]
pub struct Evaluator {
    problem: ProblemInstance,
    noise: Option<Normal<f64>>,
    calls: u64,
}

impl Evaluator {
    pub fn new(problem: ProblemInstance) -> Self {
        let sigma = problem.sigma_k();
        let noise = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("sigmaK validated"));
        Evaluator {
            problem,
            noise,
            calls: 0,
        }
    }

    pub fn problem(&self) -> &ProblemInstance {
        &self.problem
    }

    /// Number of evaluations performed so far.
    pub fn fitness_calls(&self) -> u64 {
        self.calls
    }

    /// Base fitness plus a fresh noise draw; counts one fitness call.
    pub fn compute_fitness<R: Rng + ?Sized>(&mut self, genome: &Genome, rng: &mut R) -> f64 {
        let base = self.problem.base_fitness(genome);
        self.calls += 1;
        match &self.noise {
            Some(normal) => base + normal.sample(rng),
            None => base,
        }
    }

    /// Evaluate `genome` and store the result in its fitness cache.
    pub fn evaluate<R: Rng + ?Sized>(&mut self, genome: &mut Genome, rng: &mut R) -> f64 {
        let f = self.compute_fitness(genome, rng);
        genome.set_fitness(f);
        f
    }

    /// Evaluate every member that has no cached fitness, in index order.
    pub fn evaluate_all<R: Rng + ?Sized>(&mut self, genomes: &mut [Genome], rng: &mut R) {
        for g in genomes.iter_mut().filter(|g| !g.is_evaluated()) {
            self.evaluate(g, rng);
        }
    }
}
