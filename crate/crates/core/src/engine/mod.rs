//! The generation loop shared by all algorithms, selection operators and
//! the stop criteria.

mod selection;
mod stop;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::ecga::{self, EcgaParams};
use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::hboa::{self, HboaParams};
use crate::population::Population;
use crate::problems::{Evaluator, ProblemInstance};
use crate::report::{GenerationRow, RunHeader, RunRecord};
use crate::rng::{RandomStream, GENERATOR_NAME};
use crate::sga::{self, SgaParams};
use crate::umda::{self, UmdaParams};

pub use selection::{tournament_select, truncation_count, truncation_select, Selection};
pub use stop::{should_stop, StopConfig, StopReason, StopState, OPTIMUM_TOLERANCE};

/// An algorithm together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    Sga(SgaParams),
    Umda(UmdaParams),
    Ecga(EcgaParams),
    Hboa(HboaParams),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Sga(_) => "SGA",
            Algorithm::Umda(_) => "UMDA",
            Algorithm::Ecga(_) => "ECGA",
            Algorithm::Hboa(_) => "HBOA",
        }
    }

    /// The algorithm with default parameters, by name (case-insensitive).
    pub fn by_name(name: &str) -> Result<Algorithm> {
        match name.to_ascii_uppercase().as_str() {
            "SGA" => Ok(Algorithm::Sga(SgaParams::default())),
            "UMDA" => Ok(Algorithm::Umda(UmdaParams::default())),
            "ECGA" => Ok(Algorithm::Ecga(EcgaParams::default())),
            "HBOA" => Ok(Algorithm::Hboa(HboaParams::default())),
            _ => Err(Error::config(format!(
                "unknown algorithm {name:?} (expected SGA, UMDA, ECGA or HBOA)"
            ))),
        }
    }

    pub fn validate(&self, population_size: usize) -> Result<()> {
        match self {
            Algorithm::Sga(p) => p.validate(population_size),
            Algorithm::Umda(p) => p.validate(population_size),
            Algorithm::Ecga(p) => p.validate(population_size),
            Algorithm::Hboa(p) => p.validate(population_size),
        }
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        match self {
            Algorithm::Sga(p) => p.describe(),
            Algorithm::Umda(p) => p.describe(),
            Algorithm::Ecga(p) => p.describe(),
            Algorithm::Hboa(p) => p.describe(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The model learned in the last generation of a run.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSnapshot {
    /// ECGA linkage groups.
    Partition(Vec<Vec<usize>>),
    /// hBOA dependency edges `(from, to)`.
    Dependencies(Vec<(usize, usize)>),
}

impl fmt::Display for ModelSnapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSnapshot::Partition(groups) => {
                for g in groups {
                    let items: Vec<String> = g.iter().map(usize::to_string).collect();
                    write!(f, "[{}]", items.join(","))?;
                }
                Ok(())
            }
            ModelSnapshot::Dependencies(edges) => {
                let items: Vec<String> = edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "{{{}}}", items.join(","))
            }
        }
    }
}

/// A single run advanced one generation at a time.
///
/// [`run`] drives this to completion; stepping manually gives access to the
/// population between generations.
pub struct Runner {
    algorithm: Algorithm,
    stop: StopConfig,
    evaluator: Evaluator,
    rng: RandomStream,
    population: Population,
    generation: u64,
    best_so_far: Genome,
    last_improvement: u64,
    optimum: Option<f64>,
    model: Option<ModelSnapshot>,
    header: RunHeader,
    rows: Vec<GenerationRow>,
    started: Instant,
}

impl Runner {
    /// Validate everything, create and evaluate the initial population.
    pub fn new(
        algorithm: &Algorithm,
        problem: &ProblemInstance,
        population_size: usize,
        stop: &StopConfig,
        seed: u64,
        run_index: u64,
    ) -> Result<Self> {
        if population_size == 0 {
            return Err(Error::config("populationSize must be at least 1"));
        }
        stop.validate()?;
        algorithm.validate(population_size)?;
        crate::problems::validate_length(problem.spec())?;

        let started = Instant::now();
        let mut rng = RandomStream::for_run(seed, run_index);
        let mut evaluator = Evaluator::new(problem.clone());
        let mut population = Population::random(population_size, problem.string_size(), &mut rng)?;
        evaluator.evaluate_all(population.members_mut(), &mut rng);

        let mut params = algorithm.describe();
        params.extend(stop_echo(stop));
        let header = RunHeader {
            algorithm: algorithm.name().to_string(),
            problem_id: problem.spec().problem_id,
            problem_name: problem.name(),
            string_size: problem.string_size(),
            sigma_k: problem.sigma_k(),
            population_size,
            seed,
            run_index,
            generator: GENERATOR_NAME.to_string(),
            params,
        };
        let stats = population.stats()?;
        let best_so_far = population[stats.best_index].clone();
        let optimum = if problem.is_noisy() {
            None
        } else {
            problem.optimum_value()
        };
        let mut runner = Runner {
            algorithm: algorithm.clone(),
            stop: stop.clone(),
            evaluator,
            rng,
            population,
            generation: 0,
            best_so_far,
            last_improvement: 0,
            optimum,
            model: None,
            header,
            rows: Vec::new(),
            started,
        };
        runner.record_row()?;
        Ok(runner)
    }

    fn record_row(&mut self) -> Result<()> {
        let stats = self.population.stats()?;
        self.rows.push(GenerationRow {
            generation: self.generation,
            fitness_calls: self.evaluator.fitness_calls(),
            best: stats.best_fitness,
            average: stats.average_fitness,
            best_so_far: self.best_fitness(),
        });
        Ok(())
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn fitness_calls(&self) -> u64 {
        self.evaluator.fitness_calls()
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_so_far.fitness().expect("best-so-far is evaluated")
    }

    pub fn best_genome(&self) -> &Genome {
        &self.best_so_far
    }

    pub fn model(&self) -> Option<&ModelSnapshot> {
        self.model.as_ref()
    }

    pub fn rows(&self) -> &[GenerationRow] {
        &self.rows
    }

    /// Apply the stop criteria to the current state.
    pub fn check_stop(&self) -> Option<StopReason> {
        should_stop(
            &StopState {
                generation: self.generation,
                fitness_calls: self.evaluator.fitness_calls(),
                population: &self.population,
                best_so_far: self.best_fitness(),
                optimum: self.optimum,
                last_improvement: self.last_improvement,
            },
            &self.stop,
        )
    }

    /// Produce the next generation and record its row.
    pub fn step(&mut self) -> Result<()> {
        let (ev, rng) = (&mut self.evaluator, &mut self.rng);
        let next = match &self.algorithm {
            Algorithm::Sga(p) => sga::sga_generation(&self.population, p, ev, rng)?,
            Algorithm::Umda(p) => umda::umda_generation(&self.population, p, ev, rng)?.0,
            Algorithm::Ecga(p) => {
                let (next, model) = ecga::ecga_generation(&self.population, p, ev, rng)?;
                debug_assert!(model.is_valid_partition());
                self.model = Some(ModelSnapshot::Partition(model.partition()));
                next
            }
            Algorithm::Hboa(p) => {
                let (next, forest) = hboa::hboa_generation(&self.population, p, ev, rng)?;
                debug_assert!(forest.is_acyclic());
                self.model = Some(ModelSnapshot::Dependencies(forest.edges()));
                next
            }
        };
        if next.len() != self.population.len() {
            return Err(Error::state(format!(
                "population size changed from {} to {}",
                self.population.len(),
                next.len()
            )));
        }
        self.population = next;
        self.generation += 1;

        let stats = self.population.stats()?;
        if stats.best_fitness > self.best_fitness() {
            self.best_so_far = self.population[stats.best_index].clone();
            self.last_improvement = self.generation;
        }
        self.record_row()
    }

    pub fn finish(self, stop_reason: StopReason) -> RunRecord {
        RunRecord {
            header: self.header,
            rows: self.rows,
            stop_reason,
            total_fitness_calls: self.evaluator.fitness_calls(),
            best_fitness: self.best_so_far.fitness().expect("evaluated"),
            best_genome: self.best_so_far,
            final_model: self.model,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

fn stop_echo(stop: &StopConfig) -> Vec<(String, String)> {
    let opt = |v: Option<u64>, none: &str| v.map_or(none.to_string(), |x| x.to_string());
    vec![
        ("maxGenerations".into(), opt(stop.max_generations, "unlimited")),
        ("maxFitnessCalls".into(), opt(stop.max_fitness_calls, "unlimited")),
        ("stopOnOptimum".into(), stop.stop_on_optimum.to_string()),
        (
            "convergenceThreshold".into(),
            stop.convergence_threshold
                .map_or("disabled".to_string(), |e| e.to_string()),
        ),
        (
            "noImprovementWindow".into(),
            opt(stop.no_improvement_window, "disabled"),
        ),
    ]
}

/// Execute one run to completion.
///
/// The run's random stream is the substream `run_index` of `seed`, so the
/// result is a pure function of the arguments (apart from wall time).
pub fn run(
    algorithm: &Algorithm,
    problem: &ProblemInstance,
    population_size: usize,
    stop: &StopConfig,
    seed: u64,
    run_index: u64,
) -> Result<RunRecord> {
    let mut runner = Runner::new(algorithm, problem, population_size, stop, seed, run_index)?;
    loop {
        if let Some(reason) = runner.check_stop() {
            return Ok(runner.finish(reason));
        }
        runner.step()?;
    }
}

/// Execute runs `0..runs` in parallel and return their records in run
/// order.
pub fn run_many(
    algorithm: &Algorithm,
    problem: &ProblemInstance,
    population_size: usize,
    stop: &StopConfig,
    seed: u64,
    runs: u64,
) -> Result<Vec<RunRecord>> {
    // Fail fast on configuration errors before any worker starts.
    stop.validate()?;
    algorithm.validate(population_size)?;
    (0..runs)
        .into_par_iter()
        .map(|r| run(algorithm, problem, population_size, stop, seed, r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{ProblemRegistry, ProblemSpec};

    fn onemax(n: usize) -> ProblemInstance {
        ProblemRegistry::default()
            .build(&ProblemSpec::new(10, n))
            .unwrap()
    }

    fn all_algorithms() -> Vec<Algorithm> {
        ["SGA", "UMDA", "ECGA", "HBOA"]
            .iter()
            .map(|n| Algorithm::by_name(n).unwrap())
            .collect()
    }

    fn small(algorithm: Algorithm) -> Algorithm {
        match algorithm {
            Algorithm::Ecga(p) => Algorithm::Ecga(EcgaParams {
                tournament_size: 2,
                ..p
            }),
            other => other,
        }
    }

    #[test]
    fn single_bit_problem_is_solved() {
        for alg in all_algorithms() {
            let alg = small(alg);
            let r = run(&alg, &onemax(1), 2, &StopConfig::default(), 3, 0).unwrap();
            assert_eq!(r.stop_reason, StopReason::OptimumFound, "{alg}");
            assert!(r.rows.len() <= 20, "{alg}: {} generations", r.rows.len());
        }
    }

    #[test]
    fn call_budget_of_one_population() {
        let stop = StopConfig {
            max_fitness_calls: Some(20),
            stop_on_optimum: false,
            ..StopConfig::default()
        };
        for alg in all_algorithms() {
            let r = run(&alg, &onemax(30), 20, &stop, 1, 0).unwrap();
            assert_eq!(r.stop_reason, StopReason::MaxFitnessCalls);
            assert_eq!(r.rows.len(), 1);
            assert_eq!(r.total_fitness_calls, 20);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        for alg in all_algorithms() {
            let stop = StopConfig {
                max_generations: Some(5),
                ..StopConfig::default()
            };
            let a = run(&alg, &onemax(40), 30, &stop, 99, 2).unwrap();
            let b = run(&alg, &onemax(40), 30, &stop, 99, 2).unwrap();
            assert_eq!(a.rows, b.rows);
            assert_eq!(a.best_genome, b.best_genome);
            assert_eq!(a.final_model, b.final_model);
        }
    }

    #[test]
    fn configuration_errors_surface_before_running() {
        let bad = Algorithm::Sga(SgaParams {
            tournament_size: 0,
            ..SgaParams::default()
        });
        assert!(matches!(
            run(&bad, &onemax(4), 10, &StopConfig::default(), 0, 0),
            Err(Error::Config(_))
        ));
        assert!(run(&bad, &onemax(4), 0, &StopConfig::default(), 0, 0).is_err());
    }

    #[test]
    fn run_many_keeps_run_order() {
        let alg = Algorithm::by_name("umda").unwrap();
        let stop = StopConfig {
            max_generations: Some(3),
            ..StopConfig::default()
        };
        let records = run_many(&alg, &onemax(20), 20, &stop, 5, 4).unwrap();
        let indices: Vec<u64> = records.iter().map(|r| r.header.run_index).collect();
        assert_eq!(indices, vec![0, 1, 2, 3]);
        let again = run(&alg, &onemax(20), 20, &stop, 5, 2).unwrap();
        assert_eq!(records[2].rows, again.rows);
    }

    #[test]
    fn snapshot_display() {
        let p = ModelSnapshot::Partition(vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(p.to_string(), "[0,1,2][3,4,5]");
        let d = ModelSnapshot::Dependencies(vec![(1, 0), (2, 0)]);
        assert_eq!(d.to_string(), "{1->0,2->0}");
    }
}
