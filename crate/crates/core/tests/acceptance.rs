//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestCaseError, TestRunner};
use rayon::prelude::*;

use ea_core::ecga::{combined_complexity, greedy_mpm_search, EcgaParams, MarginalProductModel};
use ea_core::engine::{run, run_many, Algorithm, ModelSnapshot, Runner, StopConfig};
use ea_core::hboa::{build_forest, leaf_score, rtr_replace, HboaParams};
use ea_core::problems::{
    brute_force_optimum, validate_length, Evaluator, ProblemInstance, ProblemRegistry, ProblemSpec, MENU_CODES,
};
use ea_core::report::{render_run, TIMESTAMP_PREFIX};
use ea_core::sga::SgaParams;
use ea_core::umda::UmdaParams;
use ea_core::{Genome, Population, RandomStream};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn build(code: u32, n: usize) -> ProblemInstance {
    ProblemRegistry::default()
        .build(&ProblemSpec::new(code, n))
        .unwrap()
}

fn stop_after(generations: u64) -> StopConfig {
    StopConfig {
        max_generations: Some(generations),
        ..StopConfig::default()
    }
}

fn all_strings(n: usize) -> impl Iterator<Item = Genome> {
    (0u64..1 << n).map(move |x| Genome::from_bools((0..n).map(|i| x >> (n - 1 - i) & 1 == 1)))
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for code in MENU_CODES {
        for n in 1..=15 {
            let spec = ProblemSpec::new(code, n);
            if validate_length(&spec).is_err() {
                continue;
            }
            let problem = build(code, n);
            let (value, genome) = brute_force_optimum(&problem).unwrap();
            let target = if code < 10 { Genome::zeros(n) } else { Genome::ones(n) };
            let optimum = problem.optimum_value().unwrap();
            if (value - optimum).abs() > 1e-9 {
                failures.push(format!("code {code} n={n}: value {value} vs optimum {optimum}"));
            }
            if genome != target {
                // Bipolar blocks have two global optima; the oracle returns
                // the lexicographically smallest one, so the all-ones target
                // must attain the same value instead.
                let tied = (problem.base_fitness(&target) - value).abs() <= 1e-9;
                if code == 13 && tied {
                    notes.push(format!("n={n}"));
                } else {
                    failures.push(format!("code {code} n={n}: best genome {genome}"));
                }
            }
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    let mut detail = format!("{checked} (problem, n) pairs in {:.2}s", elapsed.as_secs_f64());
    if !notes.is_empty() {
        detail += &format!(
            "; code 13 returns the all-zeros co-optimum, all-ones ties it ({})",
            notes.join(", ")
        );
    }
    if !failures.is_empty() {
        detail += &format!("; failures: {}", failures.join("; "));
    }
    outcome(failures.is_empty() && elapsed < Duration::from_secs(30), detail)
}

fn zero_one_mirror() -> Outcome {
    let mut failures = Vec::new();
    let mut strings = 0;
    for code in 0..=6u32 {
        let n = (1..=24)
            .find(|&n| validate_length(&ProblemSpec::new(code, n)).is_ok())
            .unwrap();
        let (zero, one) = (build(code, n), build(code + 10, n));
        for x in all_strings(n) {
            strings += 1;
            if one.base_fitness(&x) != zero.base_fitness(&x.complement()) {
                failures.push(format!("code {code} n={n} x={x}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{strings} strings over codes 0-6, {} mismatches", failures.len()),
    )
}

fn ecga_hand_check() -> Outcome {
    let sel = Population::from_members(vec!["00".parse().unwrap(), "11".parse().unwrap()]).unwrap();
    let singletons = combined_complexity(&MarginalProductModel::singletons(&sel));
    let merged =
        combined_complexity(&MarginalProductModel::from_partition(vec![vec![0, 1]], &sel).unwrap());
    let search = greedy_mpm_search(&sel, 12);
    let passed =
        (singletons - 7.1699).abs() <= 1e-4 && (merged - 6.7549).abs() <= 1e-4 && search.merges == 1;
    outcome(
        passed,
        format!(
            "singletons {singletons:.4}, merged {merged:.4}, merges {}",
            search.merges
        ),
    )
}

fn hboa_hand_check() -> Outcome {
    let a = leaf_score(2, 2);
    let b = leaf_score(3, 0);
    let passed = (a - (1.0f64 / 30.0).ln()).abs() <= 1e-9 && (b - 0.25f64.ln()).abs() <= 1e-9;
    outcome(passed, format!("leaf_score(2,2) = {a:.12}, leaf_score(3,0) = {b:.12}"))
}

fn successes(
    algorithm: &Algorithm,
    problem: &ProblemInstance,
    population_size: usize,
    stop: &StopConfig,
    seed: u64,
    runs: u64,
) -> (usize, Vec<ea_core::report::RunRecord>) {
    let records = run_many(algorithm, problem, population_size, stop, seed, runs).unwrap();
    (records.iter().filter(|r| r.succeeded()).count(), records)
}

fn umda_onemax() -> Outcome {
    let started = Instant::now();
    let alg = Algorithm::Umda(UmdaParams::default());
    let (ok, _) = successes(&alg, &build(10, 50), 200, &stop_after(100), 101, 30);
    let elapsed = started.elapsed();
    outcome(
        ok >= 28 && elapsed < Duration::from_secs(10),
        format!("{ok}/30 solved in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn sga_onemax() -> Outcome {
    let alg = Algorithm::Sga(SgaParams::default());
    let (ok, _) = successes(&alg, &build(10, 30), 100, &stop_after(200), 202, 30);
    outcome(ok >= 27, format!("{ok}/30 solved"))
}

fn true_blocks(partition: &[Vec<usize>]) -> usize {
    (0..10)
        .filter(|b| partition.iter().any(|g| *g == vec![3 * b, 3 * b + 1, 3 * b + 2]))
        .count()
}

fn deception_contrast() -> Outcome {
    let problem = build(12, 30);
    let stop = StopConfig::default();
    let (umda_ok, _) = successes(
        &Algorithm::Umda(UmdaParams::default()),
        &problem,
        500,
        &stop,
        303,
        20,
    );
    let (ecga_ok, records) = successes(
        &Algorithm::Ecga(EcgaParams::default()),
        &problem,
        500,
        &stop,
        303,
        20,
    );
    let mut blocks: Vec<usize> = records
        .iter()
        .filter(|r| r.succeeded())
        .filter_map(|r| match &r.final_model {
            Some(ModelSnapshot::Partition(p)) => Some(true_blocks(p)),
            _ => None,
        })
        .collect();
    blocks.sort_unstable();
    // lower median for an even count
    let median = blocks.get(blocks.len().saturating_sub(1) / 2).copied().unwrap_or(0);
    outcome(
        umda_ok <= 2 && ecga_ok >= 16 && median >= 7,
        format!("UMDA {umda_ok}/20, ECGA {ecga_ok}/20, median true blocks {median}/10"),
    )
}

fn hboa_hierarchical() -> Outcome {
    let started = Instant::now();
    let problem = build(21, 27);
    let alg = Algorithm::Hboa(HboaParams::default());
    let stop = StopConfig {
        max_fitness_calls: Some(1_000_000),
        ..StopConfig::default()
    };
    let results: Vec<Option<usize>> = (0..10u64)
        .into_par_iter()
        .map(|restart| {
            [500, 1000, 2000, 4000]
                .iter()
                .enumerate()
                .find(|(attempt, &size)| {
                    run(&alg, &problem, size, &stop, 404 + restart, *attempt as u64)
                        .unwrap()
                        .succeeded()
                })
                .map(|(_, &size)| size)
        })
        .collect();
    let ok = results.iter().flatten().count();
    let elapsed = started.elapsed();
    let sizes: Vec<String> = results
        .iter()
        .map(|r| r.map_or("-".into(), |s| s.to_string()))
        .collect();
    outcome(
        ok >= 7 && elapsed < Duration::from_secs(300),
        format!(
            "{ok}/10 restarts solved in {:.1}s (solving sizes: {})",
            elapsed.as_secs_f64(),
            sizes.join(" ")
        ),
    )
}

fn determinism() -> Outcome {
    let problem = build(12, 12);
    let stop = stop_after(15);
    let strip = |text: String| -> String {
        text.lines()
            .filter(|l| !l.starts_with(TIMESTAMP_PREFIX))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut mismatched = Vec::new();
    for name in ["SGA", "UMDA", "ECGA", "HBOA"] {
        let alg = Algorithm::by_name(name).unwrap();
        let alg = match alg {
            Algorithm::Ecga(p) => Algorithm::Ecga(EcgaParams { tournament_size: 4, ..p }),
            other => other,
        };
        let a = run(&alg, &problem, 60, &stop, 909, 3).unwrap();
        let b = run(&alg, &problem, 60, &stop, 909, 3).unwrap();
        if strip(render_run(&a)) != strip(render_run(&b)) {
            mismatched.push(name);
        }
    }
    outcome(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "run files identical for SGA, UMDA, ECGA, HBOA".to_string()
        } else {
            format!("differing run files: {}", mismatched.join(", "))
        },
    )
}

/// Problems with at most 12 bits, as (code, n) pairs valid for the code.
fn small_problems() -> Vec<(u32, usize)> {
    let mut v = Vec::new();
    for code in MENU_CODES {
        for n in 1..=12 {
            if validate_length(&ProblemSpec::new(code, n)).is_ok() {
                v.push((code, n));
            }
        }
    }
    v
}

fn is_partition(groups: &[Vec<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &i in groups.iter().flatten() {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    seen.into_iter().all(|s| s)
}

/// Independent Kahn check on an edge list.
fn acyclic(edges: &[(usize, usize)], n: usize) -> bool {
    let mut indegree = vec![0; n];
    for &(_, to) in edges {
        indegree[to] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut done = 0;
    while let Some(v) = ready.pop() {
        done += 1;
        for &(from, to) in edges {
            if from == v {
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    ready.push(to);
                }
            }
        }
    }
    done == n
}

fn check_case(
    (problem_index, alg_index, population_size, generations, seed): (usize, usize, usize, u64, u64),
    problems: &[(u32, usize)],
) -> Result<(), TestCaseError> {
    let (code, n) = problems[problem_index % problems.len()];
    let inner = build(code, n);
    let calls = Arc::new(AtomicU64::new(0));
    let counter = calls.clone();
    let mut registry = ProblemRegistry::default();
    registry
        .register(
            900,
            Arc::new(move |g: &Genome| {
                counter.fetch_add(1, Ordering::Relaxed);
                inner.base_fitness(g)
            }),
            None,
        )
        .unwrap();
    let problem = registry.build(&ProblemSpec::new(900, n)).unwrap();
    let algorithm = match alg_index {
        0 => Algorithm::Sga(SgaParams::default()),
        1 => Algorithm::Umda(UmdaParams::default()),
        2 => Algorithm::Ecga(EcgaParams {
            tournament_size: population_size.min(8),
            ..EcgaParams::default()
        }),
        _ => Algorithm::Hboa(HboaParams::default()),
    };
    let stop = StopConfig {
        stop_on_optimum: false,
        ..StopConfig::default()
    };
    let mut runner = Runner::new(&algorithm, &problem, population_size, &stop, seed, 0)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(runner.fitness_calls(), calls.load(Ordering::Relaxed));
    for _ in 0..generations {
        runner.step().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(runner.population().len(), population_size);
        prop_assert!(runner.population().iter().all(|g| g.len() == n));
        prop_assert_eq!(runner.fitness_calls(), calls.load(Ordering::Relaxed));
        match runner.model() {
            Some(ModelSnapshot::Partition(p)) => prop_assert!(is_partition(p, n), "bad MPM {:?}", p),
            Some(ModelSnapshot::Dependencies(e)) => prop_assert!(acyclic(e, n), "cycle in {:?}", e),
            None => {}
        }
    }

    // Model builders and RTR applied directly to the evolved population.
    let pop = runner.population().clone();
    let mpm = greedy_mpm_search(&pop, 1 + (seed as usize % 12));
    prop_assert!(is_partition(&mpm.model.partition(), n));
    prop_assert!(mpm.model.groups().iter().all(|g| g.positions().len() <= 1 + (seed as usize % 12)));
    let forest = build_forest(&pop, None);
    prop_assert!(acyclic(&forest.edges(), n));
    let mut rng = RandomStream::for_run(seed, 1);
    let mut rtr = pop.clone();
    let mut offspring = Genome::random(n, &mut rng);
    Evaluator::new(problem.clone()).evaluate(&mut offspring, &mut rng);
    let window = 1 + (seed as usize % population_size);
    rtr_replace(&mut rtr, offspring, window, &mut rng).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(rtr.len(), population_size);
    Ok(())
}

fn structural_invariants() -> Outcome {
    let problems = small_problems();
    let mut runner = TestRunner::new(PropConfig {
        cases: 10_000,
        failure_persistence: None,
        ..PropConfig::default()
    });
    let strategy = (0usize..1000, 0usize..4, 2usize..25, 1u64..5, any::<u64>());
    let started = Instant::now();
    match runner.run(&strategy, |case| check_case(case, &problems)) {
        Ok(()) => outcome(
            true,
            format!("10000 cases in {:.1}s", started.elapsed().as_secs_f64()),
        ),
        Err(e) => outcome(false, format!("{e}")),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("zero/one mirror", zero_one_mirror),
        ("ECGA complexity hand-check", ecga_hand_check),
        ("hBOA leaf-score hand-check", hboa_hand_check),
        ("UMDA on OneMax", umda_onemax),
        ("SGA on OneMax", sga_onemax),
        ("deception contrast", deception_contrast),
        ("hBOA on hierarchical trap", hboa_hierarchical),
        ("determinism", determinism),
        ("structural invariants", structural_invariants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let status = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!("criterion {:>2} {status}: {name}: {}", i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
