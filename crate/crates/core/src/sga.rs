//! Simple Genetic Algorithm: tournament selection, crossover, bit-flip
//! mutation and generational replacement with elitism.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::population::Population;
use crate::problems::Evaluator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossoverType {
    OnePoint,
    TwoPoint,
    Uniform,
}

impl fmt::Display for CrossoverType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossoverType::OnePoint => "onePoint",
            CrossoverType::TwoPoint => "twoPoint",
            CrossoverType::Uniform => "uniform",
        })
    }
}

impl FromStr for CrossoverType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onePoint" => Ok(CrossoverType::OnePoint),
            "twoPoint" => Ok(CrossoverType::TwoPoint),
            "uniform" => Ok(CrossoverType::Uniform),
            _ => Err(Error::config(format!(
                "unknown crossover type {s:?} (expected onePoint, twoPoint or uniform)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SgaParams {
    pub tournament_size: usize,
    pub crossover: CrossoverType,
    pub crossover_probability: f64,
    /// Per-allele flip probability; `None` means `1/n`.
    pub mutation_probability: Option<f64>,
    pub elitism: usize,
}

impl Default for SgaParams {
    fn default() -> Self {
        SgaParams {
            tournament_size: 2,
            crossover: CrossoverType::Uniform,
            crossover_probability: 0.9,
            mutation_probability: None,
            elitism: 1,
        }
    }
}

impl SgaParams {
    pub fn validate(&self, population_size: usize) -> Result<()> {
        if self.tournament_size == 0 || self.tournament_size > population_size {
            return Err(Error::config(format!(
                "sgaTournamentSize must lie in 1..={population_size}, got {}",
                self.tournament_size
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return Err(Error::config("sgaPc must lie in [0, 1]"));
        }
        if let Some(pm) = self.mutation_probability {
            if !(0.0..=1.0).contains(&pm) {
                return Err(Error::config("sgaPm must lie in [0, 1]"));
            }
        }
        if self.elitism > population_size {
            return Err(Error::config(format!(
                "sgaElitism ({}) must not exceed the population size ({population_size})",
                self.elitism
            )));
        }
        Ok(())
    }

    pub fn mutation_rate(&self, genome_len: usize) -> f64 {
        self.mutation_probability
            .unwrap_or(1.0 / genome_len as f64)
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("sgaTournamentSize".into(), self.tournament_size.to_string()),
            ("sgaCrossoverType".into(), self.crossover.to_string()),
            ("sgaPc".into(), self.crossover_probability.to_string()),
            (
                "sgaPm".into(),
                self.mutation_probability
                    .map_or("1/n".to_string(), |p| p.to_string()),
            ),
            ("sgaElitism".into(), self.elitism.to_string()),
        ]
    }
}

/// Swap the suffixes of `a` and `b` starting at position `cut`.
pub fn one_point_at(a: &Genome, b: &Genome, cut: usize) -> (Genome, Genome) {
    swap_range(a, b, cut, a.len())
}

fn swap_range(a: &Genome, b: &Genome, from: usize, to: usize) -> (Genome, Genome) {
    let pick = |i: usize, first: bool| {
        let swapped = (from..to).contains(&i);
        if swapped == first {
            b.bit(i)
        } else {
            a.bit(i)
        }
    };
    (
        Genome::from_bools((0..a.len()).map(|i| pick(i, true))),
        Genome::from_bools((0..a.len()).map(|i| pick(i, false))),
    )
}

/// Recombine two parents. With probability `1 - pc` the offspring are
/// plain copies. Offspring are always returned unevaluated.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    kind: CrossoverType,
    pc: f64,
    rng: &mut R,
) -> (Genome, Genome) {
    assert_eq!(a.len(), b.len(), "crossover parents differ in length");
    let n = a.len();
    if !rng.random_bool(pc) {
        return swap_range(a, b, 0, 0);
    }
    match kind {
        CrossoverType::OnePoint if n >= 2 => one_point_at(a, b, rng.random_range(1..n)),
        CrossoverType::TwoPoint if n >= 3 => {
            let cuts = rand::seq::index::sample(rng, n - 1, 2);
            let (x, y) = (cuts.index(0) + 1, cuts.index(1) + 1);
            swap_range(a, b, x.min(y), x.max(y))
        }
        CrossoverType::TwoPoint if n == 2 => one_point_at(a, b, 1),
        CrossoverType::Uniform => {
            let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            (
                Genome::from_bools((0..n).map(|i| if mask[i] { b.bit(i) } else { a.bit(i) })),
                Genome::from_bools((0..n).map(|i| if mask[i] { a.bit(i) } else { b.bit(i) })),
            )
        }
        // a single position has no cut point
        _ => swap_range(a, b, 0, 0),
    }
}

/// Flip each allele independently with probability `pm`.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, pm: f64, rng: &mut R) -> Genome {
    let mut out = genome.clone();
    for i in 0..out.len() {
        if rng.random_bool(pm) {
            out.flip(i);
        }
    }
    out
}

/// Winner among `s` distinct members drawn uniformly; ties go to the lowest
/// index.
fn tournament_winner<R: Rng + ?Sized>(fitness: &[f64], s: usize, rng: &mut R) -> usize {
    rand::seq::index::sample(rng, fitness.len(), s)
        .into_iter()
        .reduce(|best, c| {
            if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
                c
            } else {
                best
            }
        })
        .expect("tournament size is at least 1")
}

/// One generation: `elitism` best members survive unchanged, the remaining
/// slots are filled pairwise by selection, crossover and mutation.
pub fn sga_generation<R: Rng + ?Sized>(
    population: &Population,
    params: &SgaParams,
    evaluator: &mut Evaluator,
    rng: &mut R,
) -> Result<Population> {
    let size = population.len();
    let fitness = population.fitnesses()?;
    let pm = params.mutation_rate(population.genome_len());

    let mut next: Vec<Genome> = population.ranked_indices()?[..params.elitism]
        .iter()
        .map(|&i| population[i].clone())
        .collect();

    while next.len() < size {
        let p1 = tournament_winner(&fitness, params.tournament_size, rng);
        let p2 = tournament_winner(&fitness, params.tournament_size, rng);
        let (c1, c2) = crossover(
            &population[p1],
            &population[p2],
            params.crossover,
            params.crossover_probability,
            rng,
        );
        let mut c1 = mutate(&c1, pm, rng);
        let mut c2 = mutate(&c2, pm, rng);
        evaluator.evaluate(&mut c1, rng);
        next.push(c1);
        if next.len() < size {
            evaluator.evaluate(&mut c2, rng);
            next.push(c2);
        }
    }
    Population::from_members(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{ProblemRegistry, ProblemSpec};
    use crate::RandomStream;

    fn g(s: &str) -> Genome {
        s.parse().unwrap()
    }

    #[test]
    fn one_point_example() {
        let (x, y) = one_point_at(&g("111111"), &g("000000"), 3);
        assert_eq!(x.to_string(), "111000");
        assert_eq!(y.to_string(), "000111");
    }

    #[test]
    fn no_crossover_copies_parents() {
        let mut rng = RandomStream::new(3);
        for kind in [CrossoverType::OnePoint, CrossoverType::TwoPoint, CrossoverType::Uniform] {
            let (x, y) = crossover(&g("110010"), &g("001101"), kind, 0.0, &mut rng);
            assert_eq!((x.to_string(), y.to_string()), ("110010".into(), "001101".into()));
        }
    }

    #[test]
    fn self_crossover_is_identity() {
        let mut rng = RandomStream::new(3);
        let x = g("1011001");
        let (a, b) = crossover(&x, &x, CrossoverType::Uniform, 1.0, &mut rng);
        assert!(a.same_alleles(&x) && b.same_alleles(&x));
    }

    #[test]
    fn two_point_swaps_a_middle_segment() {
        let mut rng = RandomStream::new(8);
        for _ in 0..50 {
            let (x, _) = crossover(&g("11111111"), &g("00000000"), CrossoverType::TwoPoint, 1.0, &mut rng);
            let s = x.to_string();
            // 1...1 0...0 1...1 with a nonempty zero run not touching the start
            assert!(s.starts_with('1'), "{s}");
            let zeros: Vec<usize> = s.match_indices('0').map(|(i, _)| i).collect();
            assert!(!zeros.is_empty());
            assert_eq!(zeros.last().unwrap() - zeros[0] + 1, zeros.len(), "{s}");
        }
    }

    #[test]
    fn mutation_extremes() {
        let mut rng = RandomStream::new(4);
        let x = g("1100101");
        assert!(mutate(&x, 0.0, &mut rng).same_alleles(&x));
        assert!(mutate(&x, 1.0, &mut rng).same_alleles(&x.complement()));
    }

    #[test]
    fn mutation_rate_half() {
        // Binomial(10^4, 1/2): sd = 50, so +-200 is a 4 sd band.
        let mut rng = RandomStream::new(5);
        let x = Genome::zeros(10_000);
        let flipped = mutate(&x, 0.5, &mut rng).count_ones();
        assert!((4800..=5200).contains(&flipped), "{flipped}");
    }

    fn onemax(n: usize) -> Evaluator {
        Evaluator::new(
            ProblemRegistry::default()
                .build(&ProblemSpec::new(10, n))
                .unwrap(),
        )
    }

    #[test]
    fn full_elitism_makes_no_evaluations() {
        let mut rng = RandomStream::new(1);
        let mut ev = onemax(6);
        let mut p = Population::random(2, 6, &mut rng).unwrap();
        ev.evaluate_all(p.members_mut(), &mut rng);
        let calls = ev.fitness_calls();
        let params = SgaParams {
            elitism: 2,
            ..SgaParams::default()
        };
        let next = sga_generation(&p, &params, &mut ev, &mut rng).unwrap();
        assert_eq!(ev.fitness_calls(), calls);
        let ranked = p.ranked_indices().unwrap();
        assert_eq!(next.len(), 2);
        assert!(next[0].same_alleles(&p[ranked[0]]));
        assert!(next[1].same_alleles(&p[ranked[1]]));
    }

    #[test]
    fn partial_elitism_keeps_the_best() {
        let mut rng = RandomStream::new(1);
        let mut ev = onemax(6);
        let mut p = Population::random(3, 6, &mut rng).unwrap();
        ev.evaluate_all(p.members_mut(), &mut rng);
        let calls = ev.fitness_calls();
        let params = SgaParams {
            elitism: 2,
            ..SgaParams::default()
        };
        let next = sga_generation(&p, &params, &mut ev, &mut rng).unwrap();
        assert_eq!(next.len(), 3);
        assert_eq!(ev.fitness_calls(), calls + 1);
        let ranked = p.ranked_indices().unwrap();
        assert!(next[0].same_alleles(&p[ranked[0]]));
        assert!(next[1].same_alleles(&p[ranked[1]]));
    }

    #[test]
    fn forced_operators_copy_the_best() {
        let mut rng = RandomStream::new(9);
        let mut ev = onemax(12);
        let mut p = Population::random(10, 12, &mut rng).unwrap();
        ev.evaluate_all(p.members_mut(), &mut rng);
        let best = p[p.stats().unwrap().best_index].clone();
        let params = SgaParams {
            tournament_size: 10,
            crossover_probability: 0.0,
            mutation_probability: Some(0.0),
            ..SgaParams::default()
        };
        let next = sga_generation(&p, &params, &mut ev, &mut rng).unwrap();
        assert!(next.iter().all(|g| g.same_alleles(&best)));
    }

    #[test]
    fn odd_offspring_count_evaluates_exactly() {
        let mut rng = RandomStream::new(2);
        let mut ev = onemax(8);
        let mut p = Population::random(6, 8, &mut rng).unwrap();
        ev.evaluate_all(p.members_mut(), &mut rng);
        let before = ev.fitness_calls();
        let next = sga_generation(&p, &SgaParams::default(), &mut ev, &mut rng).unwrap();
        assert_eq!(next.len(), 6);
        assert_eq!(ev.fitness_calls() - before, 5);
    }

    #[test]
    fn params_validation() {
        assert!(SgaParams::default().validate(10).is_ok());
        let p = SgaParams {
            elitism: 11,
            ..SgaParams::default()
        };
        assert!(p.validate(10).is_err());
        let p = SgaParams {
            tournament_size: 11,
            ..SgaParams::default()
        };
        assert!(p.validate(10).is_err());
    }
}
