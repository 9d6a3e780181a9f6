use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::population::Population;

/// How a selected set is drawn from the population.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selection {
    Tournament { size: usize, with_replacement: bool },
    Truncation { tau: f64 },
}

impl Selection {
    pub fn validate(&self, population_size: usize) -> Result<()> {
        match *self {
            Selection::Tournament {
                size,
                with_replacement,
            } => {
                if size == 0 {
                    return Err(Error::config("tournament size must be at least 1"));
                }
                if !with_replacement && size > population_size {
                    return Err(Error::config(format!(
                        "tournament size {size} exceeds population size {population_size} \
                         (tournaments without replacement)"
                    )));
                }
                Ok(())
            }
            Selection::Truncation { tau } => {
                if tau > 0.0 && tau <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::config(format!(
                        "truncation fraction must lie in (0, 1], got {tau}"
                    )))
                }
            }
        }
    }

    /// Draw a selected set of `size` members (truncation ignores `size` and
    /// keeps its own fraction).
    pub fn select<R: Rng + ?Sized>(
        &self,
        population: &Population,
        size: usize,
        rng: &mut R,
    ) -> Result<Population> {
        match *self {
            Selection::Tournament {
                size: s,
                with_replacement,
            } => tournament_select(population, s, size, with_replacement, rng),
            Selection::Truncation { tau } => truncation_select(population, tau),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Tournament {
                size,
                with_replacement: true,
            } => write!(f, "tournament(s={size}, with replacement)"),
            Selection::Tournament { size, .. } => {
                write!(f, "tournament(s={size}, without replacement)")
            }
            Selection::Truncation { tau } => write!(f, "truncation(tau={tau})"),
        }
    }
}

fn winner(fitness: &[f64], contestants: &[usize]) -> usize {
    let mut best = contestants[0];
    for &c in &contestants[1..] {
        if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// `out_size` winners of `s`-way tournaments.
///
/// With replacement, each tournament draws `s` members independently.
/// Without replacement, the population is shuffled and cut into groups of
/// `s`, one winner per group, repeating passes until enough winners exist;
/// every member then enters the same number of tournaments per pass.
/// Ties go to the lowest population index.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &Population,
    s: usize,
    out_size: usize,
    with_replacement: bool,
    rng: &mut R,
) -> Result<Population> {
    Selection::Tournament {
        size: s,
        with_replacement,
    }
    .validate(population.len())?;
    if out_size == 0 {
        return Err(Error::config("selected set size must be at least 1"));
    }
    let fitness = population.fitnesses()?;
    let n = population.len();
    let mut winners = Vec::with_capacity(out_size);
    if with_replacement {
        let mut contestants = vec![0; s];
        while winners.len() < out_size {
            for c in contestants.iter_mut() {
                *c = rng.random_range(0..n);
            }
            winners.push(winner(&fitness, &contestants));
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        'passes: loop {
            order.shuffle(rng);
            for group in order.chunks_exact(s) {
                winners.push(winner(&fitness, group));
                if winners.len() == out_size {
                    break 'passes;
                }
            }
        }
    }
    Population::from_members(winners.into_iter().map(|i| population[i].clone()).collect())
}

/// Number of members kept by truncation with fraction `tau` out of `n`.
pub fn truncation_count(tau: f64, n: usize) -> usize {
    // The small offset keeps products like 0.1 * 30 = 3.0000000000000004
    // from rounding up to the next integer.
    (((tau * n as f64) - 1e-9).ceil() as usize).clamp(1, n)
}

/// The `ceil(tau * N)` best members, best first; ties at the cutoff go to
/// the lowest index.
pub fn truncation_select(population: &Population, tau: f64) -> Result<Population> {
    Selection::Truncation { tau }.validate(population.len())?;
    let keep = truncation_count(tau, population.len());
    let ranked = population.ranked_indices()?;
    Population::from_members(
        ranked[..keep]
            .iter()
            .map(|&i| population[i].clone())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Genome, RandomStream};

    /// Member i carries i as a 16-bit label so winners can be traced back.
    fn labelled(fitness: &[f64]) -> Population {
        let members = fitness
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let mut g = Genome::from_bools((0..16).rev().map(|b| (i >> b) & 1 == 1));
                g.set_fitness(f);
                g
            })
            .collect();
        Population::from_members(members).unwrap()
    }

    fn label(g: &Genome) -> usize {
        g.pattern(&(0..16).collect::<Vec<_>>())
    }

    #[test]
    fn full_tournament_picks_best() {
        let p = labelled(&[1.0, 9.0, 3.0]);
        let mut rng = RandomStream::new(5);
        let sel = tournament_select(&p, 3, 1, false, &mut rng).unwrap();
        assert_eq!(label(&sel[0]), 1);
    }

    #[test]
    fn tournament_tie_goes_to_lowest_index() {
        let p = labelled(&[5.0, 5.0]);
        let mut rng = RandomStream::new(5);
        for _ in 0..20 {
            let sel = tournament_select(&p, 2, 1, false, &mut rng).unwrap();
            assert_eq!(label(&sel[0]), 0);
        }
    }

    #[test]
    fn unit_tournament_is_uniform() {
        // Each frequency has sd sqrt(2/9 / 10000) ~ 0.0047, so 0.02 is > 4 sd.
        let p = labelled(&[1.0, 2.0, 3.0]);
        let mut rng = RandomStream::new(99);
        let sel = tournament_select(&p, 1, 10_000, true, &mut rng).unwrap();
        let mut counts = [0usize; 3];
        for g in &sel {
            counts[label(g)] += 1;
        }
        for c in counts {
            let freq = c as f64 / 10_000.0;
            assert!((freq - 1.0 / 3.0).abs() <= 0.02, "{counts:?}");
        }
    }

    #[test]
    fn oversized_tournament_without_replacement_rejected() {
        let p = labelled(&[1.0, 2.0]);
        let mut rng = RandomStream::new(1);
        assert!(matches!(
            tournament_select(&p, 3, 2, false, &mut rng),
            Err(Error::Config(_))
        ));
        assert!(tournament_select(&p, 3, 2, true, &mut rng).is_ok());
    }

    #[test]
    fn without_replacement_fills_requested_size() {
        let p = labelled(&(0..10).map(|i| i as f64).collect::<Vec<_>>());
        let mut rng = RandomStream::new(2);
        let sel = tournament_select(&p, 4, 10, false, &mut rng).unwrap();
        assert_eq!(sel.len(), 10);
        // The worst three can never win a 4-way tournament over distinct members.
        assert!(sel.iter().all(|g| label(g) >= 3));
    }

    #[test]
    fn truncation_examples() {
        let p = labelled(&[4.0, 1.0, 3.0, 2.0]);
        let sel = truncation_select(&p, 0.5).unwrap();
        let labels: Vec<usize> = sel.iter().map(label).collect();
        assert_eq!(labels, vec![0, 2]);

        let sel = truncation_select(&p, 1.0).unwrap();
        assert_eq!(sel.len(), 4);

        let p = labelled(&[2.0, 2.0, 2.0]);
        let sel = truncation_select(&p, 0.34).unwrap();
        let labels: Vec<usize> = sel.iter().map(label).collect();
        assert_eq!(labels, vec![0, 1]);
    }

    #[test]
    fn truncation_count_rounding() {
        assert_eq!(truncation_count(0.1, 30), 3);
        assert_eq!(truncation_count(0.34, 3), 2);
        assert_eq!(truncation_count(0.001, 3), 1);
        assert!(truncation_select(&labelled(&[1.0]), 0.0).is_err());
        assert!(truncation_select(&labelled(&[1.0]), 1.5).is_err());
    }
}
