use std::ops::Index;

use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::Genome;

/// A constant-size collection of equal-length genomes.
///
/// Also used for selected sets, whose size may differ from the population
/// size of the run that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    members: Vec<Genome>,
    genome_len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationStats {
    pub average_fitness: f64,
    pub best_fitness: f64,
    /// Smallest index attaining `best_fitness`.
    pub best_index: usize,
}

impl Population {
    /// `size` genomes of length `genome_len` with uniform random alleles.
    pub fn random<R: Rng + ?Sized>(size: usize, genome_len: usize, rng: &mut R) -> Result<Self> {
        if size == 0 {
            return Err(Error::config("population size must be at least 1"));
        }
        if genome_len == 0 {
            return Err(Error::config("string size must be at least 1"));
        }
        let members = (0..size).map(|_| Genome::random(genome_len, rng)).collect();
        Ok(Population {
            members,
            genome_len,
        })
    }

    pub fn from_members(members: Vec<Genome>) -> Result<Self> {
        let genome_len = match members.first() {
            Some(g) => g.len(),
            None => return Err(Error::state("a population needs at least one member")),
        };
        if let Some(bad) = members.iter().position(|g| g.len() != genome_len) {
            return Err(Error::state(format!(
                "member {bad} has length {} but member 0 has length {genome_len}",
                members[bad].len()
            )));
        }
        Ok(Population {
            members,
            genome_len,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn genome_len(&self) -> usize {
        self.genome_len
    }

    pub fn members(&self) -> &[Genome] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [Genome] {
        &mut self.members
    }

    pub fn into_members(self) -> Vec<Genome> {
        self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Genome> {
        self.members.iter()
    }

    /// Swap in `genome` at `index`, returning the previous occupant.
    pub fn replace(&mut self, index: usize, genome: Genome) -> Genome {
        assert_eq!(genome.len(), self.genome_len, "replacement genome length");
        std::mem::replace(&mut self.members[index], genome)
    }

    pub fn is_evaluated(&self) -> bool {
        self.members.iter().all(Genome::is_evaluated)
    }

    /// Fitness of every member; fails if any member is unevaluated.
    pub fn fitnesses(&self) -> Result<Vec<f64>> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, g)| {
                g.fitness()
                    .ok_or_else(|| Error::state(format!("member {i} has not been evaluated")))
            })
            .collect()
    }

    /// Mean and best fitness; ties on the best go to the lowest index.
    pub fn stats(&self) -> Result<PopulationStats> {
        let fit = self.fitnesses()?;
        let mut best_index = 0;
        for (i, &f) in fit.iter().enumerate() {
            if f > fit[best_index] {
                best_index = i;
            }
        }
        Ok(PopulationStats {
            average_fitness: fit.iter().sum::<f64>() / fit.len() as f64,
            best_fitness: fit[best_index],
            best_index,
        })
    }

    /// Frequency of allele 1 at each position.
    pub fn one_frequencies(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.genome_len];
        for g in &self.members {
            for (c, b) in counts.iter_mut().zip(g.iter()) {
                *c += b as usize;
            }
        }
        let n = self.members.len() as f64;
        counts.into_iter().map(|c| c as f64 / n).collect()
    }

    /// Indices sorted best-first; equal fitness keeps the lower index first.
    pub(crate) fn ranked_indices(&self) -> Result<Vec<usize>> {
        let fit = self.fitnesses()?;
        let mut idx: Vec<usize> = (0..fit.len()).collect();
        idx.sort_by(|&a, &b| fit[b].total_cmp(&fit[a]).then(a.cmp(&b)));
        Ok(idx)
    }
}

impl Index<usize> for Population {
    type Output = Genome;

    fn index(&self, i: usize) -> &Genome {
        &self.members[i]
    }
}

impl<'a> IntoIterator for &'a Population {
    type Item = &'a Genome;
    type IntoIter = std::slice::Iter<'a, Genome>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomStream;

    fn with_fitness(values: &[f64]) -> Population {
        let members = values
            .iter()
            .map(|&f| {
                let mut g = Genome::zeros(2);
                g.set_fitness(f);
                g
            })
            .collect();
        Population::from_members(members).unwrap()
    }

    #[test]
    fn random_population_shape() {
        let mut rng = RandomStream::new(7);
        let p = Population::random(3, 4, &mut rng).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|g| g.len() == 4 && !g.is_evaluated()));

        let p = Population::random(1, 1, &mut rng).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].len(), 1);
    }

    #[test]
    fn random_population_rejects_zero_sizes() {
        let mut rng = RandomStream::new(7);
        assert!(matches!(Population::random(0, 4, &mut rng), Err(Error::Config(_))));
        assert!(matches!(Population::random(4, 0, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn random_population_is_unbiased() {
        // N = 10000: the binomial sd of a frequency is 0.005, so [0.45, 0.55]
        // is a 10-sigma band.
        let mut rng = RandomStream::new(2024);
        let p = Population::random(10_000, 8, &mut rng).unwrap();
        for f in p.one_frequencies() {
            assert!((0.45..=0.55).contains(&f), "frequency {f}");
        }
    }

    #[test]
    fn stats_examples() {
        let s = with_fitness(&[1.0, 3.0, 2.0]).stats().unwrap();
        assert_eq!((s.average_fitness, s.best_fitness, s.best_index), (2.0, 3.0, 1));
        let s = with_fitness(&[5.0]).stats().unwrap();
        assert_eq!((s.average_fitness, s.best_fitness, s.best_index), (5.0, 5.0, 0));
        assert_eq!(with_fitness(&[2.0, 2.0]).stats().unwrap().best_index, 0);
    }

    #[test]
    fn stats_requires_evaluation() {
        let p = Population::from_members(vec![Genome::zeros(2)]).unwrap();
        assert!(matches!(p.stats(), Err(Error::State(_))));
    }

    #[test]
    fn mixed_lengths_rejected() {
        assert!(Population::from_members(vec![Genome::zeros(2), Genome::zeros(3)]).is_err());
        assert!(Population::from_members(vec![]).is_err());
    }
}
