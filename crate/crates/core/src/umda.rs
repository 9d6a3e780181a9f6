//! Univariate Marginal Distribution Algorithm.
//!
//! Each generation estimates the frequency of allele 1 at every position
//! from the selected set and samples a fresh population from that product
//! of independent Bernoulli distributions.

use std::ops::Index;

use rand::Rng;

use crate::engine::Selection;
use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::population::Population;
use crate::problems::Evaluator;

#[derive(Clone, Debug, PartialEq)]
pub struct UmdaParams {
    pub selection: Selection,
    /// Keep every marginal inside `[1/n, 1 - 1/n]`.
    pub clamp_margins: bool,
    pub elitism: usize,
}

impl Default for UmdaParams {
    fn default() -> Self {
        UmdaParams {
            selection: Selection::Truncation { tau: 0.5 },
            clamp_margins: false,
            elitism: 1,
        }
    }
}

impl UmdaParams {
    pub fn validate(&self, population_size: usize) -> Result<()> {
        self.selection.validate(population_size)?;
        if self.elitism >= population_size {
            return Err(Error::config(format!(
                "umdaElitism ({}) must be smaller than the population size ({population_size})",
                self.elitism
            )));
        }
        Ok(())
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("umdaSelection".into(), self.selection.to_string()),
            ("umdaClampMargins".into(), self.clamp_margins.to_string()),
            ("umdaElitism".into(), self.elitism.to_string()),
        ]
    }
}

/// Per-position probability of allele 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalVector(Vec<f64>);

impl MarginalVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(bad) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::state(format!("marginal {bad} outside [0, 1]")));
        }
        Ok(MarginalVector(p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Clamp every marginal to `[1/n, 1 - 1/n]`.
    pub fn clamped(mut self) -> Self {
        let lo = 1.0 / self.0.len() as f64;
        let hi = 1.0 - lo;
        if lo <= hi {
            for p in &mut self.0 {
                *p = p.clamp(lo, hi);
            }
        }
        self
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }
}

impl Index<usize> for MarginalVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Fraction of ones at every position of the selected set.
pub fn build_marginals(selected: &Population) -> Result<MarginalVector> {
    if selected.is_empty() {
        return Err(Error::state("cannot build marginals from an empty set"));
    }
    MarginalVector::new(selected.one_frequencies())
}

/// `size` genomes: copies of `elites` first, the rest sampled position by
/// position from `marginals`. New genomes are left unevaluated.
pub fn sample_population<R: Rng + ?Sized>(
    marginals: &MarginalVector,
    size: usize,
    elites: &[Genome],
    rng: &mut R,
) -> Result<Population> {
    if size == 0 {
        return Err(Error::config("population size must be at least 1"));
    }
    let mut members: Vec<Genome> = elites.iter().take(size).cloned().collect();
    while members.len() < size {
        members.push(Genome::from_bools(
            marginals.as_slice().iter().map(|&p| rng.random_bool(p)),
        ));
    }
    Population::from_members(members)
}

/// Elite copies of the `count` best members, best first.
pub(crate) fn elites(population: &Population, count: usize) -> Result<Vec<Genome>> {
    Ok(population.ranked_indices()?[..count.min(population.len())]
        .iter()
        .map(|&i| population[i].clone())
        .collect())
}

pub fn umda_generation<R: Rng + ?Sized>(
    population: &Population,
    params: &UmdaParams,
    evaluator: &mut Evaluator,
    rng: &mut R,
) -> Result<(Population, MarginalVector)> {
    let selected = params.selection.select(population, population.len(), rng)?;
    let mut marginals = build_marginals(&selected)?;
    if params.clamp_margins {
        marginals = marginals.clamped();
    }
    let elite = elites(population, params.elitism)?;
    let mut next = sample_population(&marginals, population.len(), &elite, rng)?;
    evaluator.evaluate_all(next.members_mut(), rng);
    Ok((next, marginals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RandomStream;

    fn pop(strings: &[&str]) -> Population {
        Population::from_members(strings.iter().map(|s| s.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(build_marginals(&pop(&["11", "10"])).unwrap().as_slice(), &[1.0, 0.5]);
        assert_eq!(
            build_marginals(&pop(&["101", "101", "101"])).unwrap().as_slice(),
            &[1.0, 0.0, 1.0]
        );
        let mut strings = vec!["1"; 37];
        strings.extend(vec!["0"; 63]);
        assert_eq!(build_marginals(&pop(&strings)).unwrap()[0], 0.37);
    }

    #[test]
    fn degenerate_marginals_sample_one_string() {
        let m = MarginalVector::new(vec![1.0, 0.0]).unwrap();
        let p = sample_population(&m, 50, &[], &mut RandomStream::new(1)).unwrap();
        assert!(p.iter().all(|g| g.to_string() == "10"));
    }

    #[test]
    fn half_marginals_sample_fairly() {
        let n = 16;
        let size = 20_000;
        let m = MarginalVector::new(vec![0.5; n]).unwrap();
        let p = sample_population(&m, size, &[], &mut RandomStream::new(2)).unwrap();
        let tol = 4.0 * (0.25 / size as f64).sqrt();
        for f in p.one_frequencies() {
            assert!((f - 0.5).abs() <= tol, "{f}");
        }
    }

    #[test]
    fn elite_is_kept() {
        let m = MarginalVector::new(vec![0.0; 6]).unwrap();
        let elite: Genome = "111111".parse().unwrap();
        let p = sample_population(&m, 10, std::slice::from_ref(&elite), &mut RandomStream::new(3))
            .unwrap();
        assert_eq!(p.iter().filter(|g| g.same_alleles(&elite)).count(), 1);
    }

    #[test]
    fn clamping() {
        let m = MarginalVector::new(vec![0.0, 1.0, 0.5, 0.1]).unwrap().clamped();
        assert_eq!(m.as_slice(), &[0.25, 0.75, 0.5, 0.25]);
        assert!(MarginalVector::new(vec![1.5]).is_err());
    }
}
