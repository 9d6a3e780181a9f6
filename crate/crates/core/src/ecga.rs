//! Extended Compact Genetic Algorithm.
//!
//! The model is a marginal product model (MPM): a partition of the gene
//! positions into independent groups, each with a joint frequency table
//! over the selected set. Partitions are scored by the combined
//! complexity
//!
//! ```text
//! MC  = log2(S + 1) * sum_g (2^|g| - 1)      model complexity
//! CPC = S * sum_g H(g)                        compressed population complexity
//! ```
//!
//! where `S` is the selected-set size and `H(g)` the base-2 entropy of the
//! group's empirical distribution. A greedy search starting from all
//! singletons merges the pair of groups with the largest decrease in
//! `MC + CPC` until no merge helps.

use std::fmt;

use rand::Rng;

use crate::engine::Selection;
use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::population::Population;
use crate::problems::Evaluator;
use crate::umda::elites;

/// Merges must improve the score by more than this to be accepted.
const MIN_GAIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct EcgaParams {
    pub tournament_size: usize,
    pub max_group_size: usize,
    pub elitism: usize,
}

impl Default for EcgaParams {
    fn default() -> Self {
        EcgaParams {
            tournament_size: 8,
            max_group_size: 12,
            elitism: 1,
        }
    }
}

impl EcgaParams {
    pub fn selection(&self) -> Selection {
        Selection::Tournament {
            size: self.tournament_size,
            with_replacement: false,
        }
    }

    pub fn validate(&self, population_size: usize) -> Result<()> {
        self.selection().validate(population_size)?;
        if !(1..=20).contains(&self.max_group_size) {
            return Err(Error::config(format!(
                "ecgaMaxGroupSize must lie in 1..=20, got {}",
                self.max_group_size
            )));
        }
        if self.elitism >= population_size {
            return Err(Error::config(format!(
                "ecgaElitism ({}) must be smaller than the population size ({population_size})",
                self.elitism
            )));
        }
        Ok(())
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("ecgaTournamentSize".into(), self.tournament_size.to_string()),
            ("ecgaMaxGroupSize".into(), self.max_group_size.to_string()),
            ("ecgaElitism".into(), self.elitism.to_string()),
        ]
    }
}

/// One group of an MPM: sorted gene positions plus the count of every
/// configuration among the selected set (position order = bit order, first
/// position most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    positions: Vec<usize>,
    counts: Vec<u32>,
}

impl Group {
    fn from_selected(positions: Vec<usize>, selected: &Population) -> Self {
        let mut counts = vec![0u32; 1 << positions.len()];
        for g in selected {
            counts[g.pattern(&positions)] += 1;
        }
        Group { positions, counts }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    fn complexity(&self, sample_size: usize) -> f64 {
        group_complexity(&self.counts, sample_size)
    }
}

/// `MC + CPC` contribution of a single group with configuration `counts`.
pub fn group_complexity(counts: &[u32], sample_size: usize) -> f64 {
    let s = sample_size as f64;
    let model = (s + 1.0).log2() * (counts.len() - 1) as f64;
    let entropy: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / s;
            -p * p.log2()
        })
        .sum();
    model + s * entropy
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginalProductModel {
    groups: Vec<Group>,
    sample_size: usize,
    genome_len: usize,
}

impl MarginalProductModel {
    /// Model with the given partition, counted over `selected`.
    pub fn from_partition(partition: Vec<Vec<usize>>, selected: &Population) -> Result<Self> {
        let n = selected.genome_len();
        let mut seen = vec![false; n];
        for &i in partition.iter().flatten() {
            if i >= n || seen[i] {
                return Err(Error::state(format!(
                    "position {i} is out of range or appears in two groups"
                )));
            }
            seen[i] = true;
        }
        if partition.iter().any(Vec::is_empty) || seen.contains(&false) {
            return Err(Error::state("groups must be nonempty and cover every position"));
        }
        let mut groups: Vec<Group> = partition
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                Group::from_selected(p, selected)
            })
            .collect();
        groups.sort_by_key(|g| g.positions[0]);
        Ok(MarginalProductModel {
            groups,
            sample_size: selected.len(),
            genome_len: n,
        })
    }

    pub fn singletons(selected: &Population) -> Self {
        Self::from_partition(
            (0..selected.genome_len()).map(|i| vec![i]).collect(),
            selected,
        )
        .expect("singletons form a partition")
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn partition(&self) -> Vec<Vec<usize>> {
        self.groups.iter().map(|g| g.positions.clone()).collect()
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    /// Groups pairwise disjoint, covering every position, counts summing
    /// to the sample size.
    pub fn is_valid_partition(&self) -> bool {
        let mut seen = vec![false; self.genome_len];
        for &i in self.groups.iter().flat_map(|g| &g.positions) {
            if i >= self.genome_len || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        !seen.contains(&false)
            && self.groups.iter().all(|g| {
                !g.positions.is_empty()
                    && g.counts.iter().map(|&c| c as usize).sum::<usize>() == self.sample_size
            })
    }
}

impl fmt::Display for MarginalProductModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            f.write_str("[")?;
            for (k, i) in g.positions.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{i}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// `MC + CPC` of the whole model.
pub fn combined_complexity(model: &MarginalProductModel) -> f64 {
    model
        .groups
        .iter()
        .map(|g| g.complexity(model.sample_size))
        .sum()
}

fn merged(a: &Group, b: &Group, selected: &Population) -> Group {
    let mut positions: Vec<usize> = a.positions.iter().chain(&b.positions).copied().collect();
    positions.sort_unstable();
    Group::from_selected(positions, selected)
}

/// Result of the greedy search: the final model plus the number of merges
/// it took.
#[derive(Clone, Debug)]
pub struct MpmSearch {
    pub model: MarginalProductModel,
    pub merges: usize,
}

/// Greedy MPM search from all singletons.
///
/// Each step applies the merge with the largest strict decrease of the
/// combined complexity, never creating a group larger than
/// `max_group_size`. Ties go to the pair with the smallest
/// `(min position of first group, min position of second group)`.
/// Merge gains are cached and only pairs touching the merged group are
/// recomputed.
pub fn greedy_mpm_search(selected: &Population, max_group_size: usize) -> MpmSearch {
    let s = selected.len();
    let mut model = MarginalProductModel::singletons(selected);
    let mut cost: Vec<f64> = model.groups.iter().map(|g| g.complexity(s)).collect();

    // gains[a][b] for a < b, None when the merge would exceed the cap.
    let pair_gain = |model: &MarginalProductModel, cost: &[f64], a: usize, b: usize| {
        let (ga, gb) = (&model.groups[a], &model.groups[b]);
        (ga.positions.len() + gb.positions.len() <= max_group_size).then(|| {
            let m = merged(ga, gb, selected);
            let c = m.complexity(s);
            (cost[a] + cost[b] - c, m, c)
        })
    };
    let mut gains: Vec<Vec<Option<(f64, Group, f64)>>> = (0..model.groups.len())
        .map(|a| {
            (0..model.groups.len())
                .map(|b| if a < b { pair_gain(&model, &cost, a, b) } else { None })
                .collect()
        })
        .collect();

    let mut merges = 0;
    loop {
        // Groups stay sorted by their smallest position, so scanning (a, b)
        // in index order realises the tie-break order.
        let mut best: Option<(usize, usize, f64)> = None;
        for (a, row) in gains.iter().enumerate() {
            for (b, entry) in row.iter().enumerate().skip(a + 1) {
                if let Some((gain, _, _)) = entry {
                    if *gain > MIN_GAIN && best.is_none_or(|(_, _, g)| *gain > g) {
                        best = Some((a, b, *gain));
                    }
                }
            }
        }
        let Some((a, b, _)) = best else { break };

        let (_, group, c) = gains[a][b].take().expect("best pair has a cached merge");
        model.groups[a] = group;
        cost[a] = c;
        model.groups.remove(b);
        cost.remove(b);
        gains.remove(b);
        for row in gains.iter_mut() {
            row.remove(b);
        }
        merges += 1;
        debug_assert!(model.is_valid_partition());

        for other in 0..model.groups.len() {
            if other == a {
                continue;
            }
            let (lo, hi) = (other.min(a), other.max(a));
            gains[lo][hi] = pair_gain(&model, &cost, lo, hi);
        }
    }
    MpmSearch { model, merges }
}

/// `size` genomes: copies of `elites` first, then for every new genome and
/// every group independently, the group's alleles copied from one uniformly
/// chosen member of the selected set.
pub fn sample_mpm<R: Rng + ?Sized>(
    model: &MarginalProductModel,
    selected: &Population,
    size: usize,
    elites: &[Genome],
    rng: &mut R,
) -> Result<Population> {
    if size == 0 {
        return Err(Error::config("population size must be at least 1"));
    }
    let mut members: Vec<Genome> = elites.iter().take(size).cloned().collect();
    while members.len() < size {
        let mut g = Genome::zeros(selected.genome_len());
        for group in &model.groups {
            let donor = &selected[rng.random_range(0..selected.len())];
            for &i in &group.positions {
                g.set_allele(i, donor.bit(i));
            }
        }
        members.push(g);
    }
    Population::from_members(members)
}

pub fn ecga_generation<R: Rng + ?Sized>(
    population: &Population,
    params: &EcgaParams,
    evaluator: &mut Evaluator,
    rng: &mut R,
) -> Result<(Population, MarginalProductModel)> {
    let selected = params.selection().select(population, population.len(), rng)?;
    let search = greedy_mpm_search(&selected, params.max_group_size);
    let elite = elites(population, params.elitism)?;
    let mut next = sample_mpm(&search.model, &selected, population.len(), &elite, rng)?;
    evaluator.evaluate_all(next.members_mut(), rng);
    Ok((next, search.model))
}
