use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use rand::Rng;

use crate::error::{Error, Result};

/// A fixed-length string of zeros and ones with a cached fitness value.
///
/// The cache is cleared by every allele mutation; a fitness is only present
/// when it was produced by a problem evaluation of the current alleles.
#[derive(Clone, Debug, PartialEq)]
pub struct Genome {
    bits: BitVec<u64, Lsb0>,
    fitness: Option<f64>,
}

impl Genome {
    /// All-zeros genome of length `n`.
    pub fn zeros(n: usize) -> Self {
        Genome {
            bits: bitvec![u64, Lsb0; 0; n],
            fitness: None,
        }
    }

    pub fn ones(n: usize) -> Self {
        Genome {
            bits: bitvec![u64, Lsb0; 1; n],
            fitness: None,
        }
    }

    /// Each allele drawn independently and uniformly from {0, 1}.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut g = Genome::zeros(n);
        for i in 0..n {
            g.bits.set(i, rng.random::<bool>());
        }
        g
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(alleles: I) -> Self {
        Genome {
            bits: alleles.into_iter().collect(),
            fitness: None,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Allele at position `i`, as 0 or 1.
    ///
    /// Panics if `i` is out of range.
    pub fn get_allele(&self, i: usize) -> u8 {
        assert!(
            i < self.len(),
            "allele index {i} out of range for genome of length {}",
            self.len()
        );
        self.bits[i] as u8
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set_allele(&mut self, i: usize, value: bool) {
        self.bits.set(i, value);
        self.fitness = None;
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.bits[i];
        self.bits.set(i, !v);
        self.fitness = None;
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().by_vals()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    /// A new genome with every allele inverted (unevaluated).
    pub fn complement(&self) -> Genome {
        Genome {
            bits: !self.bits.clone(),
            fitness: None,
        }
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn is_evaluated(&self) -> bool {
        self.fitness.is_some()
    }

    pub(crate) fn set_fitness(&mut self, fitness: f64) {
        self.fitness = Some(fitness);
    }

    /// Compare alleles only, ignoring the fitness cache.
    pub fn same_alleles(&self, other: &Genome) -> bool {
        self.bits == other.bits
    }

    /// Alleles as a `Vec<u8>` of 0/1, optionally complemented.
    pub(crate) fn to_units(&self, complement: bool) -> Vec<u8> {
        let flip = complement as u8;
        self.bits.iter().by_vals().map(|b| b as u8 ^ flip).collect()
    }

    /// Interpret the alleles as an unsigned integer, position 0 being the
    /// most significant bit of the range.
    pub(crate) fn pattern(&self, positions: &[usize]) -> usize {
        positions
            .iter()
            .fold(0usize, |acc, &i| (acc << 1) | self.bits[i] as usize)
    }
}

/// Number of positions at which `a` and `b` differ.
///
/// Panics on a length mismatch.
pub fn hamming_distance(a: &Genome, b: &Genome) -> usize {
    assert_eq!(
        a.len(),
        b.len(),
        "hamming distance between genomes of different lengths"
    );
    let tail = a.len() % 64;
    let words = a.bits.as_raw_slice().iter().zip(b.bits.as_raw_slice());
    let last = words.len().saturating_sub(1);
    words
        .enumerate()
        .map(|(i, (x, y))| {
            let mut d = x ^ y;
            if i == last && tail != 0 {
                d &= (1u64 << tail) - 1;
            }
            d.count_ones() as usize
        })
        .sum()
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits.iter().by_vals() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Genome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::config(format!(
                    "invalid allele {other:?} in genome string {s:?}"
                ))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(Genome::from_bools)
    }
}
