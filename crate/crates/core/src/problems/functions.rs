//! Block functions of the built-in problems, written for the "One" variants
//! (optimum at the all-ones string). Zero variants complement the input.

/// Parameters of the hierarchical trap: `(f_high, f_low)` below the top
/// level and at the top level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HierParams {
    pub f_high_low: f64,
    pub f_low_low: f64,
    pub f_high_top: f64,
    pub f_low_top: f64,
}

impl HierParams {
    pub fn trap_one() -> Self {
        HierParams {
            f_high_low: 1.0,
            f_low_low: 1.0,
            f_high_top: 1.0,
            f_low_top: 0.9,
        }
    }

    /// `levels` is the number of levels of the hierarchy (n = 3^levels).
    pub fn trap_two(levels: u32) -> Self {
        HierParams {
            f_high_low: 1.0,
            f_low_low: 1.0 + 0.1 / levels as f64,
            f_high_top: 1.0,
            f_low_top: 0.9,
        }
    }
}

fn unitation(block: &[u8]) -> usize {
    block.iter().map(|&b| b as usize).sum()
}

pub fn one_max(bits: &[u8]) -> f64 {
    unitation(bits) as f64
}

pub fn quadratic(bits: &[u8]) -> f64 {
    bits.chunks_exact(2)
        .map(|b| match (b[0], b[1]) {
            (1, 1) => 1.0,
            (0, 0) => 0.9,
            _ => 0.0,
        })
        .sum()
}

pub fn deceptive3_block(u: usize) -> f64 {
    match u {
        3 => 1.0,
        0 => 0.9,
        1 => 0.8,
        _ => 0.0,
    }
}

pub fn deceptive3(bits: &[u8]) -> f64 {
    bits.chunks_exact(3)
        .map(|b| deceptive3_block(unitation(b)))
        .sum()
}

/// 6-bit blocks scored on the distance of the unitation from 3.
pub fn deceptive3_bipolar(bits: &[u8]) -> f64 {
    bits.chunks_exact(6)
        .map(|b| {
            let d = unitation(b).abs_diff(3);
            match d {
                3 => 1.0,
                0 => 0.9,
                1 => 0.8,
                _ => 0.0,
            }
        })
        .sum()
}

/// 3-bit windows starting at every even position; neighbours share a bit.
pub fn deceptive3_overlapping(bits: &[u8]) -> f64 {
    (0..bits.len().saturating_sub(1) / 2)
        .map(|w| deceptive3_block(unitation(&bits[2 * w..2 * w + 3])))
        .sum()
}

pub fn trap_block(u: usize, k: usize) -> f64 {
    if u == k {
        k as f64
    } else {
        (k - 1 - u) as f64
    }
}

pub fn concatenated_trap(bits: &[u8], k: usize) -> f64 {
    bits.chunks_exact(k)
        .map(|b| trap_block(unitation(b), k))
        .sum()
}

pub fn uniform_6_blocks(bits: &[u8]) -> f64 {
    bits.chunks_exact(6)
        .filter(|b| b.iter().all(|&x| x == 1))
        .count() as f64
}

/// Number of levels `l` with `n = 3^l`, if any.
pub fn hier_levels(n: usize) -> Option<u32> {
    let mut m = n;
    let mut levels = 0;
    while m > 1 && m.is_multiple_of(3) {
        m /= 3;
        levels += 1;
    }
    (m == 1 && levels >= 1).then_some(levels)
}

fn general_trap(u: usize, f_high: f64, f_low: f64) -> f64 {
    if u == 3 {
        f_high
    } else {
        f_low * (2.0 - u as f64) / 2.0
    }
}

/// Hierarchical trap over `n = 3^l` bits.
///
/// Each level interprets consecutive triples of symbols; 000 maps to 0,
/// 111 to 1 and anything else to a null symbol passed upward. A triple
/// without nulls at level `lvl` contributes `3^lvl * trap(u)`.
pub fn hierarchical_trap(bits: &[u8], params: &HierParams) -> f64 {
    let levels = hier_levels(bits.len()).expect("hierarchical trap needs n = 3^l");
    let mut symbols: Vec<Option<u8>> = bits.iter().map(|&b| Some(b)).collect();
    let mut total = 0.0;
    let mut weight = 1.0;
    for level in 1..=levels {
        weight *= 3.0;
        let (f_high, f_low) = if level == levels {
            (params.f_high_top, params.f_low_top)
        } else {
            (params.f_high_low, params.f_low_low)
        };
        symbols = symbols
            .chunks_exact(3)
            .map(|t| match (t[0], t[1], t[2]) {
                (Some(a), Some(b), Some(c)) => {
                    let u = (a + b + c) as usize;
                    total += weight * general_trap(u, f_high, f_low);
                    match u {
                        0 => Some(0),
                        3 => Some(1),
                        _ => None,
                    }
                }
                _ => None,
            })
            .collect();
    }
    total
}
