//! Clustering of the ascending diagonal into intervals of length ρ.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hiprec::{Rounding, XScalar};

/// Significant digits kept when α and β are rounded outward.
const ENCLOSURE_DIGITS: u32 = 16;

/// One diagonal block `start..end` (0-based, end exclusive).
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInfo {
    pub start: usize,
    pub end: usize,
    /// Index of the length-ρ interval this block came from, before empty
    /// intervals were dropped.
    pub interval: usize,
    /// Smallest eigenvalue, rounded down.
    pub alpha: XScalar,
    /// Largest eigenvalue, rounded up.
    pub beta: XScalar,
    pub gamma: XScalar,
    pub delta: XScalar,
}

impl BlockInfo {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn range(&self) -> core::ops::Range<usize> {
        self.start..self.end
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPartition {
    pub a: f64,
    pub rho: f64,
    pub blocks: Vec<BlockInfo>,
    owner: Vec<usize>,
}

impl BlockPartition {
    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Matrix order.
    pub fn size(&self) -> usize {
        self.owner.len()
    }

    /// `0 = k₀ < k₁ < … < kₙ = N`
    pub fn boundaries(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.blocks.iter().map(|b| b.start).collect();
        b.push(self.size());
        b
    }

    /// Block containing row/column `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.owner[i]
    }

    /// True when `(i, j)` lies in the main or the first block superdiagonal.
    pub fn in_two_main_block_diagonals(&self, i: usize, j: usize) -> bool {
        let (bi, bj) = (self.owner[i], self.owner[j]);
        bj <= bi + 1
    }
}

impl fmt::Display for BlockPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "origin={} rho={} blocks={}", self.a, self.rho, self.blocks.len())?;
        for (k, b) in self.blocks.iter().enumerate() {
            writeln!(
                f,
                "block {k}: rows {}..{} interval {} alpha={} beta={}",
                b.start,
                b.end,
                b.interval,
                b.alpha.to_string_digits(17),
                b.beta.to_string_digits(17)
            )?;
        }
        Ok(())
    }
}

/// Partition with the interval origin at the smallest diagonal entry.
pub fn build_partition(diag: &[f64], rho: f64, digits: u32) -> Result<BlockPartition> {
    let a = diag.first().copied().ok_or_else(|| Error::InvalidParameter("empty diagonal".into()))?;
    build_partition_with_origin(diag, rho, a, digits)
}

/// Cluster `c` collects the entries in `[a + cρ, a + (c+1)ρ)`; the largest
/// entry always goes to the last interval. Empty clusters are dropped.
pub fn build_partition_with_origin(diag: &[f64], rho: f64, a: f64, digits: u32) -> Result<BlockPartition> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("rho must be positive, got {rho}")));
    }
    if diag.is_empty() {
        return Err(Error::InvalidParameter("empty diagonal".into()));
    }
    if diag.iter().any(|x| !x.is_finite()) || diag.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("diagonal must be finite and nondecreasing".into()));
    }
    if !a.is_finite() || a > diag[0] {
        return Err(Error::InvalidParameter(alloc::format!("origin {a} exceeds the smallest eigenvalue")));
    }
    let top = diag[diag.len() - 1];
    let n_int = (((top - a) / rho).ceil() as usize).max(1);
    let cluster = |x: f64| (((x - a) / rho).floor() as usize).min(n_int - 1);

    let mut blocks = Vec::new();
    let mut owner = Vec::with_capacity(diag.len());
    let mut start = 0;
    while start < diag.len() {
        let c = cluster(diag[start]);
        let mut end = start + 1;
        while end < diag.len() && cluster(diag[end]) == c {
            end += 1;
        }
        let lo = XScalar::from_f64(diag[start], digits);
        let hi = XScalar::from_f64(diag[end - 1], digits);
        let alpha = lo.round_decimal(ENCLOSURE_DIGITS, Rounding::Floor, digits);
        let beta = hi.round_decimal(ENCLOSURE_DIGITS, Rounding::Ceil, digits);
        let gamma = (&alpha + &beta).mul_pow2(-1);
        let delta = (&beta - &alpha).mul_pow2(-1);
        owner.extend(core::iter::repeat_n(blocks.len(), end - start));
        blocks.push(BlockInfo { start, end, interval: c, alpha, beta, gamma, delta });
        start = end;
    }
    Ok(BlockPartition { a, rho, blocks, owner })
}
