//! Matrix polynomials: Paterson–Stockmeyer for scalar coefficients, Horner
//! for matrix coefficients, and `Σ c_ij A^i H B^j`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::{BivariatePoly, MonomialPoly};
use crate::la::{matmul, CMatrix, MulCounter, C64};

/// `A, A², …, A^s`, computed on demand and reused across evaluations.
#[derive(Clone, Debug)]
pub struct PowerCache {
    powers: Vec<CMatrix>,
}

impl PowerCache {
    pub fn new(a: &CMatrix) -> Result<Self> {
        a.require_square()?;
        Ok(PowerCache { powers: alloc::vec![a.clone()] })
    }

    pub fn base(&self) -> &CMatrix {
        &self.powers[0]
    }

    /// Highest power currently held.
    pub fn highest(&self) -> usize {
        self.powers.len()
    }

    /// `A^k`, `1 ≤ k ≤ highest()`.
    pub fn power(&self, k: usize) -> &CMatrix {
        &self.powers[k - 1]
    }

    /// Extends the cache up to `A^s`, one counted product per new power.
    pub fn ensure(&mut self, s: usize, ctr: &MulCounter) -> Result<()> {
        while self.powers.len() < s {
            let next = matmul(self.powers.last().expect("nonempty"), &self.powers[0], ctr)?;
            self.powers.push(next);
        }
        Ok(())
    }
}

/// Block size `⌈√(m+1)⌉` for degree `m`.
pub fn ps_block_size(degree: usize) -> usize {
    let mut s = 1;
    while s * s < degree + 1 {
        s += 1;
    }
    s
}

/// `p(A)` for a polynomial given by its working-precision coefficients.
///
/// The coefficients are cut into chunks of `s` terms, each chunk becoming a
/// combination of `I, A, …, A^{s-1}`, and the chunks are combined by Horner's
/// rule in `A^s`. Degree 15 costs 3 products for the powers and 3 for the
/// Horner stage.
pub fn ps_eval_coeffs(coeffs: &[C64], cache: &mut PowerCache, ctr: &MulCounter) -> Result<CMatrix> {
    let n = cache.base().rows();
    if coeffs.is_empty() {
        return Ok(CMatrix::zeros(n, n));
    }
    let degree = coeffs.len() - 1;
    let s = ps_block_size(degree);
    if degree == 0 {
        let mut out = CMatrix::zeros(n, n);
        out.shift_diagonal(coeffs[0]);
        return Ok(out);
    }
    cache.ensure(s, ctr)?;
    let chunk = |k: usize| -> CMatrix {
        let mut b = CMatrix::zeros(n, n);
        for (i, &c) in coeffs.iter().enumerate().skip(k * s).take(s) {
            let p = i - k * s;
            if p == 0 {
                b.shift_diagonal(c);
            } else {
                b.axpy(c, cache.power(p)).expect("same shape");
            }
        }
        b
    };
    let chunks = (degree + s) / s;
    let mut acc = chunk(chunks - 1);
    for k in (0..chunks - 1).rev() {
        acc = matmul(&acc, cache.power(s), ctr)?;
        acc = acc.add(&chunk(k))?;
    }
    Ok(acc)
}

/// `p(A)` with the coefficients of `p` rounded to working precision.
///
/// A warm `cache` (from an earlier call on the same `A`) saves the products
/// that form the powers.
pub fn ps_eval(p: &MonomialPoly, a: &CMatrix, cache: Option<&mut PowerCache>, ctr: &MulCounter) -> Result<CMatrix> {
    let coeffs: Vec<C64> = p.to_f64().into_iter().map(|c| C64::new(c, 0.0)).collect();
    match cache {
        Some(cache) => {
            if cache.base() != a {
                return Err(Error::InvalidParameter("power cache built for a different matrix".into()));
            }
            ps_eval_coeffs(&coeffs, cache, ctr)
        }
        None => ps_eval_coeffs(&coeffs, &mut PowerCache::new(a)?, ctr),
    }
}

/// `Σ_j C_j B^j` by Horner's rule from the top coefficient: `len − 1`
/// products.
pub fn horner_matrix_coeffs(cs: &[CMatrix], b: &CMatrix, ctr: &MulCounter) -> Result<CMatrix> {
    let last = cs.last().ok_or_else(|| Error::InvalidParameter("no coefficients".into()))?;
    let mu = b.require_square()?;
    for c in cs {
        if c.cols() != mu || c.shape() != last.shape() {
            return Err(Error::DimensionMismatch { op: "horner_matrix_coeffs", left: c.shape(), right: b.shape() });
        }
    }
    let mut acc = last.clone();
    for c in cs.iter().rev().skip(1) {
        acc = matmul(&acc, b, ctr)?.add(c)?;
    }
    Ok(acc)
}

/// `p(A, B) ◇ H = Σ_ij c_ij A^i H B^j`.
///
/// Every inner sum `Σ_i c_ij A^i` shares one power cache of `A`; each is
/// multiplied by `H` and the results are combined by Horner's rule in `B`.
/// For 16×16 coefficients this is `3 + 4·16 + 15 = 82` products.
pub fn bivariate_apply(
    c: &BivariatePoly,
    a: &CMatrix,
    h: &CMatrix,
    b: &CMatrix,
    ctr: &MulCounter,
) -> Result<CMatrix> {
    let nu = a.require_square()?;
    let mu = b.require_square()?;
    if h.shape() != (nu, mu) {
        return Err(Error::DimensionMismatch { op: "bivariate_apply", left: (nu, mu), right: h.shape() });
    }
    let (m1, m2) = c.shape();
    let mut cache = PowerCache::new(a)?;
    let mut terms = Vec::with_capacity(m2);
    for j in 0..m2 {
        let col: Vec<C64> = (0..m1).map(|i| C64::new(c.coeff(i, j).to_f64(), 0.0)).collect();
        let inner = ps_eval_coeffs(&col, &mut cache, ctr)?;
        terms.push(matmul(&inner, h, ctr)?);
    }
    horner_matrix_coeffs(&terms, b, ctr)
}
