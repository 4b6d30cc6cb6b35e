//! Random test instances `T = S D S⁻¹` with exact references
//! `F = S f(D) S⁻¹`, and the error measures used to score a computed `f(T)`.
//!
//! Random numbers come from ChaCha20 seeded with the experiment seed. Each
//! trial and purpose owns a stream (`trial · 16 + purpose`), and every entry
//! of `S` reads from a fixed word offset of its stream, so an entry does not
//! depend on the order in which entries are generated.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::hiprec::{bits_for_digits, XScalar};
use crate::la::{max_abs, two_norm_estimate, unit_upper_inverse_hp, CMatrix, XMatrix, C64};
use crate::partition::BlockPartition;
use crate::scalarfun::catalog_get;

/// Identifier of the generator recorded in reports.
pub const RNG_NAME: &str = "chacha20/stream-per-trial-purpose/word-offset-per-entry";

const STREAM_CUTS: u64 = 0;
const STREAM_DIAG: u64 = 1;
const STREAM_S: u64 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub n: usize,
    pub n_blocks: usize,
    pub rho: f64,
    pub gen_digits: u32,
    /// Off-diagonal entries of `S` are uniform in `[−c, c]`.
    pub coef_range: f64,
    pub func: String,
    pub seed: u64,
    pub trials: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            n: 64,
            n_blocks: 4,
            rho: 2.0,
            gen_digits: 64,
            coef_range: 0.5,
            func: "exp".into(),
            seed: 0,
            trials: 20,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 || self.n < 2 * self.n_blocks {
            return Err(Error::Infeasible(alloc::format!(
                "N = {} cannot hold {} blocks of order at least 2",
                self.n, self.n_blocks
            )));
        }
        if self.gen_digits < 20 {
            return Err(Error::InvalidParameter(alloc::format!("gen_digits must be at least 20, got {}", self.gen_digits)));
        }
        if !(self.coef_range >= 0.0 && self.coef_range.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("bad coefficient range {}", self.coef_range)));
        }
        Ok(())
    }

    /// Left end of the lowest generator interval.
    pub fn origin(&self) -> f64 {
        -2.0 * self.n_blocks as f64
    }
}

/// One generated test problem.
#[derive(Clone, Debug)]
pub struct Instance {
    pub t: CMatrix,
    pub f_ref: CMatrix,
    pub block_sizes: Vec<usize>,
    /// `κ₂(S)` on the rounded matrices.
    pub kappa_s: f64,
    /// `κ₂(T)`, with `T⁻¹` by working-precision back substitution.
    pub kappa_t: f64,
}

fn stream(seed: u64, trial: u64, purpose: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(16).wrapping_add(purpose));
    rng
}

/// Uniform in `[0, 1)` with `words·64` random bits.
fn unit_uniform(rng: &mut ChaCha20Rng, words: usize, digits: u32) -> XScalar {
    let mut m = BigUint::default();
    for _ in 0..words {
        m = (m << 64u32) | BigUint::from(rng.next_u64());
    }
    let v = XScalar::from_bigint(&m.into(), digits + 2);
    v.mul_pow2(-64 * words as i64).with_digits(digits)
}

fn words_for(digits: u32) -> usize {
    (bits_for_digits(digits) as usize).div_ceil(64) + 1
}

/// Block orders from sorted uniform cut points in `0..=N`, redrawn until
/// every block has order at least two.
pub fn block_sizes(spec: &ExperimentSpec, trial: u64) -> Result<Vec<usize>> {
    spec.validate()?;
    let mut rng = stream(spec.seed, trial, STREAM_CUTS);
    loop {
        let mut w: Vec<usize> = (1..spec.n_blocks).map(|_| rng.random_range(0..=spec.n)).collect();
        w.sort_unstable();
        w.insert(0, 0);
        w.push(spec.n);
        let sizes: Vec<usize> = w.windows(2).map(|p| p[1] - p[0]).collect();
        if sizes.iter().all(|&s| s >= 2) {
            return Ok(sizes);
        }
    }
}

/// Builds trial `trial` of the experiment.
///
/// Block `k` counted from the top draws its eigenvalues from
/// `[−2(n−k+1), −2(n−k))`, so the diagonal increases down the matrix.
pub fn gen_instance(spec: &ExperimentSpec, trial: u64) -> Result<Instance> {
    let f = catalog_get(&spec.func, spec.gen_digits)?;
    gen_instance_with(spec, trial, &f)
}

pub fn gen_instance_with(spec: &ExperimentSpec, trial: u64, f: &dyn crate::scalarfun::AnalyticFunction) -> Result<Instance> {
    let sizes = block_sizes(spec, trial)?;
    let d = spec.gen_digits;
    let n = spec.n;
    let words = words_for(d);

    let mut rng = stream(spec.seed, trial, STREAM_DIAG);
    let two = XScalar::from_i64(2, d);
    let mut diag = Vec::with_capacity(n);
    for (k, &size) in sizes.iter().enumerate() {
        let lo = XScalar::from_i64(-2 * (spec.n_blocks - k) as i64, d);
        let mut block: Vec<XScalar> = (0..size).map(|_| &lo + &(&two * &unit_uniform(&mut rng, words, d))).collect();
        block.sort();
        diag.extend(block);
    }

    let c = XScalar::from_f64(spec.coef_range, d);
    let mut srng = stream(spec.seed, trial, STREAM_S);
    let s = XMatrix::from_fn(n, n, |i, j| {
        if i == j {
            XScalar::one(d)
        } else if i < j {
            srng.set_word_pos((2 * words * (i * n + j)) as u128);
            let u = unit_uniform(&mut srng, words, d);
            &c * &(u.mul_pow2(1) - XScalar::one(d))
        } else {
            XScalar::zero(d)
        }
    });
    let s_inv = unit_upper_inverse_hp(&s)?;
    let fd = diag.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let scale_cols = |v: &[XScalar]| XMatrix::from_fn(n, n, |i, j| if i <= j { &s[(i, j)] * &v[j] } else { XScalar::zero(d) });
    let t = scale_cols(&diag).mul_upper(&s_inv)?.to_cmatrix();
    let f_ref = scale_cols(&fd).mul_upper(&s_inv)?.to_cmatrix();

    let s_r = s.to_cmatrix();
    let kappa_s = two_norm_estimate(&s_r) * two_norm_estimate(&s_inv.to_cmatrix());
    let kappa_t = two_norm_estimate(&t) * two_norm_estimate(&upper_inverse(&t)?);
    Ok(Instance { t, f_ref, block_sizes: sizes, kappa_s, kappa_t })
}

/// Inverse of an upper triangular matrix by back substitution.
pub fn upper_inverse(t: &CMatrix) -> Result<CMatrix> {
    let n = t.require_square()?;
    t.check_upper_triangular()?;
    let mut inv = CMatrix::zeros(n, n);
    for j in 0..n {
        if t[(j, j)] == C64::new(0.0, 0.0) {
            return Err(Error::Domain("singular triangular matrix"));
        }
        inv[(j, j)] = t[(j, j)].inv();
        for i in (0..j).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for k in i + 1..=j {
                acc += t[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -acc / t[(i, i)];
        }
    }
    Ok(inv)
}

/// Error of a computed `F` against the reference, plus the conditioning of
/// the instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorMetrics {
    pub kappa_s: f64,
    pub kappa_t: f64,
    /// `max |F_ref|`
    pub norm_max_ref: f64,
    /// Estimate of `‖F − F_ref‖₂`.
    pub err_op2: f64,
    pub err_frob: f64,
    /// Frobenius norm over the two main block diagonals only.
    pub err_frob_incomplete: f64,
    pub err_max: f64,
    pub err_max_incomplete: f64,
    /// `max |f_ij − f̃_ij| / |f̃_ij|` over nonzero reference entries.
    pub err_rel_max: f64,
}

impl ErrorMetrics {
    pub fn with_kappas(mut self, kappa_s: f64, kappa_t: f64) -> Self {
        self.kappa_s = kappa_s;
        self.kappa_t = kappa_t;
        self
    }

    /// Field names and values in report order.
    pub fn fields(&self) -> [(&'static str, f64); 9] {
        [
            ("kappa_S", self.kappa_s),
            ("kappa_T", self.kappa_t),
            ("norm_max_ref", self.norm_max_ref),
            ("err_op2", self.err_op2),
            ("err_frob", self.err_frob),
            ("err_frob_incomplete", self.err_frob_incomplete),
            ("err_max", self.err_max),
            ("err_max_incomplete", self.err_max_incomplete),
            ("err_rel_max", self.err_rel_max),
        ]
    }

    /// Componentwise mean.
    pub fn mean(items: &[ErrorMetrics]) -> Option<ErrorMetrics> {
        if items.is_empty() {
            return None;
        }
        let k = items.len() as f64;
        let avg = |g: fn(&ErrorMetrics) -> f64| items.iter().map(g).sum::<f64>() / k;
        Some(ErrorMetrics {
            kappa_s: avg(|m| m.kappa_s),
            kappa_t: avg(|m| m.kappa_t),
            norm_max_ref: avg(|m| m.norm_max_ref),
            err_op2: avg(|m| m.err_op2),
            err_frob: avg(|m| m.err_frob),
            err_frob_incomplete: avg(|m| m.err_frob_incomplete),
            err_max: avg(|m| m.err_max),
            err_max_incomplete: avg(|m| m.err_max_incomplete),
            err_rel_max: avg(|m| m.err_rel_max),
        })
    }
}

/// The error measures; condition numbers are left as NaN.
pub fn metrics(f: &CMatrix, f_ref: &CMatrix, partition: &BlockPartition) -> Result<ErrorMetrics> {
    if f.shape() != f_ref.shape() {
        return Err(Error::DimensionMismatch { op: "metrics", left: f.shape(), right: f_ref.shape() });
    }
    if partition.size() != f.rows() || !f.is_square() {
        return Err(Error::DimensionMismatch { op: "metrics", left: f.shape(), right: (partition.size(), partition.size()) });
    }
    let diff = f.sub(f_ref)?;
    let n = f.rows();
    let (mut frob, mut frob_inc, mut mx, mut mx_inc, mut rel) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let scale = max_abs(&diff);
    for i in 0..n {
        for j in 0..n {
            let e = diff[(i, j)].norm();
            let sq = if scale > 0.0 { (e / scale) * (e / scale) } else { 0.0 };
            frob += sq;
            mx = mx.max(e);
            if partition.in_two_main_block_diagonals(i, j) {
                frob_inc += sq;
                mx_inc = mx_inc.max(e);
            }
            let r = f_ref[(i, j)].norm();
            if r != 0.0 {
                rel = rel.max(e / r);
            }
        }
    }
    Ok(ErrorMetrics {
        kappa_s: f64::NAN,
        kappa_t: f64::NAN,
        norm_max_ref: max_abs(f_ref),
        err_op2: two_norm_estimate(&diff),
        err_frob: scale * frob.sqrt(),
        err_frob_incomplete: scale * frob_inc.sqrt(),
        err_max: mx,
        err_max_incomplete: mx_inc,
        err_rel_max: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::build_partition_with_origin;

    fn small() -> ExperimentSpec {
        ExperimentSpec { n: 4, n_blocks: 2, gen_digits: 40, seed: 17, ..ExperimentSpec::default() }
    }

    #[test]
    fn deterministic() {
        let a = gen_instance(&small(), 0).unwrap();
        let b = gen_instance(&small(), 0).unwrap();
        assert_eq!(a.t, b.t);
        assert_eq!(a.f_ref, b.f_ref);
        let c = gen_instance(&small(), 1).unwrap();
        assert_ne!(a.t, c.t);
    }

    #[test]
    fn identity_s_gives_diagonal_reference() {
        let spec = ExperimentSpec { n: 6, n_blocks: 3, coef_range: 0.0, gen_digits: 30, seed: 3, ..ExperimentSpec::default() };
        let inst = gen_instance(&spec, 0).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(inst.t[(i, j)], C64::new(0.0, 0.0));
                    assert_eq!(inst.f_ref[(i, j)], C64::new(0.0, 0.0));
                }
            }
            let x = inst.t[(i, i)].re;
            assert!((inst.f_ref[(i, i)].re - x.exp()).abs() <= 1e-15 * x.exp());
        }
    }

    #[test]
    fn spectrum_containment_and_order() {
        let spec = ExperimentSpec { n: 64, n_blocks: 4, gen_digits: 64, seed: 9, ..ExperimentSpec::default() };
        let inst = gen_instance(&spec, 2).unwrap();
        let d: Vec<f64> = inst.t.diagonal().iter().map(|z| z.re).collect();
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
        assert!(d[0] >= -8.0 && d[63] < 0.0);
        let mut start = 0;
        for (k, &size) in inst.block_sizes.iter().enumerate() {
            assert!(size >= 2);
            let lo = -8.0 + 2.0 * k as f64;
            assert!(d[start..start + size].iter().all(|&x| x >= lo && x < lo + 2.0));
            start += size;
        }
        assert!(inst.t.is_upper_triangular() && inst.f_ref.is_upper_triangular());
        assert!(inst.kappa_s >= 1.0 && inst.kappa_t >= 1.0);
        let p = build_partition_with_origin(&d, 2.0, spec.origin(), 16).unwrap();
        assert_eq!(p.blocks.iter().map(|b| b.len()).collect::<Vec<_>>(), inst.block_sizes);
    }

    #[test]
    fn infeasible_spec() {
        let spec = ExperimentSpec { n: 5, n_blocks: 3, ..ExperimentSpec::default() };
        assert!(matches!(gen_instance(&spec, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn metric_cases() {
        let inst = gen_instance(&small(), 0).unwrap();
        let d: Vec<f64> = inst.t.diagonal().iter().map(|z| z.re).collect();
        let part = build_partition_with_origin(&d, 2.0, -4.0, 16).unwrap();
        let m = metrics(&inst.f_ref, &inst.f_ref, &part).unwrap();
        assert_eq!((m.err_max, m.err_frob, m.err_op2, m.err_rel_max), (0.0, 0.0, 0.0, 0.0));
        let spec = ExperimentSpec { n: 6, n_blocks: 3, seed: 4, gen_digits: 30, ..ExperimentSpec::default() };
        let inst = gen_instance(&spec, 0).unwrap();
        let d: Vec<f64> = inst.t.diagonal().iter().map(|z| z.re).collect();
        let part = build_partition_with_origin(&d, 2.0, spec.origin(), 16).unwrap();
        let mut f = inst.f_ref.clone();
        f[(0, 5)] += C64::new(1e-6, 0.0);
        let m = metrics(&f, &inst.f_ref, &part).unwrap();
        assert!((m.err_max - 1e-6).abs() < 1e-15);
        assert_eq!(m.err_max_incomplete, 0.0);
        assert_eq!(m.err_frob_incomplete, 0.0);
        assert!(m.err_frob_incomplete <= m.err_frob);
    }

    #[test]
    fn triangular_inverse() {
        let inst = gen_instance(&small(), 0).unwrap();
        let inv = upper_inverse(&inst.t).unwrap();
        let prod = crate::la::matmul(&inst.t, &inv, &crate::la::MulCounter::new()).unwrap();
        assert!(prod.max_abs_diff(&CMatrix::identity(4)) <= 1e-12);
    }
}
