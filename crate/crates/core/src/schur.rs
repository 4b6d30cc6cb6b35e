//! Complex Schur form `R = Q T Qᴴ` with the diagonal of `T` in ascending
//! order.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::la::{frobenius_norm, matmul, one_norm, CMatrix, MulCounter, C64};

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct SchurForm {
    pub t: CMatrix,
    pub q: CMatrix,
    /// `‖Q T Qᴴ − R‖_F / ‖R‖_F`
    pub residual: f64,
    /// Adjacent swaps performed while ordering the diagonal.
    pub swaps: usize,
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `‖QᴴQ − I‖_max`
pub fn unitarity_defect(q: &CMatrix) -> f64 {
    let qq = matmul(&q.adjoint(), q, &MulCounter::new()).expect("square");
    let n = q.cols();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((qq[(i, j)] - id).norm());
        }
    }
    worst
}

/// `‖Q T Qᴴ − R‖_F / ‖R‖_F`, or the absolute residual when `R = 0`.
pub fn reconstruction_residual(r: &CMatrix, t: &CMatrix, q: &CMatrix) -> f64 {
    let ctr = MulCounter::new();
    let qt = matmul(q, t, &ctr).expect("conformable");
    let back = matmul(&qt, &q.adjoint(), &ctr).expect("conformable");
    let diff = frobenius_norm(&back.sub(r).expect("same shape"));
    let nr = frobenius_norm(r);
    if nr == 0.0 {
        diff
    } else {
        diff / nr
    }
}

/// Householder reduction `A = Q H Qᴴ` with `H` upper Hessenberg.
pub fn hessenberg(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = a.require_square()?;
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- P H P, Q <- Q P with P = I - 2 v vᴴ on rows/cols k+1..n
        for j in 0..n {
            let mut s = zero();
            for (l, vl) in v.iter().enumerate() {
                s += vl.conj() * h[(k + 1 + l, j)];
            }
            for (l, vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= *vl * s * 2.0;
            }
        }
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = zero();
                for (l, vl) in v.iter().enumerate() {
                    s += m[(i, k + 1 + l)] * vl;
                }
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= s * vl.conj() * 2.0;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = zero();
        }
    }
    Ok((h, q))
}

/// `G = [[c, s], [−s̄, c]]` with `G·[x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = ax.hypot(y.norm());
    (ax / r, (x / ax) * y.conj() / r)
}

fn rotate_rows(m: &mut CMatrix, k: usize, c: f64, s: C64, cols: core::ops::Range<usize>) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

/// `M ← M Gᴴ` on columns `k, k+1`.
fn rotate_cols(m: &mut CMatrix, k: usize, c: f64, s: C64, rows: core::ops::Range<usize>) {
    for i in rows {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + b * s.conj();
        m[(i, k + 1)] = -a * s + b * c;
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let (l1, l2) = (mean + disc, mean - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Shifted QR iteration on an upper Hessenberg `H`, accumulating into `Q`.
/// On return `H` is upper triangular.
fn hessenberg_qr(h: &mut CMatrix, q: &mut CMatrix) -> Result<()> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let cap = 30 * n;
    let scale = one_norm(h).max(f64::MIN_POSITIVE);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= EPS * diag {
                h[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total >= cap {
            return Err(Error::NotConverged { iterations: total });
        }
        total += 1;
        since_deflation += 1;
        let mu = if since_deflation.is_multiple_of(10) {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.25 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        rots.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotate_rows(h, k, c, s, k..n);
            h[(k + 1, k)] = zero();
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            rotate_cols(h, k, c, s, 0..(k + 2).min(hi + 1));
            rotate_cols(q, k, c, s, 0..n);
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(())
}

/// Exchanges the diagonal entries `i-1` and `i` of the upper triangular `T`
/// by a 2×2 unitary similarity, updating `Q` so that `Q T Qᴴ` is unchanged.
///
/// Returns the magnitude of the entry `(i, i-1)` before it is set to zero.
pub fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, i: usize) -> Result<f64> {
    let n = t.rows();
    assert!(i >= 1 && i < n, "swap index out of range");
    let a = t[(i - 1, i - 1)];
    let b = t[(i - 1, i)];
    let c = t[(i, i)];
    if a == c {
        return Err(Error::EqualDiagonal { index: i });
    }
    let arg = |z: C64| if z.norm() == 0.0 { 0.0 } else { z.arg() };
    let alpha = arg(b) - arg(a - c);
    let den = (a - c).norm().hypot(b.norm());
    let (cos, sin) = (b.norm() / den, (a - c).norm() / den);
    let e = C64::from_polar(1.0, alpha);
    let u = [[e.conj() * cos, C64::new(-sin, 0.0)], [C64::new(sin, 0.0), e * cos]];
    // rows: T <- U T
    for j in i - 1..n {
        let x = t[(i - 1, j)];
        let y = t[(i, j)];
        t[(i - 1, j)] = u[0][0] * x + u[0][1] * y;
        t[(i, j)] = u[1][0] * x + u[1][1] * y;
    }
    // columns: T <- T Uᴴ, Q <- Q Uᴴ
    let apply = |m: &mut CMatrix, rows: usize| {
        for r in 0..rows {
            let x = m[(r, i - 1)];
            let y = m[(r, i)];
            m[(r, i - 1)] = x * u[0][0].conj() + y * u[0][1].conj();
            m[(r, i)] = x * u[1][0].conj() + y * u[1][1].conj();
        }
    };
    apply(t, i + 1);
    apply(q, q.rows());
    let residual = t[(i, i - 1)].norm();
    t[(i, i - 1)] = zero();
    t[(i - 1, i - 1)] = c;
    t[(i, i)] = a;
    Ok(residual)
}

/// Bubble passes of adjacent swaps until the real parts of the diagonal are
/// nondecreasing. Returns the number of swaps and the largest swap residual.
pub fn sort_diagonal(t: &mut CMatrix, q: &mut CMatrix) -> Result<(usize, f64)> {
    let n = t.rows();
    let mut swaps = 0;
    let mut worst = 0.0f64;
    let mut end = n;
    while end > 1 {
        let mut last = 0;
        for i in 1..end {
            if t[(i - 1, i - 1)].re > t[(i, i)].re {
                worst = worst.max(swap_adjacent(t, q, i)?);
                swaps += 1;
                last = i;
            }
        }
        end = last;
    }
    Ok((swaps, worst))
}

/// Accepts the diagonal as real when `max |Im t_ii| ≤ tol·(1 + ‖T‖₁)`, drops
/// the imaginary parts and returns the real diagonal.
pub fn validate_real_spectrum(t: &mut CMatrix, tol: f64) -> Result<Vec<f64>> {
    let n = t.require_square()?;
    let limit = tol * (1.0 + one_norm(t));
    let mut worst: Option<(usize, f64)> = None;
    for i in 0..n {
        let im = t[(i, i)].im;
        if im.abs() > limit && worst.is_none_or(|(_, w)| im.abs() > w.abs()) {
            worst = Some((i, im));
        }
    }
    if let Some((index, imag)) = worst {
        return Err(Error::RealSpectrumViolation { index, imag });
    }
    Ok((0..n)
        .map(|i| {
            t[(i, i)].im = 0.0;
            t[(i, i)].re
        })
        .collect())
}

/// Schur form with ascending real diagonal.
///
/// QR runs on `R₁ = −R + αI`, `α = ‖R‖₁ + 1`, whose eigenvalues all have
/// real part at least one; then `T = αI − T₁`. Upper triangular input skips
/// the QR stage.
pub fn schur_ascending(r: &CMatrix, tol: f64) -> Result<SchurForm> {
    let n = r.require_square()?;
    let (mut t, mut q) = if r.is_upper_triangular() {
        (r.clone(), CMatrix::identity(n))
    } else {
        let alpha = one_norm(r) + 1.0;
        let mut r1 = r.scale(C64::new(-1.0, 0.0));
        r1.shift_diagonal(C64::new(alpha, 0.0));
        let (mut h, mut q) = hessenberg(&r1)?;
        hessenberg_qr(&mut h, &mut q)?;
        let mut t = h.scale(C64::new(-1.0, 0.0));
        t.shift_diagonal(C64::new(alpha, 0.0));
        for i in 0..n {
            for j in 0..i {
                t[(i, j)] = zero();
            }
        }
        (t, q)
    };
    validate_real_spectrum(&mut t, tol)?;
    let (swaps, _) = sort_diagonal(&mut t, &mut q)?;
    let residual = if swaps == 0 && r.is_upper_triangular() && t == *r {
        0.0
    } else {
        reconstruction_residual(r, &t, &q)
    };
    Ok(SchurForm { t, q, residual, swaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_upper(diag: &[f64], seed: u64) -> CMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = diag.len();
        CMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            core::cmp::Ordering::Equal => c(diag[i]),
            core::cmp::Ordering::Less => C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            _ => zero(),
        })
    }

    fn is_hessenberg(h: &CMatrix) -> bool {
        (0..h.rows()).all(|i| (0..i.saturating_sub(1)).all(|j| h[(i, j)] == zero()))
    }

    #[test]
    fn hessenberg_trivial_inputs() {
        let a = random_matrix(2, 1);
        let (h, q) = hessenberg(&a).unwrap();
        assert_eq!(h, a);
        assert_eq!(q, CMatrix::identity(2));
        let mut hh = random_matrix(5, 2);
        for i in 0..5usize {
            for j in 0..i.saturating_sub(1) {
                hh[(i, j)] = zero();
            }
        }
        let (h, q) = hessenberg(&hh).unwrap();
        assert_eq!(h, hh);
        assert_eq!(q, CMatrix::identity(5));
    }

    #[test]
    fn hessenberg_reconstructs() {
        let a = random_matrix(6, 3);
        let (h, q) = hessenberg(&a).unwrap();
        assert!(is_hessenberg(&h));
        assert!(reconstruction_residual(&a, &h, &q) <= 1e-13);
        assert!(unitarity_defect(&q) <= 1e-14);
    }

    #[test]
    fn fast_path_for_sorted_triangular() {
        let r = random_upper(&[-3.0, -1.0, 0.5, 2.0], 4);
        let s = schur_ascending(&r, 1e-8).unwrap();
        assert_eq!(s.t, r);
        assert_eq!(s.q, CMatrix::identity(4));
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn diagonal_input_is_permuted() {
        let r = CMatrix::diag(&[c(3.0), c(1.0), c(2.0)]);
        let s = schur_ascending(&r, 1e-8).unwrap();
        assert_eq!(s.t.diagonal(), alloc::vec![c(1.0), c(2.0), c(3.0)]);
        assert!(s.swaps <= 3);
        for i in 0..3 {
            let nz = (0..3).filter(|&j| s.q[(i, j)].norm() > 0.5).count();
            assert_eq!(nz, 1);
        }
        assert!(s.residual <= 1e-15);
    }

    fn constructed(diag: &[f64], seed: u64) -> CMatrix {
        // S D S⁻¹ with S unit upper triangular, inverse by back substitution
        let n = diag.len();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let s = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(1.0)
            } else if i < j {
                c(rng.random_range(-0.5..0.5))
            } else {
                zero()
            }
        });
        let mut inv = CMatrix::identity(n);
        for j in 0..n {
            for i in (0..j).rev() {
                let mut acc = zero();
                for k in i + 1..=j {
                    acc += s[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = -acc;
            }
        }
        let ctr = MulCounter::new();
        let sd = matmul(&s, &CMatrix::diag(&diag.iter().map(|&d| c(d)).collect::<Vec<_>>()), &ctr).unwrap();
        let mut r = matmul(&sd, &inv, &ctr).unwrap();
        // a random unitary similarity makes the input dense
        let (_, u) = hessenberg(&random_matrix(n, seed ^ 0xabc)).unwrap();
        let (qr, _) = householder_q(&random_matrix(n, seed ^ 0xdef));
        let w = matmul(&u, &qr, &ctr).unwrap();
        r = matmul(&matmul(&w, &r, &ctr).unwrap(), &w.adjoint(), &ctr).unwrap();
        r
    }

    fn householder_q(a: &CMatrix) -> (CMatrix, ()) {
        // Gram–Schmidt twice gives a unitary factor
        let n = a.rows();
        let mut q = a.clone();
        for _ in 0..2 {
            for j in 0..n {
                for k in 0..j {
                    let mut d = zero();
                    for i in 0..n {
                        d += q[(i, k)].conj() * q[(i, j)];
                    }
                    for i in 0..n {
                        let v = q[(i, k)];
                        q[(i, j)] -= d * v;
                    }
                }
                let nn = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
                for i in 0..n {
                    q[(i, j)] /= nn;
                }
            }
        }
        (q, ())
    }

    #[test]
    fn constructed_spectrum_is_recovered() {
        let want = [-4.5, -2.2, -0.7];
        let r = constructed(&[-0.7, -4.5, -2.2], 7);
        let s = schur_ascending(&r, 1e-8).unwrap();
        for (t, w) in s.t.diagonal().iter().zip(want) {
            assert!((t.re - w).abs() <= 1e-10 && t.im == 0.0);
        }
        assert!(s.residual <= 1e-12, "{}", s.residual);
        assert!(unitarity_defect(&s.q) <= 1e-12);
        assert!(s.t.is_upper_triangular());
    }

    #[test]
    fn dense_thirty_two() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut diag: Vec<f64> = (0..32).map(|_| rng.random_range(-6.0..0.0)).collect();
        let r = constructed(&diag, 12);
        let s = schur_ascending(&r, 1e-8).unwrap();
        diag.sort_by(f64::total_cmp);
        for (t, w) in s.t.diagonal().iter().zip(&diag) {
            assert!((t.re - w).abs() <= 1e-9, "{} vs {}", t.re, w);
        }
        assert!(s.residual <= 1e-11);
        assert!(unitarity_defect(&s.q) <= 1e-12);
    }

    #[test]
    fn swap_two_by_two() {
        let t0 = CMatrix::from_fn(2, 2, |i, j| [[c(2.0), c(1.0)], [zero(), c(1.0)]][i][j]);
        let (mut t, mut q) = (t0.clone(), CMatrix::identity(2));
        let res = swap_adjacent(&mut t, &mut q, 1).unwrap();
        assert!(res <= 1e-15);
        assert_eq!(t.diagonal(), alloc::vec![c(1.0), c(2.0)]);
        assert!((t[(0, 1)].norm() - 1.0).abs() <= 1e-15);
        assert!(reconstruction_residual(&t0, &t, &q) <= 1e-15);
        // trace and determinant
        let tr = t[(0, 0)] + t[(1, 1)];
        let det = t[(0, 0)] * t[(1, 1)];
        assert!((tr - c(3.0)).norm() <= 1e-14 && (det - c(2.0)).norm() <= 1e-14);
    }

    #[test]
    fn swap_decoupled_and_equal() {
        let mut t = CMatrix::diag(&[c(2.0), c(1.0)]);
        let mut q = CMatrix::identity(2);
        swap_adjacent(&mut t, &mut q, 1).unwrap();
        assert_eq!(t.diagonal(), alloc::vec![c(1.0), c(2.0)]);
        assert_eq!(t[(0, 1)], zero());
        let mut t = CMatrix::diag(&[c(1.0), c(1.0)]);
        assert_eq!(swap_adjacent(&mut t, &mut q, 1), Err(Error::EqualDiagonal { index: 1 }));
    }

    #[test]
    fn sort_is_similarity_and_idempotent() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let diag: Vec<f64> = (0..8).map(|_| rng.random_range(-5.0..5.0)).collect();
        let t0 = random_upper(&diag, 6);
        let (mut t, mut q) = (t0.clone(), CMatrix::identity(8));
        let (swaps, worst) = sort_diagonal(&mut t, &mut q).unwrap();
        assert!(swaps > 0);
        assert!(worst <= 1e-12 * one_norm(&t0));
        let mut sorted = diag.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in t.diagonal().iter().zip(&sorted) {
            assert!((a.re - b).abs() <= 1e-12);
        }
        assert!(reconstruction_residual(&t0, &t, &q) <= 1e-12);
        assert_eq!(sort_diagonal(&mut t, &mut q).unwrap().0, 0);
    }

    #[test]
    fn real_spectrum_validation() {
        let mut t = CMatrix::diag(&[c(1.0), c(2.0)]);
        assert_eq!(validate_real_spectrum(&mut t, 1e-10).unwrap(), alloc::vec![1.0, 2.0]);
        let mut t = CMatrix::diag(&[C64::new(1.0, 1e-14), c(2.0)]);
        validate_real_spectrum(&mut t, 1e-10).unwrap();
        assert_eq!(t[(0, 0)].im, 0.0);
        let mut t = CMatrix::diag(&[c(1.0), C64::new(2.0, 0.5)]);
        assert_eq!(
            validate_real_spectrum(&mut t, 1e-10),
            Err(Error::RealSpectrumViolation { index: 1, imag: 0.5 })
        );
        // a rotation has eigenvalues ±i
        let r = CMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(schur_ascending(&r, 1e-8), Err(Error::RealSpectrumViolation { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn schur_invariants(seed in any::<u64>(), n in 2usize..12) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-6.0..0.0)).collect();
            let r = constructed(&diag, seed.wrapping_add(1));
            let s = schur_ascending(&r, 1e-8).unwrap();
            prop_assert!(s.t.is_upper_triangular());
            prop_assert!(unitarity_defect(&s.q) <= 1e-12);
            prop_assert!(s.residual <= 1e-11);
            let d = s.t.diagonal();
            prop_assert!(d.windows(2).all(|w| w[0].re <= w[1].re));
        }
    }
}
