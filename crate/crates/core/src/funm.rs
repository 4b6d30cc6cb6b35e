//! `f(R)` for a matrix with real spectrum: Schur form, clustering,
//! interpolation on the two main block diagonals, and the Parlett recurrence
//! for the rest.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::harness::ErrorMetrics;
use crate::hiprec::XScalar;
use crate::interp::{bivariate_interpolation, chebyshev_nodes, divided_differences, newton_to_monomial, scalar_divdiff, NodeSet};
use crate::la::{matmul, CMatrix, MulCounter, XMatrix, C64};
use crate::partition::{build_partition_with_origin, BlockInfo, BlockPartition};
use crate::polyeval::{bivariate_apply, ps_eval};
use crate::scalarfun::{taylor_coeffs, AnalyticFunction};
use crate::schur::{schur_ascending, SchurForm};

/// How the two main block diagonals are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Diagonal blocks by univariate and superdiagonal blocks by bivariate
    /// interpolation.
    #[default]
    Standard,
    /// `f` applied to each overlapping pair of adjacent blocks; duplicated
    /// diagonal blocks are discarded.
    DoubleBlock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunmConfig {
    pub rho: f64,
    /// Interpolation nodes per variable.
    pub node_count: usize,
    pub scalar_digits: u32,
    pub real_spectrum_tol: f64,
    /// Diagonal blocks with `δ` below this use the Taylor polynomial.
    pub degenerate_delta_tol: f64,
    pub taylor_degree: u32,
    /// Nodes are spread over at least `[−r, r]` even when a block's
    /// spectrum is narrower.
    pub min_node_radius: f64,
    /// Left end of the first clustering interval; defaults to the smallest
    /// eigenvalue.
    pub origin: Option<f64>,
    pub mode: Mode,
}

impl Default for FunmConfig {
    fn default() -> Self {
        FunmConfig {
            rho: 2.0,
            node_count: 16,
            scalar_digits: 30,
            real_spectrum_tol: 1e-8,
            degenerate_delta_tol: 1e-8,
            taylor_degree: 16,
            min_node_radius: 1e-3,
            origin: None,
            mode: Mode::Standard,
        }
    }
}

impl FunmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad(alloc::format!("rho must be positive, got {}", self.rho));
        }
        if self.node_count < 2 {
            return bad(alloc::format!("need at least 2 nodes, got {}", self.node_count));
        }
        if self.scalar_digits < 20 {
            return bad(alloc::format!("scalar digits must be at least 20, got {}", self.scalar_digits));
        }
        if !(self.min_node_radius > 0.0) || !(self.degenerate_delta_tol >= 0.0) || !(self.real_spectrum_tol >= 0.0) {
            return bad("tolerances must be nonnegative and the node radius positive".into());
        }
        Ok(())
    }
}

/// Monotonic nanosecond clock; the core library has no time source of its
/// own.
pub trait Clock {
    fn now_ns(&self) -> u64;
}

/// Reads zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_ns(&self) -> u64 {
        0
    }
}

/// Wall time per pipeline phase, in nanoseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimes {
    pub schur: u64,
    pub partition: u64,
    pub diagonal: u64,
    pub superdiagonal: u64,
    pub fill: u64,
    pub back_transform: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FunmReport {
    pub n: usize,
    pub block_sizes: Vec<usize>,
    /// Matrix products spent on the two main block diagonals.
    pub mul_count: usize,
    pub schur_residual: f64,
    pub schur_swaps: usize,
    pub taylor_blocks: usize,
    /// Largest digit budget used for a scalar kernel.
    pub max_digits: u32,
    pub times: PhaseTimes,
    pub metrics: Option<ErrorMetrics>,
}

#[derive(Clone, Debug)]
pub struct FunmResult {
    /// `f(R)`
    pub f: CMatrix,
    /// `f(T)` in the Schur frame.
    pub f_schur: CMatrix,
    pub schur: SchurForm,
    pub partition: BlockPartition,
    pub report: FunmReport,
}

/// Decimal digits lost to cancellation in divided differences of order
/// `count − 1` on nodes of half-width `eta < 1`.
fn narrow_digits(eta: &XScalar, count: usize) -> u32 {
    let e = eta.to_f64();
    if e >= 1.0 {
        0
    } else {
        ((count - 1) as f64 * (1.0 / e).log10()).ceil() as u32
    }
}

fn node_radius(info: &BlockInfo, cfg: &FunmConfig) -> XScalar {
    let floor = XScalar::from_f64(cfg.min_node_radius, info.delta.digits());
    if info.delta > floor {
        info.delta.clone()
    } else {
        floor
    }
}

/// Digit budget for a diagonal block and for the superdiagonal block to its
/// right.
fn block_digits(info: &BlockInfo, cfg: &FunmConfig) -> u32 {
    cfg.scalar_digits + narrow_digits(&node_radius(info, cfg), cfg.node_count)
}

fn is_degenerate(info: &BlockInfo, cfg: &FunmConfig) -> bool {
    info.delta.to_f64() < cfg.degenerate_delta_tol
}

/// Chebyshev nodes on `[−1, 1]`, scaled per block.
pub fn unit_nodes(count: usize, digits: u32) -> NodeSet {
    chebyshev_nodes(count, &XScalar::from_i64(-1, digits), &XScalar::one(digits), digits)
}

fn nodes_for(z: &NodeSet, eta: &XScalar, digits: u32) -> NodeSet {
    let z = if z.digits() >= digits {
        z.with_digits(digits)
    } else {
        unit_nodes(z.len(), digits)
    };
    z.scaled(&eta.with_digits(digits))
}

/// `T_kk − γI`, with the diagonal subtraction done in extended precision.
fn shifted(tkk: &CMatrix, gamma: &XScalar) -> CMatrix {
    let mut a = tkk.clone();
    for i in 0..a.rows() {
        let d = XScalar::from_f64(tkk[(i, i)].re, gamma.digits()) - gamma;
        a[(i, i)] = C64::new(d.to_f64(), tkk[(i, i)].im);
    }
    a
}

/// `F_kk = f(T_kk) ≈ p(T_kk − γ_k I)` where `p` interpolates
/// `λ ↦ f(λ + γ_k)` at Chebyshev nodes, or is the Taylor polynomial at `γ_k`
/// for blocks whose spectrum is (nearly) a single point.
pub fn diag_block(
    f: &dyn AnalyticFunction,
    tkk: &CMatrix,
    info: &BlockInfo,
    z: &NodeSet,
    cfg: &FunmConfig,
    ctr: &MulCounter,
) -> Result<CMatrix> {
    tkk.check_upper_triangular()?;
    if is_degenerate(info, cfg) {
        let gamma = info.gamma.with_digits(cfg.scalar_digits);
        let p = taylor_coeffs(f, &gamma, cfg.taylor_degree)?;
        return ps_eval(&p, &shifted(tkk, &gamma), None, ctr);
    }
    let digits = block_digits(info, cfg);
    let gamma = info.gamma.with_digits(digits);
    let nodes = nodes_for(z, &node_radius(info, cfg), digits);
    let values = nodes.nodes.iter().map(|l| f.eval(&(l + &gamma))).collect::<Result<Vec<_>>>()?;
    let p = newton_to_monomial(&nodes, &divided_differences(&nodes, &values)?);
    ps_eval(&p, &shifted(tkk, &gamma), None, ctr)
}

/// Grid `h(λ_i, μ_j) = f^[1](λ_i + γ_k, μ_j + γ_l)`, reusing the function
/// values along rows and columns.
fn divdiff_grid(f: &dyn AnalyticFunction, xs: &[XScalar], ys: &[XScalar]) -> Result<XMatrix> {
    let digits = xs[0].digits();
    let near = XScalar::one(digits).mul_pow2(-((digits as f64 * 3.33) as i64 / 2));
    let fx = xs.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let fy = ys.iter().map(|y| f.eval(y)).collect::<Result<Vec<_>>>()?;
    let mut grid = XMatrix::zeros(xs.len(), ys.len(), digits);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let h = x - y;
            grid[(i, j)] = if h.abs() > near { (&fx[i] - &fy[j]).div(&h)? } else { scalar_divdiff(f, x, y)? };
        }
    }
    Ok(grid)
}

/// `F_{k,k+1} = f^[1](T_kk, T_{k+1,k+1}) ◇ T_{k,k+1}`, approximated by
/// `p(A, B) ◇ H` with the bivariate interpolant of the shifted divided
/// difference.
#[allow(clippy::too_many_arguments)]
pub fn superdiag_block(
    f: &dyn AnalyticFunction,
    tkk: &CMatrix,
    tll: &CMatrix,
    h: &CMatrix,
    ik: &BlockInfo,
    il: &BlockInfo,
    z: &NodeSet,
    cfg: &FunmConfig,
    ctr: &MulCounter,
) -> Result<CMatrix> {
    if h.rows() != tkk.rows() || h.cols() != tll.rows() {
        return Err(Error::DimensionMismatch { op: "superdiag_block", left: (tkk.rows(), tll.rows()), right: h.shape() });
    }
    if h.as_slice().iter().all(|x| *x == C64::new(0.0, 0.0)) {
        return Ok(CMatrix::zeros(h.rows(), h.cols()));
    }
    let eta_k = node_radius(ik, cfg);
    let eta_l = node_radius(il, cfg);
    let digits =
        cfg.scalar_digits + narrow_digits(&eta_k, cfg.node_count) + narrow_digits(&eta_l, cfg.node_count);
    let gk = ik.gamma.with_digits(digits);
    let gl = il.gamma.with_digits(digits);
    let lambda = nodes_for(z, &eta_k, digits);
    let mu = nodes_for(z, &eta_l, digits);
    let xs: Vec<XScalar> = lambda.nodes.iter().map(|l| l + &gk).collect();
    let ys: Vec<XScalar> = mu.nodes.iter().map(|m| m + &gl).collect();
    let grid = divdiff_grid(f, &xs, &ys)?;
    let p = bivariate_interpolation(&grid, &lambda, &mu)?;
    bivariate_apply(&p, &shifted(tkk, &gk), h, &shifted(tll, &gl), ctr)
}

/// Fills the entries of `F` outside the two main block diagonals by the
/// scalar Parlett recurrence, one scalar superdiagonal at a time.
pub fn parlett_fill(t: &CMatrix, f: &mut CMatrix, partition: &BlockPartition) -> Result<()> {
    let n = t.rows();
    let floor = partition.rho * (1.0 - 8.0 * f64::EPSILON);
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            if partition.in_two_main_block_diagonals(i, j) {
                continue;
            }
            let den = t[(j, j)] - t[(i, i)];
            if den.norm() < floor {
                return Err(Error::Internal(alloc::format!(
                    "Parlett denominator |t_jj - t_ii| = {:e} below rho at ({i}, {j})",
                    den.norm()
                )));
            }
            let mut num = t[(i, j)] * (f[(j, j)] - f[(i, i)]);
            for k in i + 1..j {
                num += t[(i, k)] * f[(k, j)] - f[(i, k)] * t[(k, j)];
            }
            f[(i, j)] = num / den;
        }
    }
    Ok(())
}

fn union_info(a: &BlockInfo, b: &BlockInfo) -> BlockInfo {
    let gamma = (&a.alpha + &b.beta).mul_pow2(-1);
    let delta = (&b.beta - &a.alpha).mul_pow2(-1);
    BlockInfo { start: a.start, end: b.end, interval: a.interval, alpha: a.alpha.clone(), beta: b.beta.clone(), gamma, delta }
}

/// The two main block diagonals of `f(T)`.
fn block_diagonals(
    f: &dyn AnalyticFunction,
    t: &CMatrix,
    part: &BlockPartition,
    cfg: &FunmConfig,
    ctr: &MulCounter,
    clock: &dyn Clock,
    report: &mut FunmReport,
) -> Result<CMatrix> {
    let n = t.rows();
    let blocks = &part.blocks;
    let mut out = CMatrix::zeros(n, n);
    let sub = |b: &BlockInfo, c: &BlockInfo| t.block(b.start, b.end, c.start, c.end);
    match cfg.mode {
        Mode::Standard => {
            let mut digits = cfg.scalar_digits;
            for w in blocks.windows(2) {
                digits = digits.max(block_digits(&w[0], cfg) + block_digits(&w[1], cfg) - cfg.scalar_digits);
            }
            for b in blocks {
                digits = digits.max(block_digits(b, cfg));
            }
            report.max_digits = digits;
            let z = unit_nodes(cfg.node_count, digits);
            let t0 = clock.now_ns();
            for b in blocks {
                if is_degenerate(b, cfg) {
                    report.taylor_blocks += 1;
                }
                out.set_block(b.start, b.start, &diag_block(f, &sub(b, b), b, &z, cfg, ctr)?);
            }
            let t1 = clock.now_ns();
            for w in blocks.windows(2) {
                let (k, l) = (&w[0], &w[1]);
                let fkl = superdiag_block(f, &sub(k, k), &sub(l, l), &sub(k, l), k, l, &z, cfg, ctr)?;
                out.set_block(k.start, l.start, &fkl);
            }
            report.times.diagonal = t1 - t0;
            report.times.superdiagonal = clock.now_ns() - t1;
        }
        Mode::DoubleBlock => {
            let t0 = clock.now_ns();
            if blocks.len() == 1 {
                let b = &blocks[0];
                let digits = block_digits(b, cfg);
                report.max_digits = digits;
                report.taylor_blocks += usize::from(is_degenerate(b, cfg));
                let z = unit_nodes(cfg.node_count, digits);
                out.set_block(0, 0, &diag_block(f, t, b, &z, cfg, ctr)?);
            }
            for (idx, w) in blocks.windows(2).enumerate() {
                let u = union_info(&w[0], &w[1]);
                let digits = block_digits(&u, cfg);
                report.max_digits = report.max_digits.max(digits);
                report.taylor_blocks += usize::from(is_degenerate(&u, cfg));
                let z = unit_nodes(cfg.node_count, digits);
                let fu = diag_block(f, &sub(&u, &u), &u, &z, cfg, ctr)?;
                // the upper diagonal block was already supplied by the
                // previous pair
                let split = w[1].start - u.start;
                for i in 0..fu.rows() {
                    let j0 = if idx > 0 && i < split { split } else { i };
                    for j in j0..fu.cols() {
                        out[(u.start + i, u.start + j)] = fu[(i, j)];
                    }
                }
            }
            report.times.diagonal = clock.now_ns() - t0;
        }
    }
    Ok(out)
}

/// `f(R)` with the default clock.
pub fn funm(r: &CMatrix, f: &dyn AnalyticFunction, cfg: &FunmConfig) -> Result<FunmResult> {
    funm_with_clock(r, f, cfg, &NoClock)
}

pub fn funm_with_clock(r: &CMatrix, f: &dyn AnalyticFunction, cfg: &FunmConfig, clock: &dyn Clock) -> Result<FunmResult> {
    cfg.validate()?;
    let n = r.require_square()?;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let mut report = FunmReport { n, ..FunmReport::default() };
    let t0 = clock.now_ns();
    let schur = schur_ascending(r, cfg.real_spectrum_tol)?;
    report.schur_residual = schur.residual;
    report.schur_swaps = schur.swaps;
    let t1 = clock.now_ns();
    let diag: Vec<f64> = schur.t.diagonal().iter().map(|z| z.re).collect();
    let origin = cfg.origin.unwrap_or(diag[0]);
    let partition = build_partition_with_origin(&diag, cfg.rho, origin, cfg.scalar_digits)?;
    report.block_sizes = partition.blocks.iter().map(BlockInfo::len).collect();
    let t2 = clock.now_ns();
    report.times.schur = t1 - t0;
    report.times.partition = t2 - t1;

    let ctr = MulCounter::new();
    let mut ft = block_diagonals(f, &schur.t, &partition, cfg, &ctr, clock, &mut report)?;
    report.mul_count = ctr.count();
    let t3 = clock.now_ns();
    parlett_fill(&schur.t, &mut ft, &partition)?;
    let t4 = clock.now_ns();
    report.times.fill = t4 - t3;

    let fr = if schur.q == CMatrix::identity(n) {
        ft.clone()
    } else {
        let side = MulCounter::new();
        matmul(&matmul(&schur.q, &ft, &side)?, &schur.q.adjoint(), &side)?
    };
    report.times.back_transform = clock.now_ns() - t4;
    Ok(FunmResult { f: fr, f_schur: ft, schur, partition, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hiprec::x_exp;
    use crate::partition::build_partition;
    use crate::scalarfun::Catalog;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn info(diag: &[f64]) -> BlockInfo {
        build_partition(diag, 100.0, 30).unwrap().blocks[0].clone()
    }

    #[test]
    fn config_validation() {
        assert!(FunmConfig::default().validate().is_ok());
        assert!(FunmConfig { rho: 0.0, ..FunmConfig::default() }.validate().is_err());
        assert!(FunmConfig { node_count: 1, ..FunmConfig::default() }.validate().is_err());
        assert!(FunmConfig { scalar_digits: 19, ..FunmConfig::default() }.validate().is_err());
    }

    #[test]
    fn one_by_one_block() {
        let cfg = FunmConfig::default();
        let z = unit_nodes(16, 30);
        let x = -0.731;
        let out = diag_block(&Catalog::Exp, &CMatrix::diag(&[c(x)]), &info(&[x]), &z, &cfg, &MulCounter::new()).unwrap();
        assert!((out[(0, 0)].re - x.exp()).abs() <= f64::EPSILON * x.exp());
    }

    #[test]
    fn jordan_block_uses_taylor() {
        let g = -1.3;
        let t = CMatrix::from_fn(2, 2, |i, j| if i == j { c(g) } else if i < j { c(1.0) } else { c(0.0) });
        let cfg = FunmConfig::default();
        let out = diag_block(&Catalog::Exp, &t, &info(&[g, g]), &unit_nodes(16, 30), &cfg, &MulCounter::new()).unwrap();
        let e = g.exp();
        for (i, j, w) in [(0, 0, e), (0, 1, e), (1, 1, e)] {
            assert!((out[(i, j)].re - w).abs() <= 1e-14 * e);
        }
        assert_eq!(out[(1, 0)], c(0.0));
    }

    #[test]
    fn scalar_superdiagonal_block() {
        let (x, y, h) = (-2.6, -0.4, 0.9);
        let cfg = FunmConfig::default();
        let part = build_partition(&[x, y], 2.0, 30).unwrap();
        let (ik, il) = (&part.blocks[0], &part.blocks[1]);
        let out = superdiag_block(
            &Catalog::Exp,
            &CMatrix::diag(&[c(x)]),
            &CMatrix::diag(&[c(y)]),
            &CMatrix::diag(&[c(h)]),
            ik,
            il,
            &unit_nodes(16, 30),
            &cfg,
            &MulCounter::new(),
        )
        .unwrap();
        let want = h * (x.exp() - y.exp()) / (x - y);
        assert!((out[(0, 0)].re - want).abs() <= 1e-13 * want.abs());
        let zero = superdiag_block(
            &Catalog::Exp,
            &CMatrix::diag(&[c(x)]),
            &CMatrix::diag(&[c(y)]),
            &CMatrix::zeros(1, 1),
            ik,
            il,
            &unit_nodes(16, 30),
            &cfg,
            &MulCounter::new(),
        )
        .unwrap();
        assert_eq!(zero, CMatrix::zeros(1, 1));
    }

    /// `f(T)` of a 3×3 upper triangular matrix with distinct eigenvalues by
    /// eigen-decomposition, at 40 digits.
    fn diagonalization_oracle(t: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let d = 40;
        let x = |v: f64| XScalar::from_f64(v, d);
        let lam: Vec<XScalar> = (0..3).map(|i| x(t[i][i])).collect();
        // eigenvectors of an upper triangular matrix: columns of a unit upper S
        let mut s = XMatrix::identity(3, d);
        for j in 0..3 {
            for i in (0..j).rev() {
                let mut acc = XScalar::zero(d);
                for k in i + 1..=j {
                    acc = acc + &x(t[i][k]) * &s[(k, j)];
                }
                s[(i, j)] = acc.div(&(&lam[j] - &lam[i])).unwrap();
            }
        }
        let inv = crate::la::unit_upper_inverse_hp(&s).unwrap();
        let fd = XMatrix::from_fn(3, 3, |i, j| if i == j { x_exp(&lam[i]) } else { XScalar::zero(d) });
        let out = s.mul(&fd).unwrap().mul(&inv).unwrap();
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = out[(i, j)].to_f64();
            }
        }
        r
    }

    #[test]
    fn parlett_three_by_three() {
        let t = [[0.0, 1.0, 1.0], [0.0, 2.5, 1.0], [0.0, 0.0, 5.0]];
        let tm = CMatrix::from_fn(3, 3, |i, j| c(t[i][j]));
        let oracle = diagonalization_oracle(&t);
        let part = build_partition(&[0.0, 2.5, 5.0], 2.0, 30).unwrap();
        assert_eq!(part.n_blocks(), 3);
        let mut f = CMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in i..3 {
                if part.in_two_main_block_diagonals(i, j) {
                    f[(i, j)] = c(oracle[i][j]);
                }
            }
        }
        parlett_fill(&tm, &mut f, &part).unwrap();
        assert!((f[(0, 2)].re - oracle[0][2]).abs() <= 1e-12 * oracle[0][2].abs());
    }

    #[test]
    fn parlett_fill_edge_cases() {
        let t = CMatrix::from_fn(3, 3, |i, j| if i == j { c(3.0 * i as f64) } else { c(0.0) });
        let part = build_partition(&[0.0, 3.0, 6.0], 2.0, 30).unwrap();
        let mut f = CMatrix::diag(&[c(1.0), c(2.0), c(3.0)]);
        parlett_fill(&t, &mut f, &part).unwrap();
        assert_eq!(f[(0, 2)], c(0.0));
        let two = build_partition(&[0.0, 3.0], 2.0, 30).unwrap();
        let t2 = CMatrix::from_fn(2, 2, |i, j| if i <= j { c(1.0 + i as f64) } else { c(0.0) });
        let mut f2 = CMatrix::diag(&[c(4.0), c(5.0)]);
        parlett_fill(&t2, &mut f2, &two).unwrap();
        assert_eq!(f2, CMatrix::diag(&[c(4.0), c(5.0)]));
        // a partition that does not match T trips the denominator check
        let mut g = CMatrix::zeros(3, 3);
        let close = CMatrix::diag(&[c(0.0), c(0.5), c(1.0)]);
        assert!(matches!(parlett_fill(&close, &mut g, &part), Err(Error::Internal(_))));
    }

    fn random_triangular(diag: &[f64], seed: u64, scale: f64) -> CMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = diag.len();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(diag[i])
            } else if i < j {
                c(rng.random_range(-scale..scale))
            } else {
                c(0.0)
            }
        })
    }

    #[test]
    fn identity_function_reproduces_input() {
        let r = random_triangular(&[-5.0, -4.2, -1.0, 0.3, 2.0, 4.5], 3, 1.0);
        let out = funm(&r, &Catalog::Identity, &FunmConfig::default()).unwrap();
        let tol = 1e-12 * crate::la::max_abs(&r);
        assert!(out.f.max_abs_diff(&r) <= tol);
    }

    #[test]
    fn diagonal_input() {
        let d = [-9.5, -5.0, -0.5];
        let r = CMatrix::diag(&d.iter().map(|&v| c(v)).collect::<Vec<_>>());
        let out = funm(&r, &Catalog::Exp, &FunmConfig::default()).unwrap();
        for (i, v) in d.iter().enumerate() {
            assert!((out.f[(i, i)].re - v.exp()).abs() <= 1e-15 * v.exp());
        }
        assert_eq!(out.partition.n_blocks(), 3);
    }

    #[test]
    fn modes_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let mut d: Vec<f64> = (0..10).map(|_| rng.random_range(-6.0..0.0)).collect();
        d.sort_by(f64::total_cmp);
        let r = random_triangular(&d, 22, 0.5);
        let a = funm(&r, &Catalog::Exp, &FunmConfig::default()).unwrap();
        let b = funm(&r, &Catalog::Exp, &FunmConfig { mode: Mode::DoubleBlock, ..FunmConfig::default() }).unwrap();
        assert!(a.f.max_abs_diff(&b.f) <= 1e-9, "{}", a.f.max_abs_diff(&b.f));
    }

    #[test]
    fn report_counts() {
        let mut d: Vec<f64> = (0..12).map(|i| -5.5 + 0.45 * i as f64).collect();
        d.sort_by(f64::total_cmp);
        let r = random_triangular(&d, 5, 0.5);
        let out = funm(&r, &Catalog::Exp, &FunmConfig::default()).unwrap();
        let nb = out.partition.n_blocks();
        assert_eq!(out.report.block_sizes.iter().sum::<usize>(), 12);
        assert_eq!(out.report.mul_count, 6 * nb + 82 * (nb - 1));
        assert!(out.report.max_digits >= 30);
    }

    #[test]
    fn modes_against_reference() {
        let spec = crate::harness::ExperimentSpec { n: 12, n_blocks: 3, gen_digits: 40, seed: 1, ..Default::default() };
        let inst = crate::harness::gen_instance(&spec, 0).unwrap();
        for mode in [Mode::Standard, Mode::DoubleBlock] {
            let cfg = FunmConfig { mode, origin: Some(spec.origin()), ..FunmConfig::default() };
            let out = funm(&inst.t, &Catalog::Exp, &cfg).unwrap();
            assert_eq!(out.report.block_sizes, inst.block_sizes);
            let m = crate::harness::metrics(&out.f, &inst.f_ref, &out.partition).unwrap();
            assert!(m.err_max <= 1e-12 * m.norm_max_ref, "{mode:?}: {}", m.err_max);
        }
    }

    #[test]
    fn complex_spectrum_is_rejected() {
        let r = CMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(funm(&r, &Catalog::Exp, &FunmConfig::default()), Err(Error::RealSpectrumViolation { .. })));
    }
}
