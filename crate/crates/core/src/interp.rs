//! Chebyshev nodes, divided differences and Newton-form interpolation in
//! extended precision, for one and two variables.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hiprec::{x_pi, x_sin_cos, XScalar};
use crate::la::XMatrix;
use crate::scalarfun::AnalyticFunction;

/// Ordered interpolation nodes together with the segment they live on.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    pub nodes: Vec<XScalar>,
    pub lo: XScalar,
    pub hi: XScalar,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn digits(&self) -> u32 {
        self.lo.digits()
    }

    pub fn with_digits(&self, digits: u32) -> NodeSet {
        NodeSet {
            nodes: self.nodes.iter().map(|z| z.with_digits(digits)).collect(),
            lo: self.lo.with_digits(digits),
            hi: self.hi.with_digits(digits),
        }
    }

    /// Nodes `scale * z` on `[scale*lo, scale*hi]`, for `scale > 0`.
    pub fn scaled(&self, scale: &XScalar) -> NodeSet {
        NodeSet {
            nodes: self.nodes.iter().map(|z| z * scale).collect(),
            lo: &self.lo * scale,
            hi: &self.hi * scale,
        }
    }

    /// Fails with the first pair of equal nodes.
    pub fn check_distinct(&self) -> Result<()> {
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                if self.nodes[i] == self.nodes[j] {
                    return Err(Error::CoincidentNodes { first: i, second: j });
                }
            }
        }
        Ok(())
    }
}

/// `λ_i = (lo+hi)/2 + (hi-lo)/2 · cos((2i-1)π/(2m))`, `i = 1..m`, descending.
///
/// Mirror-image nodes are formed by negating the cosine, so on a symmetric
/// segment the node set is closed under negation exactly.
pub fn chebyshev_nodes(count: usize, lo: &XScalar, hi: &XScalar, digits: u32) -> NodeSet {
    assert!(count >= 1, "at least one node");
    let lo = lo.with_digits(digits.max(lo.digits()));
    let hi = hi.with_digits(digits.max(hi.digits()));
    let d = lo.digits();
    let mid = (&lo + &hi).mul_pow2(-1);
    let half = (&hi - &lo).mul_pow2(-1);
    let pi = x_pi(d + 4);
    let mut cosines = alloc::vec![XScalar::zero(d); count];
    for i in 0..count / 2 {
        let theta = pi.mul_i64(2 * i as i64 + 1).div_i64(2 * count as i64);
        let c = x_sin_cos(&theta).1.with_digits(d);
        cosines[count - 1 - i] = -&c;
        cosines[i] = c;
    }
    let nodes = cosines.iter().map(|c| &mid + &(&half * c)).collect();
    NodeSet { nodes, lo, hi }
}

/// `(1/m) Σ cot((2i-1)π/(4m))`.
pub fn lebesgue_constant(count: usize, digits: u32) -> XScalar {
    assert!(count >= 1);
    let wd = digits + 4;
    let pi = x_pi(wd);
    let mut sum = XScalar::zero(wd);
    for i in 1..=count as i64 {
        let theta = pi.mul_i64(2 * i - 1).div_i64(4 * count as i64);
        let (s, c) = x_sin_cos(&theta);
        sum = sum + c.div(&s).expect("nonzero sine");
    }
    sum.div_i64(count as i64).with_digits(digits)
}

/// First column `f_1^1, f_1^2, …, f_1^m` of the divided-difference table.
pub fn divided_differences(nodes: &NodeSet, values: &[XScalar]) -> Result<Vec<XScalar>> {
    if nodes.len() != values.len() {
        return Err(Error::DimensionMismatch {
            op: "divided_differences",
            left: (nodes.len(), 1),
            right: (values.len(), 1),
        });
    }
    nodes.check_distinct()?;
    Ok(divided_differences_unchecked(&nodes.nodes, values))
}

fn divided_differences_unchecked(z: &[XScalar], values: &[XScalar]) -> Vec<XScalar> {
    let mut c = values.to_vec();
    let n = c.len();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &c[i] - &c[i - 1];
            let den = &z[i] - &z[i - j];
            c[i] = num.div(&den).expect("distinct nodes");
        }
    }
    c
}

/// Polynomial in ascending powers, coefficients in extended precision.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialPoly {
    coeffs: Vec<XScalar>,
}

impl MonomialPoly {
    pub fn new(coeffs: Vec<XScalar>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial has at least one coefficient");
        MonomialPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[XScalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients rounded to working precision.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(XScalar::to_f64).collect()
    }

    pub fn eval(&self, x: &XScalar) -> XScalar {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &acc * x + c;
        }
        acc
    }
}

/// Evaluates `c_0 + c_1 (x - z_1) + … + c_{m-1} (x - z_1)…(x - z_{m-1})`.
pub fn newton_eval(centers: &[XScalar], coeffs: &[XScalar], x: &XScalar) -> XScalar {
    let m = coeffs.len();
    let mut acc = coeffs[m - 1].clone();
    for k in (0..m - 1).rev() {
        acc = &acc * &(x - &centers[k]) + &coeffs[k];
    }
    acc
}

/// Expands the Newton form into powers of λ by repeated multiplication by
/// `(λ - z_k)`; the last center is unused.
pub fn newton_to_monomial(centers: &NodeSet, newton_coeffs: &[XScalar]) -> MonomialPoly {
    MonomialPoly::new(expand_newton(&centers.nodes, newton_coeffs))
}

fn expand_newton(z: &[XScalar], c: &[XScalar]) -> Vec<XScalar> {
    let m = c.len();
    assert!(m >= 1 && z.len() + 1 >= m, "need at least m-1 centers");
    let mut p = alloc::vec![c[m - 1].clone()];
    for k in (0..m - 1).rev() {
        // p <- p·(λ - z_k) + c_k
        let mut next = alloc::vec![XScalar::zero(c[k].digits()); p.len() + 1];
        for (i, pi) in p.iter().enumerate() {
            next[i + 1] = &next[i + 1] + pi;
            next[i] = &next[i] - &(pi * &z[k]);
        }
        next[0] = &next[0] + &c[k];
        p = next;
    }
    p
}

/// `f^[1](x, y)`: the difference quotient, or near the diagonal the
/// derivative at the midpoint with its second-order correction
/// `f'(m) + f'''(m)(x-y)²/24`.
///
/// The switch happens when `|x - y| ≤ 10^(-digits/2)`, where the quotient
/// would already have lost half its digits.
pub fn scalar_divdiff(f: &dyn AnalyticFunction, x: &XScalar, y: &XScalar) -> Result<XScalar> {
    let digits = x.digits().max(y.digits());
    let h = x - y;
    let threshold = XScalar::parse("1", digits)?.div(&pow10(digits / 2, digits))?;
    if h.abs() > threshold {
        return (f.eval(x)? - f.eval(y)?).div(&h);
    }
    let m = (x + y).mul_pow2(-1);
    let d1 = f.deriv(&m, 1)?;
    if h.is_zero() {
        return Ok(d1);
    }
    let d3 = f.deriv(&m, 3)?;
    Ok(d1 + (&d3 * &(&h * &h)).div_i64(24))
}

fn pow10(k: u32, digits: u32) -> XScalar {
    let ten = XScalar::from_i64(10, digits);
    let mut p = XScalar::one(digits);
    for _ in 0..k {
        p = &p * &ten;
    }
    p
}

/// `p(λ, μ) = Σ c_ij λ^i μ^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly {
    coeffs: XMatrix,
}

impl BivariatePoly {
    pub fn new(coeffs: XMatrix) -> Self {
        BivariatePoly { coeffs }
    }

    pub fn coeffs(&self) -> &XMatrix {
        &self.coeffs
    }

    /// `(m̂₁, m̂₂)`
    pub fn shape(&self) -> (usize, usize) {
        (self.coeffs.rows(), self.coeffs.cols())
    }

    pub fn coeff(&self, i: usize, j: usize) -> &XScalar {
        &self.coeffs[(i, j)]
    }

    pub fn eval(&self, lambda: &XScalar, mu: &XScalar) -> XScalar {
        let (m1, m2) = self.shape();
        let mut acc = XScalar::zero(lambda.digits());
        for i in (0..m1).rev() {
            let mut row = self.coeffs[(i, m2 - 1)].clone();
            for j in (0..m2 - 1).rev() {
                row = &row * mu + &self.coeffs[(i, j)];
            }
            acc = &acc * lambda + &row;
        }
        acc
    }
}

/// Interpolates grid values `h(λ_i, μ_j)` on a tensor product of node sets.
///
/// Each column is first turned into a Newton polynomial in λ; each row of
/// the resulting coefficient table is then differenced over the μ nodes.
/// The doubly-Newton form is finally expanded into powers of λ and μ.
pub fn bivariate_interpolation(grid: &XMatrix, lambda: &NodeSet, mu: &NodeSet) -> Result<BivariatePoly> {
    let (m1, m2) = (lambda.len(), mu.len());
    if grid.rows() != m1 || grid.cols() != m2 {
        return Err(Error::DimensionMismatch {
            op: "bivariate_interpolation",
            left: (grid.rows(), grid.cols()),
            right: (m1, m2),
        });
    }
    lambda.check_distinct()?;
    mu.check_distinct()?;
    // d[i][j]: Newton coefficients in λ of column j
    let mut d = XMatrix::zeros(m1, m2, grid[(0, 0)].digits());
    for j in 0..m2 {
        let col: Vec<XScalar> = (0..m1).map(|i| grid[(i, j)].clone()).collect();
        for (i, v) in divided_differences_unchecked(&lambda.nodes, &col).into_iter().enumerate() {
            d[(i, j)] = v;
        }
    }
    // e[i][l]: Newton coefficients in μ of row i
    let mut e = d.clone();
    for i in 0..m1 {
        let row: Vec<XScalar> = (0..m2).map(|j| d[(i, j)].clone()).collect();
        for (l, v) in divided_differences_unchecked(&mu.nodes, &row).into_iter().enumerate() {
            e[(i, l)] = v;
        }
    }
    // expand in λ column by column, then in μ row by row
    let mut u = e.clone();
    for l in 0..m2 {
        let col: Vec<XScalar> = (0..m1).map(|i| e[(i, l)].clone()).collect();
        for (a, v) in expand_newton(&lambda.nodes, &col).into_iter().enumerate() {
            u[(a, l)] = v;
        }
    }
    let mut c = u.clone();
    for a in 0..m1 {
        let row: Vec<XScalar> = (0..m2).map(|l| u[(a, l)].clone()).collect();
        for (b, v) in expand_newton(&mu.nodes, &row).into_iter().enumerate() {
            c[(a, b)] = v;
        }
    }
    Ok(BivariatePoly::new(c))
}

/// The same interpolant built with the roles of λ and μ exchanged.
pub fn bivariate_interpolation_row_first(
    grid: &XMatrix,
    lambda: &NodeSet,
    mu: &NodeSet,
) -> Result<BivariatePoly> {
    let t = XMatrix::from_fn(grid.cols(), grid.rows(), |i, j| grid[(j, i)].clone());
    let p = bivariate_interpolation(&t, mu, lambda)?;
    let c = p.coeffs();
    Ok(BivariatePoly::new(XMatrix::from_fn(c.cols(), c.rows(), |i, j| c[(j, i)].clone())))
}
