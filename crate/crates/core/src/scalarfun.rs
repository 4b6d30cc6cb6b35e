//! Analytic scalar functions evaluated in extended precision.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hiprec::{x_exp, x_sin_cos, XScalar};
use crate::interp::MonomialPoly;

/// Highest derivative order the pipeline asks for.
pub const MAX_DERIVATIVE_ORDER: u32 = 32;

/// A function analytic near the real spectrum, with closed-form derivatives.
///
/// Implementors evaluate at the argument's precision. The catalog below is
/// not closed: any type implementing this trait can be passed to the
/// pipeline.
pub trait AnalyticFunction: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, x: &XScalar) -> Result<XScalar>;

    /// k-th derivative, `k <= MAX_DERIVATIVE_ORDER`.
    fn deriv(&self, x: &XScalar, k: u32) -> Result<XScalar>;
}

/// Built-in functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Catalog {
    Exp,
    Cos,
    Sin,
    /// `x ↦ e^{t x}`
    ExpT(XScalar),
    Identity,
}

fn check_order(k: u32) -> Result<()> {
    if k > MAX_DERIVATIVE_ORDER {
        Err(Error::DerivativeOrder { order: k, max: MAX_DERIVATIVE_ORDER })
    } else {
        Ok(())
    }
}

impl AnalyticFunction for Catalog {
    fn name(&self) -> String {
        match self {
            Catalog::Exp => "exp".into(),
            Catalog::Cos => "cos".into(),
            Catalog::Sin => "sin".into(),
            Catalog::ExpT(t) => alloc::format!("exp_t:{}", t.to_f64()),
            Catalog::Identity => "identity".into(),
        }
    }

    fn eval(&self, x: &XScalar) -> Result<XScalar> {
        self.deriv(x, 0)
    }

    fn deriv(&self, x: &XScalar, k: u32) -> Result<XScalar> {
        check_order(k)?;
        let d = x.digits();
        Ok(match self {
            Catalog::Exp => x_exp(x),
            Catalog::Cos | Catalog::Sin => {
                let (s, c) = x_sin_cos(x);
                // sin' = cos, cos' = -sin
                let phase = if matches!(self, Catalog::Sin) { k } else { k + 1 };
                match phase % 4 {
                    0 => s,
                    1 => c,
                    2 => -s,
                    _ => -c,
                }
            }
            Catalog::ExpT(t) => {
                let t = t.with_digits(d.max(t.digits()));
                let mut tk = XScalar::one(d);
                for _ in 0..k {
                    tk = &tk * &t;
                }
                &tk * &x_exp(&(&t * x))
            }
            Catalog::Identity => match k {
                0 => x.clone(),
                1 => XScalar::one(d),
                _ => XScalar::zero(d),
            },
        })
    }
}

/// Looks up `exp | cos | sin | exp_t:<t> | identity`.
pub fn catalog_get(name: &str, digits: u32) -> Result<Catalog> {
    let name = name.trim();
    match name {
        "exp" => Ok(Catalog::Exp),
        "cos" => Ok(Catalog::Cos),
        "sin" => Ok(Catalog::Sin),
        "identity" => Ok(Catalog::Identity),
        _ => {
            if let Some(t) = name.strip_prefix("exp_t:") {
                let t = XScalar::parse(t, digits).map_err(|_| Error::UnknownFunction(name.to_string()))?;
                Ok(Catalog::ExpT(t))
            } else {
                Err(Error::UnknownFunction(name.to_string()))
            }
        }
    }
}

/// Boxed catalog entry, convenient for dynamic dispatch in drivers.
pub fn catalog_boxed(name: &str, digits: u32) -> Result<Box<dyn AnalyticFunction>> {
    Ok(Box::new(catalog_get(name, digits)?))
}

/// Taylor coefficients `f^(i)(γ) / i!`, `i = 0..=degree`.
pub fn taylor_coeffs(f: &dyn AnalyticFunction, gamma: &XScalar, degree: u32) -> Result<MonomialPoly> {
    check_order(degree)?;
    let mut coeffs = Vec::with_capacity(degree as usize + 1);
    let mut fact = XScalar::one(gamma.digits());
    for i in 0..=degree {
        if i > 0 {
            fact = fact.mul_i64(i as i64);
        }
        coeffs.push(f.deriv(gamma, i)?.div(&fact)?);
    }
    Ok(MonomialPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: u32 = 30;

    #[test]
    fn catalog_basics() {
        let exp = catalog_get("exp", D).unwrap();
        assert_eq!(exp.eval(&XScalar::zero(D)).unwrap(), XScalar::one(D));
        let cos = catalog_get("cos", D).unwrap();
        assert_eq!(cos.deriv(&XScalar::zero(D), 2).unwrap(), XScalar::from_i64(-1, D));
        assert!(catalog_get("tan", D).is_err());
        assert!(exp.deriv(&XScalar::zero(D), 33).is_err());
    }

    #[test]
    fn exp_t_two_at_one() {
        let f = catalog_get("exp_t:2", D).unwrap();
        let e2 = f.eval(&XScalar::one(D)).unwrap();
        let oracle = x_exp(&XScalar::one(D + 10));
        let err = (&e2.with_digits(D + 10) - &(&oracle * &oracle)).abs();
        assert!(err.top() < -94);
        assert!(e2.to_string_digits(16).starts_with("7.38905609893065"));
        assert_eq!(f.name(), "exp_t:2");
    }

    #[test]
    fn taylor_of_exp_and_identity() {
        let p = taylor_coeffs(&Catalog::Exp, &XScalar::zero(D), 3).unwrap();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (c, w) in p.coeffs().iter().zip(want) {
            assert_eq!(c.to_f64(), w);
        }
        let g = XScalar::from_f64(-1.25, D);
        let p = taylor_coeffs(&Catalog::Identity, &g, 3).unwrap();
        assert_eq!(p.coeffs()[0], g);
        assert_eq!(p.coeffs()[1], XScalar::one(D));
        assert!(p.coeffs()[2].is_zero() && p.coeffs()[3].is_zero());
    }

    #[test]
    fn taylor_17_exp_error_on_unit_disk() {
        // the maximum over [-1, 1] sits at λ = 1
        let p = taylor_coeffs(&Catalog::Exp, &XScalar::zero(D), 17).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=200 {
            let x = XScalar::from_ratio(i - 100, 100, D);
            let e = (&x_exp(&x) - &p.eval(&x)).abs().to_f64();
            worst = worst.max(e);
        }
        assert!((worst - 1.65e-16).abs() < 0.01e-16, "{worst:e}");
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pythagorean_identity(a in -10.0f64..10.0) {
            let x = XScalar::from_f64(a, D);
            let (s, c) = x_sin_cos(&x);
            let one = &s * &s + &c * &c;
            prop_assert!((&one - &XScalar::one(D)).abs().top() < -95);
        }

        #[test]
        fn exp_t_is_exp_of_product(t in -3.0f64..3.0, a in -3.0f64..3.0) {
            let x = XScalar::from_f64(a, D);
            let tx = XScalar::from_f64(t, D);
            let lhs = Catalog::ExpT(tx.clone()).eval(&x).unwrap();
            let rhs = x_exp(&(&tx * &x));
            let rel = (&lhs - &rhs).abs().div(&rhs).unwrap();
            prop_assert!(rel.top() < -97);
        }

        #[test]
        fn first_derivative_matches_five_point_stencil(a in -5.0f64..5.0, which in 0usize..4) {
            let f = [Catalog::Exp, Catalog::Cos, Catalog::Sin, Catalog::ExpT(XScalar::from_f64(0.5, D))][which].clone();
            let x = XScalar::from_f64(a, D);
            let h = XScalar::parse("1e-6", D).unwrap();
            let at = |k: i64| f.eval(&(&x + &h.mul_i64(k))).unwrap();
            let fd = (at(-2) - at(-1).mul_i64(8) + at(1).mul_i64(8) - at(2)).div(&h.mul_i64(12)).unwrap();
            let d1 = f.deriv(&x, 1).unwrap();
            let scale = d1.abs().to_f64().max(1e-3);
            prop_assert!((&fd - &d1).abs().to_f64() <= 1e-9 * scale);
        }
    }
}
