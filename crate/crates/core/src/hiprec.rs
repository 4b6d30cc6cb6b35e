//! Extended-precision real scalars.
//!
//! An [`XScalar`] is a binary floating-point number whose mantissa length is
//! derived from a budget of significant *decimal* digits. Every arithmetic
//! operation rounds its exact result once, to nearest (ties to even), at the
//! larger of the operand precisions. Elementary functions evaluate with guard
//! digits and round at the argument's precision.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Smallest supported digit budget.
pub const MIN_DIGITS: u32 = 16;
/// Digit budget used for interpolation work unless configured otherwise.
pub const DEFAULT_DIGITS: u32 = 30;

const GUARD_DIGITS: u32 = 12;

/// Number of mantissa bits backing a budget of `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u64 {
    // ceil(digits * log2(10)) + 2
    (digits as u64 * 3_321_928_095).div_ceil(1_000_000_000) + 2
}

/// Rounding direction for conversions that need an enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Nearest,
    /// Toward negative infinity.
    Floor,
    /// Toward positive infinity.
    Ceil,
}

/// Extended-precision real number: `(-1)^neg * mant * 2^exp`.
///
/// A nonzero mantissa always carries exactly `bits_for_digits(digits)` bits.
#[derive(Clone, Debug)]
pub struct XScalar {
    neg: bool,
    mant: BigUint,
    exp: i64,
    digits: u32,
}

fn round_bits(
    neg: bool,
    mant: BigUint,
    exp: i64,
    sticky: bool,
    bits: u64,
    mode: Rounding,
) -> (BigUint, i64) {
    let len = mant.bits();
    if len <= bits {
        let shift = bits - len;
        let mut m = mant << shift as usize;
        let e = exp - shift as i64;
        let away = match mode {
            Rounding::Nearest => false,
            Rounding::Floor => neg && sticky,
            Rounding::Ceil => !neg && sticky,
        };
        if away {
            m += 1u32;
            if m.bits() > bits {
                return (m >> 1usize, e + 1);
            }
        }
        return (m, e);
    }
    let shift = (len - bits) as usize;
    let low = &mant & ((BigUint::one() << shift) - 1u32);
    let mut m = mant >> shift;
    let e = exp + shift as i64;
    let inexact = sticky || !low.is_zero();
    let up = match mode {
        Rounding::Nearest => {
            let half = BigUint::one() << (shift - 1);
            match low.cmp(&half) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => sticky || m.is_odd(),
            }
        }
        Rounding::Floor => neg && inexact,
        Rounding::Ceil => !neg && inexact,
    };
    if up {
        m += 1u32;
        if m.bits() > bits {
            return (m >> 1usize, e + 1);
        }
    }
    (m, e)
}

impl XScalar {
    fn check_digits(digits: u32) {
        assert!(
            digits >= MIN_DIGITS,
            "precision of {digits} digits is below the minimum of {MIN_DIGITS}"
        );
    }

    fn from_parts(
        neg: bool,
        mant: BigUint,
        exp: i64,
        sticky: bool,
        digits: u32,
        mode: Rounding,
    ) -> Self {
        if mant.is_zero() {
            return Self::zero(digits);
        }
        let (mant, exp) = round_bits(neg, mant, exp, sticky, bits_for_digits(digits), mode);
        XScalar { neg, mant, exp, digits }
    }

    pub fn zero(digits: u32) -> Self {
        Self::check_digits(digits);
        XScalar { neg: false, mant: BigUint::zero(), exp: 0, digits }
    }

    pub fn one(digits: u32) -> Self {
        Self::from_i64(1, digits)
    }

    pub fn from_i64(v: i64, digits: u32) -> Self {
        Self::check_digits(digits);
        Self::from_parts(v < 0, BigUint::from(v.unsigned_abs()), 0, false, digits, Rounding::Nearest)
    }

    pub fn from_bigint(v: &BigInt, digits: u32) -> Self {
        Self::check_digits(digits);
        Self::from_parts(
            v.sign() == Sign::Minus,
            v.magnitude().clone(),
            0,
            false,
            digits,
            Rounding::Nearest,
        )
    }

    /// `num / den` rounded in the given direction.
    pub fn from_ratio(num: i64, den: i64, digits: u32) -> Self {
        assert!(den != 0, "zero denominator");
        Self::check_digits(digits);
        let neg = (num < 0) != (den < 0);
        Self::ratio_parts(
            neg,
            BigUint::from(num.unsigned_abs()),
            BigUint::from(den.unsigned_abs()),
            0,
            digits,
            Rounding::Nearest,
        )
    }

    /// Rounds `(-1)^neg * num / den * 2^exp2`.
    fn ratio_parts(
        neg: bool,
        num: BigUint,
        den: BigUint,
        exp2: i64,
        digits: u32,
        mode: Rounding,
    ) -> Self {
        if num.is_zero() {
            return Self::zero(digits);
        }
        let bits = bits_for_digits(digits);
        let shift = (bits + 3 + den.bits()).saturating_sub(num.bits());
        let (q, r) = (num << shift as usize).div_rem(&den);
        Self::from_parts(neg, q, exp2 - shift as i64, !r.is_zero(), digits, mode)
    }

    /// Exact conversion of a finite double.
    pub fn try_from_f64(x: f64, digits: u32) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Domain("non-finite double"));
        }
        Self::check_digits(digits);
        if x == 0.0 {
            return Ok(Self::zero(digits));
        }
        let b = x.to_bits();
        let neg = b >> 63 == 1;
        let e = ((b >> 52) & 0x7ff) as i64;
        let frac = b & ((1u64 << 52) - 1);
        let (m, exp) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        Ok(Self::from_parts(neg, BigUint::from(m), exp, false, digits, Rounding::Nearest))
    }

    /// Exact conversion of a finite double. Panics on NaN or infinity.
    pub fn from_f64(x: f64, digits: u32) -> Self {
        Self::try_from_f64(x, digits).expect("finite double")
    }

    /// Nearest double (ties to even), with gradual underflow.
    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let sign = if self.neg { 1u64 << 63 } else { 0 };
        let top = self.top();
        if top > 1023 {
            return if self.neg { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if top >= -1022 {
            let (m, e) = round_bits(self.neg, self.mant.clone(), self.exp, false, 53, Rounding::Nearest);
            let top2 = e + 52;
            if top2 > 1023 {
                return if self.neg { f64::NEG_INFINITY } else { f64::INFINITY };
            }
            let m = m.to_u64().unwrap_or(0) & ((1u64 << 52) - 1);
            return f64::from_bits(sign | (((top2 + 1023) as u64) << 52) | m);
        }
        let avail = top + 1075;
        if avail <= 0 {
            return f64::from_bits(sign);
        }
        let (m, e) = round_bits(self.neg, self.mant.clone(), self.exp, false, avail as u64, Rounding::Nearest);
        // Subnormal: mantissa is the bit pattern at exponent -1074.
        let m = if e > -1074 { m << (e + 1074) as usize } else { m };
        f64::from_bits(sign | m.to_u64().unwrap_or(0))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Re-rounds to a new digit budget.
    pub fn with_digits(&self, digits: u32) -> Self {
        self.with_digits_rounded(digits, Rounding::Nearest)
    }

    pub fn with_digits_rounded(&self, digits: u32, mode: Rounding) -> Self {
        Self::check_digits(digits);
        Self::from_parts(self.neg, self.mant.clone(), self.exp, false, digits, mode)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    /// Floor of log2 |x|; `i64::MIN` for zero.
    pub fn top(&self) -> i64 {
        if self.mant.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64 - 1
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut out = self.clone();
        if !out.mant.is_zero() {
            out.exp += k;
        }
        out
    }

    pub fn abs(&self) -> Self {
        let mut out = self.clone();
        out.neg = false;
        out
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    fn add_signed(&self, other: &Self, negate_other: bool) -> Self {
        let digits = self.digits.max(other.digits);
        let other_neg = other.neg != negate_other;
        if other.is_zero() {
            return self.with_digits(digits);
        }
        if self.is_zero() {
            let mut out = other.with_digits(digits);
            out.neg = other_neg;
            return out;
        }
        let bits = bits_for_digits(digits) as i64;
        // (neg, mant, exp) of both operands, larger top first
        let (hi, lo) = if self.top() >= other.top() {
            ((self.neg, &self.mant, self.exp), (other_neg, &other.mant, other.exp))
        } else {
            ((other_neg, &other.mant, other.exp), (self.neg, &self.mant, self.exp))
        };
        let hi_top = hi.2 + hi.1.bits() as i64 - 1;
        let lo_top = lo.2 + lo.1.bits() as i64 - 1;
        let floor_exp = hi_top - bits - 4;
        let one = BigUint::one();
        // A far smaller operand only decides the rounding direction, so it is
        // replaced by a single unit well below the result's last place.
        let (lo_mant, lo_exp): (&BigUint, i64) =
            if lo_top < floor_exp { (&one, floor_exp) } else { (lo.1, lo.2) };
        let base = hi.2.min(lo_exp);
        let a = hi.1 << (hi.2 - base) as usize;
        let b = lo_mant << (lo_exp - base) as usize;
        if hi.0 == lo.0 {
            Self::from_parts(hi.0, a + b, base, false, digits, Rounding::Nearest)
        } else {
            match a.cmp(&b) {
                Ordering::Equal => Self::zero(digits),
                Ordering::Greater => Self::from_parts(hi.0, a - b, base, false, digits, Rounding::Nearest),
                Ordering::Less => Self::from_parts(lo.0, b - a, base, false, digits, Rounding::Nearest),
            }
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let digits = self.digits.max(other.digits);
        if self.is_zero() || other.is_zero() {
            return Self::zero(digits);
        }
        Self::from_parts(
            self.neg != other.neg,
            &self.mant * &other.mant,
            self.exp + other.exp,
            false,
            digits,
            Rounding::Nearest,
        )
    }

    /// Quotient; fails on a zero divisor.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let digits = self.digits.max(other.digits);
        if other.is_zero() {
            return Err(Error::Domain("division by zero"));
        }
        if self.is_zero() {
            return Ok(Self::zero(digits));
        }
        Ok(Self::ratio_parts(
            self.neg != other.neg,
            self.mant.clone(),
            other.mant.clone(),
            self.exp - other.exp,
            digits,
            Rounding::Nearest,
        ))
    }

    /// Square root; fails on negative input.
    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain("square root of a negative number"));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let bits = bits_for_digits(self.digits);
        let len = self.mant.bits();
        let mut shift = (2 * (bits + 2)).saturating_sub(len) as i64;
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as usize;
        let root = m.sqrt();
        let sticky = &root * &root != m;
        Ok(Self::from_parts(false, root, (self.exp - shift) / 2, sticky, self.digits, Rounding::Nearest))
    }

    pub fn div_i64(&self, d: i64) -> Self {
        self.div(&Self::from_i64(d, self.digits)).expect("nonzero divisor")
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul_ref(&Self::from_i64(k, self.digits))
    }

    /// Nearest integer (ties away from zero).
    pub fn round_to_integer(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        let mag = if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            let shift = (-self.exp) as usize;
            if shift as u64 > self.mant.bits() + 1 {
                BigUint::zero()
            } else {
                let half = BigUint::one() << (shift - 1);
                (&self.mant + half) >> shift
            }
        };
        let sign = if self.neg { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, mag)
    }

    /// Parses `[-+]digits[.digits][e[-+]digits]`.
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        Self::parse_rounded(s, digits, Rounding::Nearest)
    }

    pub fn parse_rounded(s: &str, digits: u32, mode: Rounding) -> Result<Self> {
        Self::check_digits(digits);
        let err = || Error::Parse(String::from(s));
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant_part, exp_part) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let (int_part, frac_part) = match mant_part.find('.') {
            Some(i) => (&mant_part[..i], &mant_part[i + 1..]),
            None => (mant_part, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        let mut m = BigUint::zero();
        for c in int_part.bytes().chain(frac_part.bytes()) {
            if !c.is_ascii_digit() {
                return Err(err());
            }
            m = m * 10u32 + (c - b'0') as u32;
        }
        let mut e10: i64 = match exp_part {
            Some(e) => e.parse().map_err(|_| err())?,
            None => 0,
        };
        e10 -= frac_part.len() as i64;
        Ok(Self::from_decimal(neg, m, e10, digits, mode))
    }

    /// Rounds `(-1)^neg * m * 10^e10`.
    pub fn from_decimal(neg: bool, m: BigUint, e10: i64, digits: u32, mode: Rounding) -> Self {
        if m.is_zero() {
            return Self::zero(digits);
        }
        let ten = BigUint::from(10u32);
        if e10 >= 0 {
            let v = m * num_traits::pow(ten, e10 as usize);
            Self::from_parts(neg, v, 0, false, digits, mode)
        } else {
            let den = num_traits::pow(ten, (-e10) as usize);
            Self::ratio_parts(neg, m, den, 0, digits, mode)
        }
    }

    /// Decimal digits `d` and exponent `e` with `|x| ≈ d * 10^e`, `d` having
    /// exactly `sig` digits, rounded in the given direction.
    pub fn to_decimal_parts(&self, sig: u32, mode: Rounding) -> (bool, BigUint, i64) {
        if self.is_zero() {
            return (false, BigUint::zero(), 0);
        }
        let ten = BigUint::from(10u32);
        let lower = num_traits::pow(ten.clone(), sig as usize - 1);
        let upper = &lower * 10u32;
        // log10(2) ≈ 0.30103
        let mut e10 = ((self.top() as f64) * core::f64::consts::LOG10_2).floor() as i64 - sig as i64 + 1;
        loop {
            let (mut num, mut den) = (self.mant.clone(), BigUint::one());
            if self.exp >= 0 {
                num <<= self.exp as usize;
            } else {
                den <<= (-self.exp) as usize;
            }
            if e10 >= 0 {
                den *= num_traits::pow(ten.clone(), e10 as usize);
            } else {
                num *= num_traits::pow(ten.clone(), (-e10) as usize);
            }
            let (q, r) = num.div_rem(&den);
            if q >= upper {
                e10 += 1;
                continue;
            }
            if q < lower {
                e10 -= 1;
                continue;
            }
            let up = match mode {
                Rounding::Nearest => {
                    let twice = &r << 1usize;
                    twice > den || (twice == den && q.is_odd())
                }
                Rounding::Floor => self.neg && !r.is_zero(),
                Rounding::Ceil => !self.neg && !r.is_zero(),
            };
            let mut d = q;
            if up {
                d += 1u32;
                if d == upper {
                    d = lower.clone();
                    e10 += 1;
                }
            }
            return (self.neg, d, e10);
        }
    }

    /// Scientific notation with `sig` significant digits, e.g. `-1.2345e-6`.
    pub fn to_string_digits(&self, sig: u32) -> String {
        use core::fmt::Write;
        let sig = sig.max(1);
        if self.is_zero() {
            return String::from("0e0");
        }
        let (neg, d, e10) = self.to_decimal_parts(sig, Rounding::Nearest);
        let ds = alloc::format!("{d}");
        let exp = e10 + ds.len() as i64 - 1;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&ds[..1]);
        let rest = ds[1..].trim_end_matches('0');
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        let _ = write!(out, "e{exp}");
        out
    }

    /// Rounds to `sig` significant decimal digits in the given direction and
    /// widens the result back to `digits`.
    pub fn round_decimal(&self, sig: u32, mode: Rounding, digits: u32) -> Self {
        let (neg, d, e10) = self.to_decimal_parts(sig, mode);
        Self::from_decimal(neg, d, e10, digits, mode)
    }
}

impl Default for XScalar {
    fn default() -> Self {
        Self::zero(DEFAULT_DIGITS)
    }
}

impl fmt::Display for XScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().map(|p| p as u32).unwrap_or(self.digits);
        f.write_str(&self.to_string_digits(sig))
    }
}

impl PartialEq for XScalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for XScalar {}

impl PartialOrd for XScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.signum(), other.signum()) {
            (a, b) if a != b => a.cmp(&b),
            (0, 0) => Ordering::Equal,
            (s, _) => {
                let mag = match self.top().cmp(&other.top()) {
                    Ordering::Equal => {
                        let base = self.exp.min(other.exp);
                        let a = &self.mant << (self.exp - base) as usize;
                        let b = &other.mant << (other.exp - base) as usize;
                        a.cmp(&b)
                    }
                    o => o,
                };
                if s < 0 {
                    mag.reverse()
                } else {
                    mag
                }
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&XScalar> for &XScalar {
            type Output = XScalar;
            fn $method(self, rhs: &XScalar) -> XScalar {
                $body(self, rhs)
            }
        }
        impl $tr<XScalar> for XScalar {
            type Output = XScalar;
            fn $method(self, rhs: XScalar) -> XScalar {
                $body(&self, &rhs)
            }
        }
        impl $tr<&XScalar> for XScalar {
            type Output = XScalar;
            fn $method(self, rhs: &XScalar) -> XScalar {
                $body(&self, rhs)
            }
        }
        impl $tr<XScalar> for &XScalar {
            type Output = XScalar;
            fn $method(self, rhs: XScalar) -> XScalar {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &XScalar, b: &XScalar| a.add_signed(b, false));
forward_binop!(Sub, sub, |a: &XScalar, b: &XScalar| a.add_signed(b, true));
forward_binop!(Mul, mul, |a: &XScalar, b: &XScalar| a.mul_ref(b));

impl Neg for XScalar {
    type Output = XScalar;
    fn neg(mut self) -> XScalar {
        if !self.is_zero() {
            self.neg = !self.neg;
        }
        self
    }
}

impl Neg for &XScalar {
    type Output = XScalar;
    fn neg(self) -> XScalar {
        -self.clone()
    }
}

/// Operations accepted by [`x_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Neg,
    Abs,
    /// Yields -1, 0 or 1.
    Cmp,
}

/// Uniform entry point over the basic operations.
pub fn x_arith(op: ArithOp, a: &XScalar, b: Option<&XScalar>) -> Result<XScalar> {
    let rhs = || b.ok_or(Error::Domain("binary operation needs two operands"));
    match op {
        ArithOp::Add => Ok(a + rhs()?),
        ArithOp::Sub => Ok(a - rhs()?),
        ArithOp::Mul => Ok(a * rhs()?),
        ArithOp::Div => a.div(rhs()?),
        ArithOp::Sqrt => a.sqrt(),
        ArithOp::Neg => Ok(-a),
        ArithOp::Abs => Ok(a.abs()),
        ArithOp::Cmp => {
            let b = rhs()?;
            let digits = a.digits.max(b.digits);
            let v = match a.cmp(b) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            };
            Ok(XScalar::from_i64(v, digits))
        }
    }
}

// ---------------------------------------------------------------------------
// Elementary functions

/// arctan(1/n) by its alternating series.
fn arctan_inv(n: i64, digits: u32) -> XScalar {
    let stop = -(bits_for_digits(digits) as i64) - 4;
    let n2 = XScalar::from_i64(n * n, digits);
    let mut power = XScalar::one(digits).div_i64(n);
    let mut sum = XScalar::zero(digits);
    let mut k = 0i64;
    loop {
        let term = power.div_i64(2 * k + 1);
        if term.is_zero() || term.top() < stop {
            break;
        }
        sum = if k % 2 == 0 { sum + term } else { sum - term };
        power = power.div(&n2).expect("nonzero");
        k += 1;
    }
    sum
}

/// π at `digits` significant digits (Machin's formula).
pub fn x_pi(digits: u32) -> XScalar {
    let wd = digits + GUARD_DIGITS;
    let pi = arctan_inv(5, wd).mul_i64(16) - arctan_inv(239, wd).mul_i64(4);
    pi.with_digits(digits)
}

/// e^x. The argument is scaled by 2^-s until it is below 2^-10, summed by
/// Taylor series (remainder bounded by the last term over 1 - 2^-10), then
/// squared s times.
pub fn x_exp(x: &XScalar) -> XScalar {
    let digits = x.digits;
    if x.is_zero() {
        return XScalar::one(digits);
    }
    let s = (x.top() + 11).max(0);
    // squaring s times amplifies relative error by 2^s
    let wd = digits + GUARD_DIGITS + ((s as f64) * core::f64::consts::LOG10_2).ceil() as u32;
    let r = x.with_digits(wd).mul_pow2(-s);
    let stop = -(bits_for_digits(wd) as i64) - 2;
    let mut sum = XScalar::one(wd);
    let mut term = XScalar::one(wd);
    let mut k = 1i64;
    loop {
        term = (&term * &r).div_i64(k);
        if term.is_zero() || term.top() < stop {
            break;
        }
        sum = sum + &term;
        k += 1;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum.with_digits(digits)
}

/// sin and cos of |r| ≤ π/4 by alternating Taylor series; the truncation
/// error is below the first omitted term.
fn sin_cos_reduced(r: &XScalar) -> (XScalar, XScalar) {
    let wd = r.digits;
    let bits = bits_for_digits(wd) as i64 + 2;
    let r2 = r * r;
    let mut s_sum = r.clone();
    let mut s_term = r.clone();
    let mut k = 1i64;
    while !s_term.is_zero() {
        s_term = -(&s_term * &r2).div_i64((2 * k) * (2 * k + 1));
        if s_term.is_zero() || s_term.top() < s_sum.top() - bits {
            break;
        }
        s_sum = s_sum + &s_term;
        k += 1;
    }
    let mut c_sum = XScalar::one(wd);
    let mut c_term = XScalar::one(wd);
    let mut k = 1i64;
    loop {
        c_term = -(&c_term * &r2).div_i64((2 * k - 1) * (2 * k));
        if c_term.is_zero() || c_term.top() < -bits {
            break;
        }
        c_sum = c_sum + &c_term;
        k += 1;
    }
    (s_sum, c_sum)
}

/// (sin x, cos x) with reduction modulo π/2.
pub fn x_sin_cos(x: &XScalar) -> (XScalar, XScalar) {
    let digits = x.digits;
    if x.is_zero() {
        return (XScalar::zero(digits), XScalar::one(digits));
    }
    let extra = ((x.top().max(0) as f64) * core::f64::consts::LOG10_2).ceil() as u32;
    let wd = digits + GUARD_DIGITS + extra;
    let xw = x.with_digits(wd);
    let half_pi = x_pi(wd).mul_pow2(-1);
    let k = xw.div(&half_pi).expect("nonzero").round_to_integer();
    let r = &xw - &XScalar::from_bigint(&k, wd) * &half_pi;
    let q = k.mod_floor(&BigInt::from(4)).to_u32().unwrap_or(0);
    let (s, c) = sin_cos_reduced(&r);
    let (sin, cos) = match q {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    (sin.with_digits(digits), cos.with_digits(digits))
}

pub fn x_sin(x: &XScalar) -> XScalar {
    x_sin_cos(x).0
}

pub fn x_cos(x: &XScalar) -> XScalar {
    x_sin_cos(x).1
}

/// Sum of a slice; convenience for table code.
pub fn x_sum<'a>(items: impl IntoIterator<Item = &'a XScalar>, digits: u32) -> XScalar {
    items.into_iter().fold(XScalar::zero(digits), |acc, v| acc + v)
}

/// Converts a slice of extended scalars to doubles.
pub fn to_f64_vec(v: &[XScalar]) -> Vec<f64> {
    v.iter().map(XScalar::to_f64).collect()
}
