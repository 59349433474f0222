//! Managed-precision real/complex arithmetic on top of MPFR.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

pub const MIN_PRECISION: u32 = 64;

/// Extra bits used for every "recompute and compare" pass.
pub const CHECK_EXTRA_BITS: u32 = 128;

fn pi_cache() -> &'static RwLock<HashMap<u32, Float>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Float>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// π rounded to `prec` bits.
pub fn pi(prec: u32) -> Float {
    if let Some(p) = pi_cache().read().unwrap().get(&prec) {
        return p.clone();
    }
    let p = Float::with_val(prec, Constant::Pi);
    pi_cache().write().unwrap().insert(prec, p.clone());
    p
}

/// Evaluation context carrying a working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HpContext {
    precision: u32,
}

impl HpContext {
    pub fn new(precision: u32) -> Result<Self> {
        if precision < MIN_PRECISION {
            return Err(Error::Config(format!(
                "precision must be at least {MIN_PRECISION} bits, got {precision}"
            )));
        }
        Ok(HpContext { precision })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn pi(&self) -> Float {
        pi(self.precision)
    }

    pub fn float(&self, q: &Rational) -> Float {
        Float::with_val(self.precision, q)
    }

    pub fn real(&self, q: &Rational) -> HpValue {
        HpValue::from_real(self.float(q))
    }

    pub fn int(&self, n: i64) -> HpValue {
        HpValue::from_real(Float::with_val(self.precision, n))
    }

    pub fn zero(&self) -> HpValue {
        HpValue::zero(self.precision)
    }

    pub fn one(&self) -> HpValue {
        self.int(1)
    }

    /// `e^{2πi·num/den}`; quarter turns are exact.
    pub fn turn(&self, num: i64, den: u64) -> HpValue {
        let den_i = den as i64;
        let r = num.rem_euclid(den_i);
        let p = self.precision;
        if 4 * r % den_i == 0 {
            let (re, im) = match 4 * r / den_i {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            return HpValue::new(Float::with_val(p, re), Float::with_val(p, im));
        }
        let angle = Float::with_val(p + 16, pi(p + 16) * Integer::from(2 * r)) / Integer::from(den);
        let (s, c) = angle.sin_cos(Float::new(p + 16));
        HpValue::new(Float::with_val(p, c), Float::with_val(p, s))
    }

    /// `cos(2π num/den)` and `sin(2π num/den)` as reals.
    pub fn cos_turn(&self, num: i64, den: u64) -> Float {
        self.turn(num, den).re
    }

    pub fn sin_turn(&self, num: i64, den: u64) -> Float {
        self.turn(num, den).im
    }

    /// `tan(π num/den)`.
    pub fn tan_pi(&self, num: i64, den: u64) -> Float {
        let p = self.precision + 16;
        let angle = Float::with_val(p, pi(p) * Integer::from(num)) / Integer::from(den);
        Float::with_val(self.precision, angle.tan())
    }

    /// `cot(π num/den)`.
    pub fn cot_pi(&self, num: i64, den: u64) -> Float {
        let p = self.precision + 16;
        let angle = Float::with_val(p, pi(p) * Integer::from(num)) / Integer::from(den);
        Float::with_val(self.precision, angle.cot())
    }

    /// `2^{-bits}` at this precision.
    pub fn ulp_scale(&self, bits: i32) -> Float {
        Float::with_val(self.precision, Float::i_exp(1, -bits))
    }
}

/// A complex number at a recorded binary precision.
#[derive(Debug, Clone, PartialEq)]
pub struct HpValue {
    pub re: Float,
    pub im: Float,
}

impl HpValue {
    pub fn new(re: Float, im: Float) -> Self {
        HpValue { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        HpValue { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        HpValue::new(Float::new(prec), Float::new(prec))
    }

    pub fn precision(&self) -> u32 {
        self.re.prec().min(self.im.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn abs(&self) -> Float {
        let p = self.precision();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn conj(&self) -> HpValue {
        HpValue::new(self.re.clone(), Float::with_val(self.im.prec(), -&self.im))
    }

    pub fn scale(&self, f: &Float) -> HpValue {
        let p = self.precision().min(f.prec());
        HpValue::new(
            Float::with_val(p, &self.re * f),
            Float::with_val(p, &self.im * f),
        )
    }

    pub fn scale_rational(&self, q: &Rational) -> HpValue {
        let p = self.precision();
        HpValue::new(
            Float::with_val(p, &self.re * q),
            Float::with_val(p, &self.im * q),
        )
    }

    pub fn powi(&self, mut e: u32) -> HpValue {
        let p = self.precision();
        let mut base = self.clone();
        let mut acc = HpValue::new(Float::with_val(p, 1), Float::new(p));
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn with_precision(&self, prec: u32) -> HpValue {
        HpValue::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    /// Relative distance `|self − other| / max(|self|, |other|)`; zero when both vanish.
    pub fn relative_distance(&self, other: &HpValue) -> Float {
        let diff = (self - other).abs();
        let denom = self.abs().max(&other.abs());
        if denom.is_zero() {
            return Float::new(diff.prec());
        }
        diff / denom
    }

    /// Decimal rendering with `digits` significant digits; `a+bi` when complex.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = float_to_decimal(&self.re, digits);
        if self.im.is_zero() {
            return re;
        }
        let im = float_to_decimal(&Float::with_val(self.im.prec(), self.im.abs_ref()), digits);
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{re}{sign}{im}i")
    }

    /// Digits that are meaningful at this precision once `guard` bits are
    /// discounted.
    pub fn meaningful_digits(&self, guard: u32) -> usize {
        digits_for_bits(self.precision().saturating_sub(guard))
    }
}

pub fn digits_for_bits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

/// Rounded decimal string: plain notation for moderate exponents,
/// `<mantissa>e<exp>` otherwise. Trailing zeros are trimmed.
pub fn float_to_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = x.to_string_radix_round(10, Some(digits.max(1)), Round::Nearest);
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i64>().unwrap_or(0)),
        None => (s.clone(), 0),
    };
    let negative = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let all_digits = format!("{int_part}{frac_part}");
    let point = int_part.len() as i64 + exp;
    let body = if (-6..=40).contains(&point) {
        let trimmed = all_digits.trim_end_matches('0');
        let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
        if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), trimmed)
        } else if point as usize >= trimmed.len() {
            format!("{}{}", trimmed, "0".repeat(point as usize - trimmed.len()))
        } else {
            let (a, b) = trimmed.split_at(point as usize);
            format!("{a}.{b}")
        }
    } else {
        let trimmed = all_digits.trim_end_matches('0');
        let (a, b) = trimmed.split_at(1);
        if b.is_empty() {
            format!("{a}e{}", point - 1)
        } else {
            format!("{a}.{b}e{}", point - 1)
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// `2^{e}` as a float at `prec` bits.
pub fn pow2(prec: u32, e: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, e))
}

/// `n^{q}` for a rational exponent with denominator 1 or 2.
pub fn pow_rational(prec: u32, n: u64, exp: &Rational) -> Float {
    let base = Float::with_val(prec + 16, n);
    let e = Float::with_val(prec + 16, exp);
    Float::with_val(prec, base.pow(e))
}

impl fmt::Display for HpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(self.meaningful_digits(0)))
    }
}

impl<'a> Add<&'a HpValue> for &'a HpValue {
    type Output = HpValue;
    fn add(self, rhs: &HpValue) -> HpValue {
        let p = self.precision().min(rhs.precision());
        HpValue::new(
            Float::with_val(p, &self.re + &rhs.re),
            Float::with_val(p, &self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a HpValue> for &'a HpValue {
    type Output = HpValue;
    fn sub(self, rhs: &HpValue) -> HpValue {
        let p = self.precision().min(rhs.precision());
        HpValue::new(
            Float::with_val(p, &self.re - &rhs.re),
            Float::with_val(p, &self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a HpValue> for &'a HpValue {
    type Output = HpValue;
    fn mul(self, rhs: &HpValue) -> HpValue {
        let p = self.precision().min(rhs.precision());
        if self.im.is_zero() && rhs.im.is_zero() {
            return HpValue::new(Float::with_val(p, &self.re * &rhs.re), Float::new(p));
        }
        let w = p + 8;
        let ac = Float::with_val(w, &self.re * &rhs.re);
        let bd = Float::with_val(w, &self.im * &rhs.im);
        let ad = Float::with_val(w, &self.re * &rhs.im);
        let bc = Float::with_val(w, &self.im * &rhs.re);
        HpValue::new(Float::with_val(p, ac - bd), Float::with_val(p, ad + bc))
    }
}

impl<'a> Div<&'a HpValue> for &'a HpValue {
    type Output = HpValue;
    fn div(self, rhs: &HpValue) -> HpValue {
        let p = self.precision().min(rhs.precision());
        if rhs.im.is_zero() {
            return HpValue::new(
                Float::with_val(p, &self.re / &rhs.re),
                Float::with_val(p, &self.im / &rhs.re),
            );
        }
        let w = p + 8;
        let denom = Float::with_val(w, rhs.re.square_ref()) + Float::with_val(w, rhs.im.square_ref());
        let re = Float::with_val(w, &self.re * &rhs.re) + Float::with_val(w, &self.im * &rhs.im);
        let im = Float::with_val(w, &self.im * &rhs.re) - Float::with_val(w, &self.re * &rhs.im);
        HpValue::new(
            Float::with_val(p, re / &denom),
            Float::with_val(p, im / &denom),
        )
    }
}

impl Neg for &HpValue {
    type Output = HpValue;
    fn neg(self) -> HpValue {
        HpValue::new(
            Float::with_val(self.re.prec(), -&self.re),
            Float::with_val(self.im.prec(), -&self.im),
        )
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<HpValue> for HpValue {
            type Output = HpValue;
            fn $m(self, rhs: HpValue) -> HpValue { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a HpValue> for HpValue {
            type Output = HpValue;
            fn $m(self, rhs: &HpValue) -> HpValue { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_floor() {
        assert!(HpContext::new(63).is_err());
        assert!(HpContext::new(64).is_ok());
    }

    #[test]
    fn pi_self_consistent() {
        let lo = pi(256);
        let hi = pi(512);
        let diff = Float::with_val(512, &hi - &lo).abs();
        assert!(diff < pow2(64, -250));
    }

    #[test]
    fn third_times_three() {
        let ctx = HpContext::new(256).unwrap();
        let third = ctx.float(&Rational::from((1, 3)));
        let back = Float::with_val(256, third * 3);
        let err = Float::with_val(256, back - 1).abs();
        assert!(err <= pow2(64, -254));
    }

    #[test]
    fn tan_quarter_pi() {
        let ctx = HpContext::new(256).unwrap();
        let t = ctx.tan_pi(1, 4);
        let err = Float::with_val(256, t - 1).abs();
        assert!(err < Float::with_val(64, 1e-70));
    }

    #[test]
    fn quarter_turns_are_exact() {
        let ctx = HpContext::new(128).unwrap();
        assert_eq!(ctx.turn(1, 2), ctx.int(-1));
        let i = ctx.turn(1, 4);
        assert!(i.re.is_zero() && i.im == 1);
        assert_eq!(ctx.turn(0, 1), ctx.one());
        assert_eq!(ctx.turn(5, 4).im, 1);
    }

    #[test]
    fn complex_arithmetic() {
        let ctx = HpContext::new(128).unwrap();
        let a = HpValue::new(Float::with_val(128, 3), Float::with_val(128, -2));
        let b = HpValue::new(Float::with_val(128, 1), Float::with_val(128, 4));
        let prod = &a * &b;
        assert_eq!(prod.re, 11);
        assert_eq!(prod.im, 10);
        let back = &prod / &b;
        assert!(back.relative_distance(&a) < pow2(64, -120));
        assert_eq!(a.powi(3), &(&a * &a) * &a);
        assert_eq!((&a - &a), ctx.zero());
    }

    #[test]
    fn mixed_precision_takes_minimum() {
        let a = HpValue::from_real(Float::with_val(300, 1));
        let b = HpValue::from_real(Float::with_val(100, 2));
        assert_eq!((&a + &b).precision(), 100);
    }

    #[test]
    fn decimal_formatting() {
        let f = |x: f64| float_to_decimal(&Float::with_val(64, x), 10);
        assert_eq!(f(-10.0), "-10");
        assert_eq!(f(0.25), "0.25");
        assert_eq!(f(-1.0 / 24.0), "-0.04166666667");
        assert_eq!(f(1.5e60), "1.5e60");
        assert_eq!(f(0.0), "0");
        let v = HpValue::new(Float::with_val(64, 1), Float::with_val(64, -0.5));
        assert_eq!(v.to_decimal(5), "1-0.5i");
    }
}
