//! Tangent-power matrices `T_{m,N} = (tan^m(πij/N))` for odd `N`.
//!
//! The hats are rational combinations of periodic Bernoulli values, so every
//! factor of the determinant is an exact cyclotomic number built from
//! generalized Bernoulli numbers of primitive characters.

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::report::{assemble, FactorValue, FactorizationReport, Oracle};
use super::tangent_precision;
use crate::characters::{characters_with_parity, DirichletCharacter, RootOfUnityValue};
use crate::error::{domain, Error, Result};
use crate::exactnum::bernoulli::{coeff_a, coeff_big_a, periodic_bernoulli};
use crate::exactnum::{CycloSum, HpContext, HpValue, CHECK_EXTRA_BITS};
use crate::matrices::{ClosedFormDet, ValueAssignment};
use crate::par::{self, Exec};
use crate::residues::divisors;
use crate::specialvalues::{gen_bernoulli_exact, induction_factor_exact, relative_class_number};

fn check_odd(n: u64) -> Result<u64> {
    if n % 2 == 0 || n < 3 {
        return Err(domain(format!("tangent matrices need odd N ≥ 3, got {n}")));
    }
    Ok((n - 1) / 2)
}

fn pow_int(base: u64, e: u32) -> Rational {
    Rational::from(Integer::from(base).pow(e))
}

/// `ĥ_d(t)` of `T_{m,N}` (with `tan^m(0) = 0`) as an exact rational.
/// For even `m` the closed form does not hold at `t ≡ 0 (mod N/d)`, which is
/// reported as unsupported; the defining sum is used there instead.
pub fn tangent_hat_closed(m: u32, d: u64, t: u64, n: u64) -> Result<Rational> {
    let half = check_odd(n)?;
    if m == 0 {
        return Err(domain("tangent exponent must be at least 1"));
    }
    if d == 0 || n % d != 0 {
        return Err(domain(format!("{d} does not divide {n}")));
    }
    let nd = n / d;
    let t = t % nd;
    if m % 2 == 0 && t == 0 {
        return Err(Error::Unsupported(
            "even-exponent tangent hat at t ≡ 0 has no closed form here".into(),
        ));
    }
    // (n+1) = (N+1)/2 is the inverse of 2 modulo N
    let shifted = (half + 1) * t;
    let mut acc = Rational::new();
    if m % 2 == 0 {
        let k = m / 2;
        for s in 1..=k {
            let e = 2 * s;
            let b = periodic_bernoulli(e, &Rational::from((t, nd)))?
                - pow_int(2, e) * periodic_bernoulli(e, &Rational::from((shifted, nd)))?;
            acc += coeff_a(k, s)? * pow_int(nd, e) * b;
        }
    } else {
        let k = (m - 1) / 2;
        for s in 0..=k {
            let e = 2 * s + 1;
            let b = periodic_bernoulli(e, &Rational::from((t, nd)))?
                - pow_int(2, e) * periodic_bernoulli(e, &Rational::from((shifted, nd)))?;
            acc += coeff_big_a(k, s)? * pow_int(nd, e) * b;
        }
    }
    Ok(acc)
}

/// `d·ĥ_d(t)` through the integer forms: `(N/2)(−1)^{t+1}` for `m = 1`
/// and `(N/2)(−1)^{t+1}(2t − N_d)` for `m = 2`, with `1 ≤ t < N_d`.
pub fn tangent_hat_integer(m: u32, d: u64, t: u64, n: u64) -> Result<Rational> {
    check_odd(n)?;
    if d == 0 || n % d != 0 {
        return Err(domain(format!("{d} does not divide {n}")));
    }
    let nd = n / d;
    if t == 0 || t >= nd {
        return Err(domain(format!("integer form needs 1 ≤ t < {nd}, got {t}")));
    }
    let sign = if t % 2 == 1 { 1 } else { -1 };
    let base = Rational::from((n as i64 * sign, 2));
    match m {
        1 => Ok(base),
        2 => Ok(base * (2 * t as i64 - nd as i64)),
        _ => Err(Error::Unsupported(format!("no integer form for exponent {m}"))),
    }
}

/// Exact factor `λ̃_χ` of `det T_{m,N}` for a character `χ` modulo `d`.
pub fn tangent_lambda(m: u32, chi: &DirichletCharacter) -> Result<CycloSum> {
    let d = chi.modulus();
    if d % 2 == 0 {
        return Err(domain("tangent factors use odd moduli"));
    }
    let star = chi.induce_primitive();
    let chi2 = match chi.eval(2) {
        RootOfUnityValue::Root(t) => t,
        RootOfUnityValue::Zero => return Err(domain("2 is not a unit")),
    };
    let two_term = |e: u32| {
        let mut s = CycloSum::rational(Rational::from(1));
        s.add_term(chi2, -pow_int(2, e));
        s
    };
    let mut acc = CycloSum::zero();
    if m % 2 == 0 {
        if chi.parity() != 1 {
            return Err(domain("even exponents pair with even characters"));
        }
        let k = m / 2;
        for s in 1..=k {
            let e = 2 * s;
            let term = two_term(e)
                .mul(&gen_bernoulli_exact(e, &star)?)
                .mul(&induction_factor_exact(chi, e, d)?)
                .scale(&coeff_a(k, s)?);
            acc = acc.add(&term);
        }
    } else {
        if chi.parity() != -1 {
            return Err(domain("odd exponents pair with odd characters"));
        }
        let k = (m - 1) / 2;
        for s in 0..=k {
            let e = 2 * s + 1;
            let term = two_term(e)
                .mul(&gen_bernoulli_exact(e, &star)?)
                .mul(&induction_factor_exact(chi, e, d)?)
                .scale(&coeff_big_a(k, s)?);
            acc = acc.add(&term);
        }
    }
    Ok(acc)
}

pub(crate) fn prefactor(m: u32, n: u64) -> ClosedFormDet {
    let half = ((n - 1) / 2) as i64;
    let sign = |e: i64| if e % 2 == 0 { 1 } else { -1 };
    if m % 2 == 0 {
        ClosedFormDet {
            n,
            i_power: 0,
            sign: sign(half * (half + 1) / 2),
            pow_n: Rational::from((half + 1, 2)),
            pow_2: 0,
        }
    } else {
        ClosedFormDet {
            n,
            i_power: 0,
            sign: sign(half * (half - 1) / 2),
            pow_n: Rational::from((half, 2)),
            pow_2: 0,
        }
    }
}

pub(crate) fn factors(m: u32, n: u64, lo: &HpContext, hi: &HpContext, exec: Exec) -> Result<Vec<FactorValue>> {
    let parity = if m % 2 == 0 { 1 } else { -1 };
    let mut pairs = Vec::new();
    for d in divisors(n) {
        if d == 1 {
            continue;
        }
        for chi in characters_with_parity(d, parity)? {
            pairs.push((d, chi));
        }
    }
    par::map(exec, &pairs, |(d, chi)| -> Result<FactorValue> {
        Ok(FactorValue::from_exact(*d, chi, tangent_lambda(m, chi)?, lo, hi))
    })
    .into_iter()
    .collect()
}

/// `det T_{1,N}` through relative class numbers of the cyclotomic fields
/// `Q(ζ_d)`, `d | N`, `d > 2`.
pub fn class_number_form(n: u64, ctx: &HpContext) -> Result<HpValue> {
    let half = check_odd(n)?;
    let p = ctx.precision();
    let sign = if (half * (half + 1) / 2) % 2 == 0 { 1 } else { -1 };
    let mut scale = Rational::from(sign) * pow_int(2, half as u32);
    let mut algebraic = CycloSum::rational(Rational::from(1));
    for d in divisors(n).into_iter().filter(|&d| d > 2) {
        let h = relative_class_number(d, ctx)?;
        scale *= Rational::from((h.h_minus, Integer::from(2 * d * h.q as u64)));
        for chi in characters_with_parity(d, -1)? {
            let star2 = match chi.primitive_value(2) {
                RootOfUnityValue::Root(t) => t,
                RootOfUnityValue::Zero => return Err(domain("2 is not a unit")),
            };
            let mut two = CycloSum::rational(Rational::from(-1));
            two.add_term(star2, Rational::from(2));
            algebraic = algebraic.mul(&two).mul(&induction_factor_exact(&chi, 1, d)?);
        }
    }
    let root_n = crate::exactnum::hp::pow_rational(p, n, &Rational::from((half, 2)));
    Ok(algebraic.scale(&scale).evaluate(ctx).scale(&root_n))
}

/// `det T_{m,N}` as a prefactor times `∏_{d | N} ∏_χ λ̃_χ` (characters
/// modulo `d` of the parity of `m`, `d > 1` for even and `d > 2` for odd
/// `m`). For `m = 1` the class-number form is evaluated as a third value.
pub fn tangent_det_formula(m: u32, n: u64, precision: u32) -> Result<FactorizationReport> {
    tangent_det_formula_with(m, n, precision, Exec::Parallel)
}

pub fn tangent_det_formula_with(m: u32, n: u64, precision: u32, exec: Exec) -> Result<FactorizationReport> {
    let asg = ValueAssignment::tangent(m, n)?;
    let precision = precision.max(tangent_precision(n));
    let lo = HpContext::new(precision)?;
    let hi = HpContext::new(precision + CHECK_EXTRA_BITS)?;
    let factors = factors(m, n, &lo, &hi, exec)?;
    let oracle = Oracle::numeric(&asg, &lo, &hi, exec)?;
    let third = if m == 1 {
        Some((
            "class-number-form".to_string(),
            class_number_form(n, &lo)?,
            class_number_form(n, &hi)?,
        ))
    } else {
        None
    };
    Ok(assemble(
        n,
        asg.family(),
        "tangent-determinant",
        prefactor(m, n),
        factors,
        oracle,
        third,
        precision,
    ))
}

/// `Σ_{r} tan^m(πdr/N)·trig(2πtr/N_d)` evaluated directly, for tests and
/// the `t ≡ 0` entries.
pub fn tangent_hat_direct(m: u32, d: u64, t: u64, n: u64, ctx: &HpContext) -> Result<HpValue> {
    let asg = ValueAssignment::tangent(m, n)?;
    super::hat_direct_hp(&asg, d, t, ctx)
}
