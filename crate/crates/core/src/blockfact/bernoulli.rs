//! The periodic Bernoulli matrices `B_{k,N}`: closed forms for their hats
//! through Hurwitz zeta values, and the determinant as a product of
//! Dirichlet `L(k, χ)` values.

use rug::ops::Pow;
use rug::{Float, Rational};

use super::report::{assemble, FactorValue, FactorizationReport, Oracle};
use crate::characters::characters_with_parity;
use crate::error::{domain, Result};
use crate::exactnum::bernoulli::{bernoulli_number, factorial};
use crate::exactnum::{HpContext, HpValue, CHECK_EXTRA_BITS};
use crate::matrices::{build_matrix, det_exact, BuiltMatrix, ClosedFormDet, ValueAssignment};
use crate::par::{self, Exec};
use crate::residues::divisors;
use crate::specialvalues::{dirichlet_l, hurwitz_zeta};

/// `(−1)^{k/2+1} k!/(2π)^k` for even `k`, `(−1)^{(k+1)/2} k!/(2π)^k` for odd `k`.
pub fn bernoulli_factor_scale(k: u32, ctx: &HpContext) -> Float {
    let p = ctx.precision();
    let two_pi = Float::with_val(p + 16, ctx.pi() * 2u32);
    let mag = Float::with_val(p, Float::with_val(p + 16, factorial(k)) / two_pi.pow(k));
    let negative = if k % 2 == 0 { (k / 2 + 1) % 2 == 1 } else { (k + 1) / 2 % 2 == 1 };
    if negative {
        -mag
    } else {
        mag
    }
}

/// `ĥ_d(t)` of `B_{k,N}` in closed form. Valid for `1 ≤ t < N_d`, and for
/// `t = 0` when `d = N` and `k` is even.
pub fn bernoulli_hat_closed(k: u32, d: u64, t: u64, n: u64, ctx: &HpContext) -> Result<HpValue> {
    if k == 0 || d == 0 || n % d != 0 {
        return Err(domain(format!("invalid Bernoulli hat arguments k = {k}, d = {d}, N = {n}")));
    }
    let nd = n / d;
    let p = ctx.precision();
    if t == 0 {
        if d == n && k % 2 == 0 {
            let half = bernoulli_number(k) / 2u32;
            return Ok(ctx.real(&half));
        }
        return Err(domain("t = 0 closed form only for d = N and even k"));
    }
    if t >= nd {
        return Err(domain(format!("t = {t} out of range for N/d = {nd}")));
    }
    if k == 1 {
        return Ok(HpValue::from_real(Float::with_val(p, ctx.cot_pi(t as i64, nd) / -4i32)));
    }
    let w = HpContext::new(p + 16)?;
    let a = Rational::from((t, nd));
    let b = Rational::from((nd - t, nd));
    let za = hurwitz_zeta(k, &a, &w)?.re;
    let zb = hurwitz_zeta(k, &b, &w)?.re;
    let sum = if k % 2 == 0 { za + zb } else { za - zb };
    let scale = bernoulli_factor_scale(k, &w) / 2u32;
    let nd_pow = Float::with_val(p + 16, nd).pow(1 - k as i32);
    Ok(HpValue::from_real(Float::with_val(p, sum * scale * nd_pow)))
}

fn factor_pairs(k: u32, n: u64) -> Result<Vec<(u64, crate::characters::DirichletCharacter)>> {
    let mut pairs = Vec::new();
    for d in divisors(n) {
        if k % 2 == 1 && d <= 2 {
            continue;
        }
        let parity = if k % 2 == 0 { 1 } else { -1 };
        for chi in characters_with_parity(d, parity)? {
            pairs.push((d, chi));
        }
    }
    Ok(pairs)
}

pub(crate) fn prefactor(k: u32, n: u64) -> ClosedFormDet {
    let n_plus = (n / 2) as i64;
    let n_minus = ((n - 1) / 2) as i64;
    let sign = |e: i64| if e % 2 == 0 { 1 } else { -1 };
    if k % 2 == 0 {
        ClosedFormDet {
            n,
            i_power: 0,
            sign: sign(n_plus * (n_plus + 1) / 2),
            pow_n: Rational::from((n_plus + 1, 2)),
            pow_2: n_plus + 1 - n_minus,
        }
    } else {
        ClosedFormDet {
            n,
            i_power: 0,
            sign: sign(n_minus * (n_minus - 1) / 2),
            pow_n: Rational::from((n_minus, 2)),
            pow_2: 0,
        }
    }
}

/// `det B_{k,N}` as a product of scaled `L(k, χ)` over `d | N` and
/// characters modulo `d` of the parity of `k` (only `d > 2` for odd `k`).
pub fn bernoulli_det_formula(k: u32, n: u64, precision: u32) -> Result<FactorizationReport> {
    bernoulli_det_formula_with(k, n, precision, Exec::Parallel)
}

pub(crate) fn factors(k: u32, n: u64, lo: &HpContext, hi: &HpContext, exec: Exec) -> Result<Vec<FactorValue>> {
    let pairs = factor_pairs(k, n)?;
    par::map(exec, &pairs, |(d, chi)| -> Result<FactorValue> {
        let at = |ctx: &HpContext| -> Result<HpValue> {
            let l = dirichlet_l(k, chi, ctx)?.value;
            Ok(l.scale(&bernoulli_factor_scale(k, ctx)))
        };
        Ok(FactorValue::numeric(*d, chi, at(lo)?, at(hi)?))
    })
    .into_iter()
    .collect()
}

pub fn bernoulli_det_formula_with(k: u32, n: u64, precision: u32, exec: Exec) -> Result<FactorizationReport> {
    let asg = ValueAssignment::bernoulli(k, n)?;
    let lo = HpContext::new(precision)?;
    let hi = HpContext::new(precision + CHECK_EXTRA_BITS)?;
    let factors = factors(k, n, &lo, &hi, exec)?;
    let oracle = match build_matrix(&asg, &lo)? {
        BuiltMatrix::Exact(m) => Oracle::Exact(det_exact(&m)),
        BuiltMatrix::Hp(_) => unreachable!("Bernoulli matrices are exact"),
    };
    Ok(assemble(
        n,
        asg.family(),
        "bernoulli-determinant",
        prefactor(k, n),
        factors,
        oracle,
        None,
        precision,
    ))
}
