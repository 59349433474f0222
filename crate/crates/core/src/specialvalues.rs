//! Hurwitz zeta values, Dirichlet `L(k, χ)`, generalized Bernoulli numbers
//! `B_{m,χ}`, primitive-induction factors and relative class numbers of
//! cyclotomic fields.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::characters::{characters_with_parity, eval_numeric, DirichletCharacter, RootOfUnityValue};
use crate::error::{domain, Error, Result};
use crate::exactnum::bernoulli::{bernoulli_number, bernoulli_poly, factorial};
use crate::exactnum::hp::pow2;
use crate::exactnum::{CycloSum, HpContext, HpValue};
use crate::residues::{is_prime_power, prime_divisors};

type ZetaKey = (u32, Rational, u32);

fn zeta_cache() -> &'static RwLock<HashMap<ZetaKey, Float>> {
    static CACHE: OnceLock<RwLock<HashMap<ZetaKey, Float>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `ζ(k, a) = Σ_{n≥0} (n + a)^{−k}` for integer `k ≥ 2` and `0 < a ≤ 1`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(k: u32, a: &Rational, ctx: &HpContext) -> Result<HpValue> {
    if k < 2 {
        return Err(domain(format!("Hurwitz zeta needs k ≥ 2, got {k}")));
    }
    if *a <= 0 || *a > 1 {
        return Err(domain(format!("Hurwitz zeta needs 0 < a ≤ 1, got {a}")));
    }
    let prec = ctx.precision();
    let key = (k, a.clone(), prec);
    if let Some(v) = zeta_cache().read().unwrap().get(&key) {
        return Ok(HpValue::from_real(v.clone()));
    }
    let value = hurwitz_euler_maclaurin(k, a, prec)?;
    zeta_cache().write().unwrap().insert(key, value.clone());
    Ok(HpValue::from_real(value))
}

fn hurwitz_euler_maclaurin(k: u32, a: &Rational, prec: u32) -> Result<Float> {
    let w = prec + 32;
    // the smallest Euler–Maclaurin term is about e^{−2π(M+a)}
    let terms = (w as f64 * 0.2).ceil() as u64 + 10;
    let af = Float::with_val(w, a);
    let mut sum = Float::new(w);
    for n in 0..terms {
        let base = Float::with_val(w, &af + n);
        sum += base.pow(-(k as i32));
    }
    let x = Float::with_val(w, &af + terms);
    let x_pow_1mk = Float::with_val(w, x.clone().pow(1 - k as i32));
    sum += Float::with_val(w, &x_pow_1mk / (k - 1));
    let x_pow_mk = Float::with_val(w, x.clone().pow(-(k as i32)));
    sum += Float::with_val(w, &x_pow_mk / 2u32);

    let inv_x2 = Float::with_val(w, x.square_ref()).recip();
    // (k)_{2j−1} x^{−k−2j+1}, updated incrementally
    let mut poch_pow = Float::with_val(w, &x_pow_mk * k) / &x;
    let eps = pow2(w, -(w as i32));
    let max_terms = 4 * w;
    let mut j = 1u32;
    loop {
        let b = Float::with_val(w, &bernoulli_number(2 * j)) / Float::with_val(w, factorial(2 * j));
        let term = Float::with_val(w, &b * &poch_pow);
        sum += &term;
        let small = Float::with_val(w, term.abs_ref()) < Float::with_val(w, &eps * Float::with_val(w, sum.abs_ref()));
        if small {
            break;
        }
        j += 1;
        if j > max_terms {
            return Err(Error::Precision(format!(
                "Euler–Maclaurin did not converge for ζ({k}, {a}) at {prec} bits"
            )));
        }
        // (k)_{2j−1} = (k)_{2j−3} (k+2j−3)(k+2j−2)
        let grow = Integer::from(k + 2 * j - 3) * Integer::from(k + 2 * j - 2);
        poch_pow = Float::with_val(w, &poch_pow * &grow) * &inv_x2;
    }
    Ok(Float::with_val(prec, sum))
}

/// Route used for an `L`-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LMethod {
    HurwitzSum,
    CotangentSum,
}

#[derive(Debug, Clone)]
pub struct LValue {
    pub k: u32,
    pub character: DirichletCharacter,
    pub value: HpValue,
    pub method: LMethod,
}

/// `L(k, χ) = Σ χ(n) n^{−k}` for the (possibly imprimitive) character `χ`.
pub fn dirichlet_l(k: u32, chi: &DirichletCharacter, ctx: &HpContext) -> Result<LValue> {
    let m = chi.modulus();
    match k {
        0 => Err(domain("L(k, χ) needs k ≥ 1")),
        1 => {
            if chi.is_even() {
                return Err(Error::Unsupported(
                    "L(1, χ) is only evaluated for odd characters".into(),
                ));
            }
            // L(1, χ) = (π / 2m) Σ_t χ(t) cot(πt/m)
            let mut acc = ctx.zero();
            for &t in &chi.group().elements {
                let c = HpValue::from_real(ctx.cot_pi(t as i64, m));
                acc = &acc + &(&eval_numeric(chi.eval(t as i64), ctx) * &c);
            }
            let scale = Float::with_val(ctx.precision(), ctx.pi() / (2 * m));
            Ok(LValue {
                k,
                character: chi.clone(),
                value: acc.scale(&scale),
                method: LMethod::CotangentSum,
            })
        }
        _ => {
            // L(k, χ) = m^{−k} Σ_{t=1}^{m} χ(t) ζ(k, t/m)
            let mut acc = ctx.zero();
            for &t in &chi.group().elements {
                let a = if m == 1 {
                    Rational::from(1)
                } else {
                    Rational::from((t, m))
                };
                let z = hurwitz_zeta(k, &a, ctx)?;
                acc = &acc + &(&eval_numeric(chi.eval(t as i64), ctx) * &z);
            }
            let scale = Float::with_val(ctx.precision(), Float::with_val(ctx.precision(), m).pow(-(k as i32)));
            Ok(LValue {
                k,
                character: chi.clone(),
                value: acc.scale(&scale),
                method: LMethod::HurwitzSum,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenBernoulli {
    pub m: u32,
    pub character: DirichletCharacter,
    pub exact: CycloSum,
    pub value: HpValue,
}

/// `B_{m,χ} = f^{m−1} Σ_{a=1}^{f} χ(a) B_m(a/f)` with `f` the modulus of `χ`,
/// as an exact sum of roots of unity.
pub fn gen_bernoulli_exact(m: u32, chi: &DirichletCharacter) -> Result<CycloSum> {
    if m == 0 {
        return Err(domain("generalized Bernoulli numbers need m ≥ 1"));
    }
    let f = chi.modulus();
    let scale = Rational::from(Integer::from(f).pow(m - 1));
    let mut out = CycloSum::zero();
    for a in 1..=f {
        if let RootOfUnityValue::Root(t) = chi.eval(a as i64) {
            let b = bernoulli_poly(m, &Rational::from((a, f)));
            out.add_term(t, Rational::from(&b * &scale));
        }
    }
    Ok(out)
}

pub fn gen_bernoulli(m: u32, chi: &DirichletCharacter, ctx: &HpContext) -> Result<GenBernoulli> {
    let exact = gen_bernoulli_exact(m, chi)?;
    let value = exact.evaluate(ctx);
    Ok(GenBernoulli {
        m,
        character: chi.clone(),
        exact,
        value,
    })
}

/// `∏_{p | target} (1 − χ*(p) p^{m−1})`, exactly.
pub fn induction_factor_exact(chi: &DirichletCharacter, m: u32, target: u64) -> Result<CycloSum> {
    let star = chi.induce_primitive();
    if target == 0 || target % star.modulus() != 0 {
        return Err(domain(format!(
            "conductor {} does not divide {target}",
            star.modulus()
        )));
    }
    let mut out = CycloSum::rational(Rational::from(1));
    for p in prime_divisors(target) {
        let mut factor = CycloSum::rational(Rational::from(1));
        if let RootOfUnityValue::Root(t) = star.eval(p as i64) {
            let pk = Rational::from(Integer::from(p).pow(m.saturating_sub(1)));
            factor.add_term(t, -pk);
        }
        out = out.mul(&factor);
    }
    Ok(out)
}

pub fn induction_factor(
    chi: &DirichletCharacter,
    m: u32,
    target: u64,
    ctx: &HpContext,
) -> Result<HpValue> {
    Ok(induction_factor_exact(chi, m, target)?.evaluate(ctx))
}

/// `h^−(Q(ζ_d))` with its Hasse unit index and number of roots of unity.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassNumber {
    pub d: u64,
    pub h_minus: Integer,
    pub q: u32,
    pub w: u64,
    /// Distance of the evaluated product from `h_minus`.
    pub residual: Float,
}

pub fn hasse_unit_index(d: u64) -> u32 {
    if is_prime_power(d) {
        1
    } else {
        2
    }
}

pub fn roots_of_unity_count(d: u64) -> u64 {
    if d % 2 == 1 {
        2 * d
    } else {
        d
    }
}

/// `h^− = Q w ∏_{χ odd mod d} (−B_{1,χ*}/2)`, rounded and checked for
/// integrality.
pub fn relative_class_number(d: u64, ctx: &HpContext) -> Result<ClassNumber> {
    if d < 3 || d % 4 == 2 {
        return Err(domain(format!(
            "relative class number needs d ≥ 3, d ≢ 2 (mod 4), got {d}"
        )));
    }
    let q = hasse_unit_index(d);
    let w = roots_of_unity_count(d);
    let mut prod = ctx.int((q as u64 * w) as i64);
    let minus_half = HpValue::from_real(Float::with_val(ctx.precision(), -0.5));
    for chi in characters_with_parity(d, -1)? {
        let b = gen_bernoulli(1, &chi.induce_primitive(), ctx)?.value;
        prod = &prod * &(&b * &minus_half);
    }
    let rounded = Float::with_val(ctx.precision(), prod.re.round_ref());
    let h = rounded
        .to_integer()
        .ok_or_else(|| Error::Precision(format!("non-finite class number product for d = {d}")))?;
    let residual = (&prod - &HpValue::from_real(rounded)).abs();
    let bound = pow2(ctx.precision(), -((ctx.precision() / 2) as i32));
    if residual >= bound || h <= 0 {
        return Err(Error::Precision(format!(
            "class number product for d = {d} is not a positive integer to precision (residual {residual:.3e})"
        )));
    }
    Ok(ClassNumber {
        d,
        h_minus: h,
        q,
        w,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::exactnum::hp::pi;

    fn ctx(p: u32) -> HpContext {
        HpContext::new(p).unwrap()
    }

    fn close(a: &HpValue, b: &HpValue, bits: i32) -> bool {
        a.relative_distance(b) < pow2(64, -bits)
    }

    #[test]
    fn zeta_examples() {
        let c = ctx(256);
        let p = pi(256);
        let z2 = hurwitz_zeta(2, &Rational::from(1), &c).unwrap();
        let expected = HpValue::from_real(Float::with_val(256, p.square_ref()) / 6u32);
        assert!(close(&z2, &expected, 248));
        let zhalf = hurwitz_zeta(2, &Rational::from((1, 2)), &c).unwrap();
        let expected = HpValue::from_real(Float::with_val(256, p.square_ref()) / 2u32);
        assert!(close(&zhalf, &expected, 248));
        let z3 = hurwitz_zeta(3, &Rational::from(1), &c).unwrap();
        let z3_hi = hurwitz_zeta(3, &Rational::from(1), &ctx(384)).unwrap();
        assert!(close(&z3, &z3_hi, 248));
        assert!(z3.re.to_f64() - 1.2020569031595942 < 1e-15);
        assert!(hurwitz_zeta(1, &Rational::from(1), &c).is_err());
        assert!(hurwitz_zeta(2, &Rational::from(0), &c).is_err());
        assert!(hurwitz_zeta(2, &Rational::from((3, 2)), &c).is_err());
    }

    #[test]
    fn zeta_direct_summation_oracle() {
        // direct partial sum plus the integral tail bound, at low accuracy
        let c = ctx(128);
        for (k, a) in [(4u32, (1i64, 3i64)), (5, (2, 7)), (6, (1, 1))] {
            let q = Rational::from(a);
            let v = hurwitz_zeta(k, &q, &c).unwrap().re.to_f64();
            let af = a.0 as f64 / a.1 as f64;
            let n = 200_000;
            let mut s = 0.0f64;
            for j in (0..n).rev() {
                s += (j as f64 + af).powi(-(k as i32));
            }
            let tail = (n as f64 + af).powi(1 - k as i32) / (k as f64 - 1.0);
            assert!((v - s - tail).abs() < tail * 1e-3 + v * 1e-14, "k = {k}");
        }
    }

    #[test]
    fn l_value_examples() {
        let c = ctx(256);
        let p = pi(256);
        let odd4 = characters_with_parity(4, -1).unwrap().remove(0);
        let l = dirichlet_l(1, &odd4, &c).unwrap();
        assert_eq!(l.method, LMethod::CotangentSum);
        assert!(close(&l.value, &HpValue::from_real(Float::with_val(256, &p / 4u32)), 240));

        let triv2 = crate::characters::DirichletCharacter::trivial(2).unwrap();
        let l = dirichlet_l(2, &triv2, &c).unwrap();
        let expected = Float::with_val(256, p.square_ref()) / 8u32;
        assert!(close(&l.value, &HpValue::from_real(expected), 240));

        let odd3 = characters_with_parity(3, -1).unwrap().remove(0);
        let l = dirichlet_l(3, &odd3, &c).unwrap();
        let sqrt3 = Float::with_val(256, 3).sqrt();
        let expected = Float::with_val(256, p.clone().pow(3u32)) * 4u32 / (Float::with_val(256, &sqrt3 * 81u32));
        assert!(close(&l.value, &HpValue::from_real(expected), 240));

        let even5 = DirichletCharacter::trivial(5).unwrap();
        assert!(matches!(dirichlet_l(1, &even5, &c), Err(Error::Unsupported(_))));
    }

    #[test]
    fn gen_bernoulli_examples() {
        let c = ctx(128);
        let odd4 = characters_with_parity(4, -1).unwrap().remove(0);
        assert_eq!(gen_bernoulli_exact(1, &odd4).unwrap().as_rational(), Some(Rational::from((-1, 2))));
        let odd3 = characters_with_parity(3, -1).unwrap().remove(0);
        assert_eq!(gen_bernoulli_exact(1, &odd3).unwrap().as_rational(), Some(Rational::from((-1, 3))));
        let triv1 = DirichletCharacter::trivial(1).unwrap();
        let b = gen_bernoulli(2, &triv1, &c).unwrap();
        assert_eq!(b.exact.as_rational(), Some(Rational::from((1, 6))));
        assert!(b.value.im.is_zero());
    }

    #[test]
    fn induction_factor_examples() {
        let c = ctx(128);
        let quartic = enumerate_characters(5).unwrap()[1].clone();
        assert_eq!(induction_factor(&quartic, 3, 5, &c).unwrap(), c.one());
        let triv = DirichletCharacter::trivial(1).unwrap();
        assert!(induction_factor(&triv, 1, 6, &c).unwrap().is_zero());
        let odd4 = characters_with_parity(4, -1).unwrap().remove(0);
        assert_eq!(
            induction_factor_exact(&odd4, 1, 12).unwrap().as_rational(),
            Some(Rational::from(2))
        );
        assert!(induction_factor_exact(&odd4, 1, 6).is_err());
    }

    #[test]
    fn parity_vanishing() {
        let c = ctx(192);
        for m in 1..=24u64 {
            for chi in enumerate_characters(m).unwrap().iter() {
                for k in 2..=6u32 {
                    let wrong = (chi.parity() as i32) == if k % 2 == 0 { -1 } else { 1 };
                    if wrong {
                        let b = gen_bernoulli(k, chi, &c).unwrap().value;
                        assert!(b.abs() < pow2(64, -150), "m = {m}, k = {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn induction_relation_for_imprimitive_characters() {
        let lo = ctx(192);
        let hi = ctx(192 + 128);
        for modulus in 1..=36u64 {
            for chi in enumerate_characters(modulus).unwrap().iter() {
                let star = chi.induce_primitive();
                if star.modulus() == modulus {
                    continue;
                }
                for m in 1..=4u32 {
                    for c in [&lo, &hi] {
                        let lhs = gen_bernoulli(m, chi, c).unwrap().value;
                        let rhs = &gen_bernoulli(m, &star, c).unwrap().value
                            * &induction_factor(chi, m, modulus, c).unwrap();
                        let diff = (&lhs - &rhs).abs();
                        let scale = lhs.abs().max(&Float::with_val(64, 1));
                        assert!(diff < Float::with_val(64, &scale * pow2(64, -(c.precision() as i32 - 16))));
                    }
                }
            }
        }
    }

    #[test]
    fn class_number_examples() {
        let c = ctx(256);
        let h4 = relative_class_number(4, &c).unwrap();
        assert_eq!((h4.h_minus.to_u64(), h4.q, h4.w), (Some(1), 1, 4));
        assert_eq!(relative_class_number(5, &c).unwrap().h_minus, 1);
        let h23 = relative_class_number(23, &ctx(512)).unwrap();
        assert_eq!(h23.h_minus, 3);
        assert!(h23.residual < pow2(64, -64));
        assert!(relative_class_number(6, &c).is_err());
        assert!(relative_class_number(2, &c).is_err());
        // odd d: w equals 2d
        assert_eq!(relative_class_number(15, &c).unwrap().w, 30);
    }

    #[test]
    fn class_numbers_are_integral() {
        let c = ctx(256);
        for d in 3..=40u64 {
            if d % 4 == 2 {
                continue;
            }
            let h = relative_class_number(d, &c).unwrap();
            assert!(h.residual < pow2(64, -64), "d = {d}");
        }
        // known values beyond the class-number-one range
        assert_eq!(relative_class_number(29, &c).unwrap().h_minus, 8);
        assert_eq!(relative_class_number(31, &c).unwrap().h_minus, 9);
        assert_eq!(relative_class_number(39, &c).unwrap().h_minus, 2);
    }
}
