//! Exact sums of roots of unity.
//!
//! [`CycloSum`] keeps rational coefficients on reduced turns and is used to
//! carry exact character sums until the final numeric evaluation.
//! [`CycloVec`] is an integer vector over `ζ_M` with an exact zero test by
//! reduction modulo the cyclotomic polynomial `Φ_M`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use rug::{Integer, Rational};

use super::hp::{HpContext, HpValue};
use crate::error::{domain, Result};
use crate::residues::{divisors, gcd, lcm};

/// A reduced fraction of a full turn, `num/den ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Turn {
    pub num: u64,
    pub den: u64,
}

impl Turn {
    pub const ZERO: Turn = Turn { num: 0, den: 1 };

    pub fn new(num: i64, den: u64) -> Turn {
        assert!(den > 0);
        let r = num.rem_euclid(den as i64) as u64;
        if r == 0 {
            return Turn::ZERO;
        }
        let g = gcd(r, den);
        Turn { num: r / g, den: den / g }
    }

    pub fn add(self, other: Turn) -> Turn {
        let den = self.den / gcd(self.den, other.den) * other.den;
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        Turn::new(num as i64, den)
    }

    pub fn neg(self) -> Turn {
        Turn::new(-(self.num as i64), self.den)
    }

    /// `Some(±1)` for the two real roots.
    pub fn as_sign(self) -> Option<i32> {
        match (self.num, self.den) {
            (0, 1) => Some(1),
            (1, 2) => Some(-1),
            _ => None,
        }
    }
}

/// `Σ q_j e^{2πi t_j}` with exact rational coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CycloSum {
    terms: BTreeMap<Turn, Rational>,
}

impl CycloSum {
    pub fn zero() -> Self {
        CycloSum::default()
    }

    pub fn rational(q: Rational) -> Self {
        let mut s = CycloSum::zero();
        s.add_term(Turn::ZERO, q);
        s
    }

    pub fn root(t: Turn) -> Self {
        let mut s = CycloSum::zero();
        s.add_term(t, Rational::from(1));
        s
    }

    /// `cos(2π num/den)`.
    pub fn cos_turn(num: i64, den: u64) -> Self {
        let mut s = CycloSum::zero();
        s.add_term(Turn::new(num, den), Rational::from((1, 2)));
        s.add_term(Turn::new(-num, den), Rational::from((1, 2)));
        s
    }

    /// `sin(2π num/den) = cos(2π num/den − π/2)`.
    pub fn sin_turn(num: i64, den: u64) -> Self {
        let quarter = Turn::new(1, 4);
        let mut s = CycloSum::zero();
        s.add_term(Turn::new(num, den).add(quarter.neg()), Rational::from((1, 2)));
        s.add_term(Turn::new(-num, den).add(quarter), Rational::from((1, 2)));
        s
    }

    pub fn add_term(&mut self, t: Turn, q: Rational) {
        if q == 0 {
            return;
        }
        // fold −1·q onto the trivial root so rational values stay visibly rational
        let (t, q) = match t.as_sign() {
            Some(-1) => (Turn::ZERO, -q),
            _ => (t, q),
        };
        let entry = self.terms.entry(t).or_default();
        *entry += q;
        if *entry == 0 {
            self.terms.remove(&t);
        }
    }

    pub fn add(&self, other: &CycloSum) -> CycloSum {
        let mut out = self.clone();
        for (t, q) in &other.terms {
            out.add_term(*t, q.clone());
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> CycloSum {
        let mut out = CycloSum::zero();
        for (t, c) in &self.terms {
            out.add_term(*t, Rational::from(c * q));
        }
        out
    }

    pub fn mul(&self, other: &CycloSum) -> CycloSum {
        let mut out = CycloSum::zero();
        for (t1, q1) in &self.terms {
            for (t2, q2) in &other.terms {
                out.add_term(t1.add(*t2), Rational::from(q1 * q2));
            }
        }
        out
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when every root is `±1`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::new()),
            1 => self.terms.get(&Turn::ZERO).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Turn, &Rational)> {
        self.terms.iter()
    }

    /// Smallest `M` with every root in `Q(ζ_M)`.
    pub fn conductor(&self) -> u64 {
        self.terms.keys().fold(1, |m, t| lcm(m, t.den))
    }

    /// Integer image in `Z[ζ_M]` after clearing denominators.
    pub fn to_cyclovec(&self, order: u64) -> Result<CycloVec> {
        let scale = self
            .terms
            .values()
            .fold(Integer::from(1), |l, q| l.lcm(q.denom()));
        let mut v = CycloVec::new(order);
        for (t, q) in &self.terms {
            let c = q.numer() * Integer::from(&scale / q.denom());
            let c = c
                .to_i128()
                .ok_or_else(|| domain("cyclotomic coefficient overflow"))?;
            v.add_turn(t.num as i64, t.den, c)?;
        }
        Ok(v)
    }

    /// The value as a rational when it reduces to one modulo `Φ_M`.
    /// `None` when it is irrational or the reduction overflows.
    pub fn reduce_to_rational(&self) -> Option<Rational> {
        if let Some(q) = self.as_rational() {
            return Some(q);
        }
        let scale = self
            .terms
            .values()
            .fold(Integer::from(1), |l, q| l.lcm(q.denom()));
        let reduced = self.to_cyclovec(self.conductor()).ok()?.reduced().ok()?;
        if reduced[1..].iter().any(|&c| c != 0) {
            return None;
        }
        Some(Rational::from((Integer::from(reduced[0]), scale)))
    }

    /// Exact zero test by reduction modulo the cyclotomic polynomial.
    pub fn is_zero_exact(&self) -> Result<bool> {
        if self.terms.is_empty() {
            return Ok(true);
        }
        self.to_cyclovec(self.conductor())?.is_zero()
    }

    pub fn evaluate(&self, ctx: &HpContext) -> HpValue {
        let mut acc = ctx.zero();
        for (t, q) in &self.terms {
            let root = ctx.turn(t.num as i64, t.den);
            acc = &acc + &root.scale(&ctx.float(q));
        }
        acc
    }
}

fn phi_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<i128>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<i128>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Integer coefficients of `Φ_m`, lowest degree first.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<i128>> {
    if let Some(p) = phi_cache().read().unwrap().get(&m) {
        return Arc::clone(p);
    }
    // x^m − 1 divided by Φ_d for every proper divisor d
    let mut poly = vec![0i128; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in divisors(m) {
        if d == m {
            continue;
        }
        let div = cyclotomic_polynomial(d);
        poly = exact_div_monic(&poly, &div);
    }
    let poly = Arc::new(poly);
    phi_cache()
        .write()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::clone(&poly));
    poly
}

fn exact_div_monic(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qlen = rem.len() - dn;
    let mut quot = vec![0i128; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Element of `Z[ζ_M]` in the (redundant) power basis `1, ζ, …, ζ^{M−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloVec {
    order: u64,
    coeffs: Vec<i128>,
}

impl CycloVec {
    pub fn new(order: u64) -> Self {
        CycloVec {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Add `c · e^{2πi num/den}`; `den` must divide the order.
    pub fn add_turn(&mut self, num: i64, den: u64, c: i128) -> Result<()> {
        if self.order % den != 0 {
            return Err(domain(format!("root of order {den} outside Q(ζ_{})", self.order)));
        }
        let idx = (num.rem_euclid(den as i64) as u64 * (self.order / den)) as usize;
        self.coeffs[idx] = self.coeffs[idx]
            .checked_add(c)
            .ok_or_else(|| domain("cyclotomic coefficient overflow"))?;
        Ok(())
    }

    pub fn sub_assign(&mut self, other: &CycloVec) -> Result<()> {
        assert_eq!(self.order, other.order);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a
                .checked_sub(*b)
                .ok_or_else(|| domain("cyclotomic coefficient overflow"))?;
        }
        Ok(())
    }

    /// Canonical coefficients modulo `Φ_M`, degree below `φ(M)`.
    pub fn reduced(&self) -> Result<Vec<i128>> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut c = self.coeffs.clone();
        for i in (deg..c.len()).rev() {
            let lead = c[i];
            if lead == 0 {
                continue;
            }
            for (j, pj) in phi.iter().enumerate() {
                let k = i - deg + j;
                let delta = lead
                    .checked_mul(*pj)
                    .ok_or_else(|| domain("cyclotomic coefficient overflow"))?;
                c[k] = c[k]
                    .checked_sub(delta)
                    .ok_or_else(|| domain("cyclotomic coefficient overflow"))?;
            }
        }
        c.truncate(deg);
        Ok(c)
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.reduced()?.iter().all(|&c| c == 0))
    }

    pub fn evaluate(&self, ctx: &HpContext) -> HpValue {
        let mut acc = ctx.zero();
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let root = ctx.turn(j as i64, self.order);
                let coeff = rug::Float::with_val(ctx.precision(), rug::Integer::from(c));
                acc = &acc + &root.scale(&coeff);
            }
        }
        acc
    }
}
