//! Dirichlet characters modulo `m` as exponent vectors over the canonical
//! generators of `(Z/mZ)^×`, with values kept as exact turns.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{domain, Result};
use crate::exactnum::{HpContext, HpValue, Turn};
use crate::residues::{divisors, gcd, lcm, reduce, UnitGroup};

fn group_cache() -> &'static RwLock<HashMap<u64, Arc<UnitGroup>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<UnitGroup>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn character_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<DirichletCharacter>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<DirichletCharacter>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared `(Z/mZ)^×`.
pub fn unit_group(m: u64) -> Result<Arc<UnitGroup>> {
    if let Some(g) = group_cache().read().unwrap().get(&m) {
        return Ok(Arc::clone(g));
    }
    let g = Arc::new(UnitGroup::new(m)?);
    group_cache()
        .write()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::clone(&g));
    Ok(g)
}

/// Exact value of a character: zero, or `e^{2πi·num/den}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootOfUnityValue {
    Zero,
    Root(Turn),
}

impl RootOfUnityValue {
    pub const ONE: RootOfUnityValue = RootOfUnityValue::Root(Turn::ZERO);

    pub fn is_zero(&self) -> bool {
        matches!(self, RootOfUnityValue::Zero)
    }

    pub fn turn(&self) -> Option<Turn> {
        match self {
            RootOfUnityValue::Zero => None,
            RootOfUnityValue::Root(t) => Some(*t),
        }
    }

    /// `Some(±1)` or `Some(0)` for real values.
    pub fn as_integer(&self) -> Option<i32> {
        match self {
            RootOfUnityValue::Zero => Some(0),
            RootOfUnityValue::Root(t) => t.as_sign(),
        }
    }

    pub fn mul(self, other: RootOfUnityValue) -> RootOfUnityValue {
        match (self, other) {
            (RootOfUnityValue::Root(a), RootOfUnityValue::Root(b)) => RootOfUnityValue::Root(a.add(b)),
            _ => RootOfUnityValue::Zero,
        }
    }

    pub fn conj(self) -> RootOfUnityValue {
        match self {
            RootOfUnityValue::Root(t) => RootOfUnityValue::Root(t.neg()),
            z => z,
        }
    }
}

pub fn eval_numeric(value: RootOfUnityValue, ctx: &HpContext) -> HpValue {
    match value {
        RootOfUnityValue::Zero => ctx.zero(),
        RootOfUnityValue::Root(t) => ctx.turn(t.num as i64, t.den),
    }
}

/// A Dirichlet character modulo `m`.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    exponents: Vec<u64>,
    order: u64,
    parity: i8,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus())
            .field("exponents", &self.exponents)
            .field("order", &self.order)
            .field("parity", &self.parity)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    pub fn from_exponents(m: u64, exponents: Vec<u64>) -> Result<Self> {
        let group = unit_group(m)?;
        if exponents.len() != group.generators.len() {
            return Err(domain(format!(
                "modulus {m} has {} generators, got {} exponents",
                group.generators.len(),
                exponents.len()
            )));
        }
        let exponents: Vec<u64> = exponents
            .iter()
            .zip(&group.generators)
            .map(|(&k, g)| k % g.order)
            .collect();
        let order = exponents
            .iter()
            .zip(&group.generators)
            .fold(1, |acc, (&k, g)| lcm(acc, g.order / gcd(k, g.order)));
        let mut chi = DirichletCharacter {
            group,
            exponents,
            order,
            parity: 1,
        };
        chi.parity = match chi.eval(-1).as_integer() {
            Some(-1) => -1,
            _ => 1,
        };
        Ok(chi)
    }

    pub fn trivial(m: u64) -> Result<Self> {
        let n = unit_group(m)?.generators.len();
        Self::from_exponents(m, vec![0; n])
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `+1` for even characters, `−1` for odd ones.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_even(&self) -> bool {
        self.parity == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    pub fn eval(&self, a: i64) -> RootOfUnityValue {
        match self.group.log(a) {
            None => RootOfUnityValue::Zero,
            Some(log) => {
                let t = log
                    .iter()
                    .zip(&self.exponents)
                    .zip(&self.group.generators)
                    .fold(Turn::ZERO, |acc, ((&e, &k), g)| {
                        acc.add(Turn::new(((e * k) % g.order) as i64, g.order))
                    });
                RootOfUnityValue::Root(t)
            }
        }
    }

    /// Smallest `f | m` such that the character factors through `(Z/fZ)^×`.
    pub fn conductor(&self) -> u64 {
        let m = self.modulus();
        for f in divisors(m) {
            let constant_on_kernel = self
                .group
                .elements
                .iter()
                .filter(|&&u| u % f == 1 % f)
                .all(|&u| self.eval(u as i64) == RootOfUnityValue::ONE);
            if constant_on_kernel {
                return f;
            }
        }
        m
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// The primitive character `χ*` modulo the conductor inducing `χ`.
    pub fn induce_primitive(&self) -> DirichletCharacter {
        let m = self.modulus();
        let f = self.conductor();
        let target = unit_group(f).expect("conductor is positive");
        let exponents = target
            .generators
            .iter()
            .map(|g| {
                let lift = (0..m)
                    .map(|j| g.value + j * f)
                    .find(|&u| gcd(u, m) == 1)
                    .expect("every unit mod f lifts to a unit mod m");
                let t = self.eval(lift as i64).turn().expect("lift is a unit");
                // χ(lift)^{order(g)} = 1, so the turn is a multiple of 1/order(g)
                debug_assert_eq!((t.num * g.order) % t.den, 0);
                t.num * g.order / t.den
            })
            .collect();
        DirichletCharacter::from_exponents(f, exponents).expect("valid exponent vector")
    }

    /// `χ*(p)` for the primitive character inducing `χ`.
    pub fn primitive_value(&self, a: i64) -> RootOfUnityValue {
        self.induce_primitive().eval(a)
    }

    /// Exponent vector for reports.
    pub fn label(&self) -> Vec<u64> {
        self.exponents.clone()
    }

    pub fn reduce_arg(&self, a: i64) -> u64 {
        reduce(a, self.modulus())
    }
}

/// All `φ(m)` characters modulo `m`, lexicographic in the exponent vector.
pub fn enumerate_characters(m: u64) -> Result<Arc<Vec<DirichletCharacter>>> {
    if m == 0 {
        return Err(domain("modulus must be positive"));
    }
    if let Some(c) = character_cache().read().unwrap().get(&m) {
        return Ok(Arc::clone(c));
    }
    let group = unit_group(m)?;
    let orders: Vec<u64> = group.generators.iter().map(|g| g.order).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(DirichletCharacter::from_exponents(m, exps.clone())?);
        // lexicographic odometer: last coordinate varies fastest
        let mut i = orders.len();
        loop {
            if i == 0 {
                let out = Arc::new(out);
                character_cache()
                    .write()
                    .unwrap()
                    .entry(m)
                    .or_insert_with(|| Arc::clone(&out));
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// Characters of the given parity (`+1` even, `−1` odd).
pub fn characters_with_parity(m: u64, parity: i8) -> Result<Vec<DirichletCharacter>> {
    Ok(enumerate_characters(m)?
        .iter()
        .filter(|c| c.parity() == parity)
        .cloned()
        .collect())
}
