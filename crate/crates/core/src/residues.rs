//! Integer and residue utilities: divisors, unit groups, `±1` orbits and
//! the odd reduction used by sine-type matrices.

use crate::error::{domain, Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Reduce a signed residue into `[0, m)`.
pub fn reduce(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn is_prime_power(n: u64) -> bool {
    n > 1 && factorize(n).len() == 1
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// `N` together with its divisor lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorContext {
    pub n: u64,
    /// Divisors in strictly decreasing order, a linear extension of
    /// reverse divisibility.
    pub divisors_block_order: Vec<u64>,
    pub tau: usize,
    /// `⌊N/2⌋`
    pub n_plus: u64,
    /// `⌊(N−1)/2⌋`
    pub n_minus: u64,
}

pub fn divisor_context(n: u64) -> Result<DivisorContext> {
    if n < 2 {
        return Err(domain(format!("N must be at least 2, got {n}")));
    }
    let mut divs = divisors(n);
    divs.reverse();
    Ok(DivisorContext {
        n,
        tau: divs.len(),
        divisors_block_order: divs,
        n_plus: n / 2,
        n_minus: (n - 1) / 2,
    })
}

impl DivisorContext {
    pub fn is_even(&self) -> bool {
        self.n % 2 == 0
    }

    /// `N_d = N / d`.
    pub fn cofactor(&self, d: u64) -> u64 {
        debug_assert_eq!(self.n % d, 0);
        self.n / d
    }
}

/// Inverse of `v` modulo `m`, in `[0, m)`.
pub fn inv_mod(v: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(domain("modulus must be positive"));
    }
    if m == 1 {
        return Ok(0);
    }
    let v = reduce(v, m);
    let (mut old_r, mut r) = (v as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { value: v, modulus: m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Representative of the orbit `{±a}` in `[0, ⌊N/2⌋]`.
pub fn orbit_rep(a: i64, n: u64) -> u64 {
    let r = reduce(a, n);
    r.min(n - r)
}

/// Signed representative used by the odd reduction `z_⟨a⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedIndex {
    pub sign: i8,
    pub rep: u64,
}

impl SignedIndex {
    pub const ZERO: SignedIndex = SignedIndex { sign: 0, rep: 0 };

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

pub fn signed_index(a: i64, n: u64) -> SignedIndex {
    let r = reduce(a, n);
    let n_minus = (n - 1) / 2;
    if r == 0 || (n % 2 == 0 && r == n / 2) {
        SignedIndex::ZERO
    } else if r <= n_minus {
        SignedIndex { sign: 1, rep: r }
    } else {
        SignedIndex { sign: -1, rep: n - r }
    }
}

/// A cyclic factor of `(Z/mZ)^×`, lifted to a residue mod `m` via CRT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub value: u64,
    pub order: u64,
}

/// `(Z/mZ)^×` with a canonical CRT generating set and a discrete-log table.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    pub modulus: u64,
    pub elements: Vec<u64>,
    pub generators: Vec<Generator>,
    pub exponent: u64,
    logs: Vec<Option<Vec<u64>>>,
}

impl UnitGroup {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(domain("modulus must be positive"));
        }
        if m == 1 {
            return Ok(UnitGroup {
                modulus: 1,
                elements: vec![1],
                generators: Vec::new(),
                exponent: 1,
                logs: vec![Some(Vec::new())],
            });
        }
        let mut gens = Vec::new();
        for (p, e) in factorize(m) {
            let q = p.pow(e);
            let local: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(3, 2)],
                    _ => vec![(q - 1, 2), (5, q / 4)],
                }
            } else {
                vec![(primitive_root(p, e), q / p * (p - 1))]
            };
            for (g, order) in local {
                gens.push(Generator {
                    value: crt_lift(g, q, m),
                    order,
                });
            }
        }
        let mut logs = vec![None; m as usize];
        let mut exps = vec![0u64; gens.len()];
        loop {
            let v = gens
                .iter()
                .zip(&exps)
                .fold(1u64, |acc, (g, &k)| acc * pow_mod(g.value, k, m) % m);
            logs[v as usize] = Some(exps.clone());
            // odometer over the exponent box
            let mut i = 0;
            loop {
                if i == gens.len() {
                    let elements: Vec<u64> = (1..m).filter(|&u| logs[u as usize].is_some()).collect();
                    let exponent = gens.iter().fold(1, |acc, g| lcm(acc, g.order));
                    return Ok(UnitGroup {
                        modulus: m,
                        elements,
                        generators: gens,
                        exponent,
                        logs,
                    });
                }
                exps[i] += 1;
                if exps[i] < gens[i].order {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Exponents of `a` over the generating set, or `None` for non-units.
    pub fn log(&self, a: i64) -> Option<&[u64]> {
        self.logs[reduce(a, self.modulus) as usize].as_deref()
    }

    pub fn contains(&self, a: i64) -> bool {
        self.log(a).is_some()
    }

    /// Units in `[1, ⌊m/2⌋]`: representatives of `G/{±1}`. For `m = 1` the
    /// single class is represented by `0`.
    pub fn half_representatives(&self) -> Vec<u64> {
        if self.modulus == 1 {
            return vec![0];
        }
        self.elements
            .iter()
            .copied()
            .filter(|&u| 2 * u <= self.modulus)
            .collect()
    }
}

fn crt_lift(g: u64, q: u64, m: u64) -> u64 {
    let rest = m / q;
    if rest == 1 {
        return g % m;
    }
    // x ≡ g (mod q), x ≡ 1 (mod rest)
    let inv = inv_mod(rest as i64, q).expect("coprime CRT moduli");
    let x = (g as u128 * rest as u128 * inv as u128
        + inv_mod(q as i64, rest).expect("coprime CRT moduli") as u128 * q as u128)
        % m as u128;
    x as u64
}

/// Smallest primitive root modulo `p^e` for an odd prime `p`.
fn primitive_root(p: u64, e: u32) -> u64 {
    let q = p.pow(e);
    let phi = q / p * (p - 1);
    let ell: Vec<u64> = prime_divisors(phi);
    (2..q)
        .find(|&g| gcd(g, p) == 1 && ell.iter().all(|&l| pow_mod(g, phi / l, q) != 1))
        .expect("odd prime powers have primitive roots")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_context_examples() {
        let c = divisor_context(12).unwrap();
        assert_eq!(c.divisors_block_order, vec![12, 6, 4, 3, 2, 1]);
        assert_eq!((c.tau, c.n_plus, c.n_minus), (6, 6, 5));
        let c = divisor_context(2).unwrap();
        assert_eq!(c.divisors_block_order, vec![2, 1]);
        assert_eq!((c.n_plus, c.n_minus), (1, 0));
        let c = divisor_context(45).unwrap();
        assert_eq!((c.tau, c.n_minus), (6, 22));
        assert!(divisor_context(1).is_err());
    }

    #[test]
    fn divisor_order_extends_reverse_divisibility() {
        for n in 2..300 {
            let c = divisor_context(n).unwrap();
            assert_eq!(c.divisors_block_order[0], n);
            assert_eq!(*c.divisors_block_order.last().unwrap(), 1);
            for (i, &d) in c.divisors_block_order.iter().enumerate() {
                for &e in &c.divisors_block_order[..i] {
                    assert!(d % e != 0 || d == e, "{e} listed before its multiple {d}");
                }
            }
            assert_eq!(c.n_plus - c.n_minus, u64::from(n % 2 == 0));
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv_mod(3, 7).unwrap(), 5);
        for m in 2..20 {
            assert_eq!(inv_mod(1, m).unwrap(), 1);
        }
        assert_eq!(inv_mod(5, 1).unwrap(), 0);
        assert_eq!(
            inv_mod(4, 6),
            Err(Error::NotInvertible { value: 4, modulus: 6 })
        );
    }

    #[test]
    fn orbit_and_signed_examples() {
        assert_eq!(orbit_rep(8, 10), 2);
        assert_eq!(orbit_rep(0, 10), 0);
        assert_eq!(orbit_rep(5, 10), 5);
        assert_eq!(signed_index(7, 10), SignedIndex { sign: -1, rep: 3 });
        assert_eq!(signed_index(5, 10), SignedIndex::ZERO);
        assert_eq!(signed_index(3, 11), SignedIndex { sign: 1, rep: 3 });
        assert_eq!(signed_index(0, 11), SignedIndex::ZERO);
    }

    #[test]
    fn reductions_have_expected_symmetry() {
        for n in 2..60u64 {
            for a in 0..(2 * n as i64) {
                let s = signed_index(a, n);
                let t = signed_index(n as i64 - a, n);
                assert_eq!(s.rep, t.rep);
                assert_eq!(s.sign, -t.sign);
                assert_eq!(orbit_rep(a, n), orbit_rep(n as i64 - a, n));
                assert!(orbit_rep(a, n) <= n / 2);
            }
        }
    }

    #[test]
    fn unit_groups_match_gcd_filter() {
        for m in 1..=500u64 {
            let g = UnitGroup::new(m).unwrap();
            let expected: Vec<u64> = if m == 1 {
                vec![1]
            } else {
                (1..m).filter(|&u| gcd(u, m) == 1).collect()
            };
            assert_eq!(g.elements, expected, "m = {m}");
            assert_eq!(g.order() as u64, totient(m));
            let prod: u64 = g.generators.iter().map(|x| x.order).product();
            assert_eq!(prod, totient(m));
            // every element decomposes uniquely within the stated orders
            for &u in &g.elements {
                let log = g.log(u as i64).unwrap();
                let back = g
                    .generators
                    .iter()
                    .zip(log)
                    .fold(1 % m, |acc, (gen, &k)| acc * pow_mod(gen.value, k, m) % m);
                assert_eq!(back, u % m);
            }
        }
    }

    #[test]
    fn half_representatives() {
        assert_eq!(UnitGroup::new(1).unwrap().half_representatives(), vec![0]);
        assert_eq!(UnitGroup::new(2).unwrap().half_representatives(), vec![1]);
        assert_eq!(UnitGroup::new(4).unwrap().half_representatives(), vec![1]);
        assert_eq!(UnitGroup::new(9).unwrap().half_representatives(), vec![1, 2, 4]);
    }
}
