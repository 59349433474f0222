//! Bernoulli, Nörlund and Euler polynomials over exact rationals, and the
//! universal coefficients of the tangent-power transforms.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rug::{Integer, Rational};

use crate::error::{domain, Result};

fn number_cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rational::from(1)]))
}

fn poly_cache() -> &'static RwLock<HashMap<u32, Arc<Vec<Rational>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<Rational>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Bernoulli number `B_n` with `B_1 = −1/2`.
pub fn bernoulli_number(n: u32) -> Rational {
    {
        let cache = number_cache().read().unwrap();
        if let Some(b) = cache.get(n as usize) {
            return b.clone();
        }
    }
    let mut cache = number_cache().write().unwrap();
    while cache.len() <= n as usize {
        let m = cache.len() as u32;
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::new();
        for (j, b) in cache.iter().enumerate() {
            if j > 1 && j % 2 == 1 {
                continue;
            }
            acc += Rational::from(binomial(m + 1, j as u32)) * b;
        }
        let b = -acc / Rational::from(m + 1);
        cache.push(b);
    }
    cache[n as usize].clone()
}

/// Coefficients of `B_m(x)` in increasing degree.
pub fn bernoulli_coefficients(m: u32) -> Arc<Vec<Rational>> {
    if let Some(c) = poly_cache().read().unwrap().get(&m) {
        return Arc::clone(c);
    }
    let coeffs: Vec<Rational> = (0..=m)
        .map(|j| Rational::from(binomial(m, j)) * bernoulli_number(m - j))
        .collect();
    let coeffs = Arc::new(coeffs);
    poly_cache()
        .write()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::clone(&coeffs));
    coeffs
}

fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

pub fn bernoulli_poly(m: u32, x: &Rational) -> Rational {
    horner(&bernoulli_coefficients(m), x)
}

/// Fractional part in `[0, 1)`.
pub fn fract(x: &Rational) -> Rational {
    let floor = x.clone().floor();
    Rational::from(x - &floor)
}

/// `B̃_k(x) = B_k({x})`, with `B̃_1(0) = 0`.
pub fn periodic_bernoulli(k: u32, x: &Rational) -> Result<Rational> {
    if k == 0 {
        return Err(domain("periodic Bernoulli function needs k ≥ 1"));
    }
    let f = fract(x);
    if k == 1 && f == 0 {
        return Ok(Rational::new());
    }
    Ok(bernoulli_poly(k, &f))
}

/// Truncated product of two power series.
fn series_mul(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::new(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if *ai == 0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += Rational::from(ai * bj);
        }
    }
    out
}

/// Nörlund polynomial `B^{(l)}_j(x)`: `j!` times the coefficient of `t^j` in
/// `(t/(e^t − 1))^l e^{xt}`.
pub fn norlund_poly(l: u32, j: u32, x: &Rational) -> Rational {
    let len = j as usize + 1;
    let base: Vec<Rational> = (0..len as u32)
        .map(|n| bernoulli_number(n) / Rational::from(factorial(n)))
        .collect();
    let mut power = vec![Rational::new(); len];
    power[0] = Rational::from(1);
    for _ in 0..l {
        power = series_mul(&power, &base, len);
    }
    let mut xpow = Rational::from(1);
    let exp_series: Vec<Rational> = (0..len as u32)
        .map(|n| {
            let term = &xpow / Rational::from(factorial(n));
            xpow *= x;
            term
        })
        .collect();
    let full = series_mul(&power, &exp_series, len);
    &full[j as usize] * Rational::from(factorial(j))
}

/// Coefficient `a_{k,s}` of the even tangent-power transform, `1 ≤ s ≤ k`.
pub fn coeff_a(k: u32, s: u32) -> Result<Rational> {
    if k == 0 || s == 0 || s > k {
        return Err(domain(format!("coeff_a needs 1 ≤ s ≤ k, got k = {k}, s = {s}")));
    }
    let mut sum = Rational::new();
    for alpha in 0..=2 * k {
        sum += Rational::from(binomial(2 * k, alpha))
            * norlund_poly(2 * k, 2 * k - 2 * s, &Rational::from(alpha));
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let scale = Rational::from((
        Integer::from(sign) * binomial(2 * k - 1, 2 * s - 1),
        Integer::from(2) * factorial(2 * k - 1) * Integer::from(2 * s),
    ));
    Ok(scale * sum)
}

/// Coefficient `A_{k,s}` of the odd tangent-power transform, `0 ≤ s ≤ k`.
pub fn coeff_big_a(k: u32, s: u32) -> Result<Rational> {
    if s > k {
        return Err(domain(format!("coeff_A needs 0 ≤ s ≤ k, got k = {k}, s = {s}")));
    }
    let mut sum = Rational::new();
    for beta in 0..=2 * k + 1 {
        sum += Rational::from(binomial(2 * k + 1, beta))
            * norlund_poly(2 * k + 1, 2 * k - 2 * s, &Rational::from(beta));
    }
    let sign = if k % 2 == 0 { -1 } else { 1 };
    let scale = Rational::from((
        Integer::from(sign) * binomial(2 * k, 2 * s),
        Integer::from(2) * factorial(2 * k) * Integer::from(2 * s + 1),
    ));
    Ok(scale * sum)
}

/// Euler polynomial `E_m(x) = (2/(m+1)) (B_{m+1}(x) − 2^{m+1} B_{m+1}(x/2))`.
pub fn euler_poly(m: u32, x: &Rational) -> Rational {
    let half = x / Rational::from(2);
    let two_pow = Rational::from(Integer::from(1) << (m + 1));
    let diff = bernoulli_poly(m + 1, x) - two_pow * bernoulli_poly(m + 1, &half);
    Rational::from((2, m + 1)) * diff
}
