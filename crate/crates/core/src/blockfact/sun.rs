//! Exact integer checks on the sign matrices obtained from `T_{1,N}` and
//! `T_{2,N}` after the sine and cosine transforms.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use super::tangent::tangent_hat_integer;
use super::{entry_position, tangent_precision};
use crate::characters::unit_group;
use crate::error::{domain, Result};
use crate::exactnum::hp::{float_to_decimal, pow2};
use crate::exactnum::HpContext;
use crate::matrices::{
    build_matrix, det_integer, det_numeric, hadamard_bound, transform_det_closed, Matrix, TransformKind,
    ValueAssignment,
};
use crate::residues::{divisors, inv_mod};

fn ser_integer<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SunRecord {
    #[serde(rename = "N")]
    pub big_n: u64,
    pub n: u64,
    pub tau: u64,
    #[serde(serialize_with = "ser_integer")]
    pub s_n: Integer,
    #[serde(serialize_with = "ser_integer")]
    pub t_n: Integer,
    /// `∏_{d | N, d ≠ N}` of the integer block determinants for `T_{2,N}`.
    #[serde(serialize_with = "ser_integer")]
    pub block_product: Integer,
    pub divisibility_i: bool,
    pub divisibility_ii: bool,
    pub sign_iii: bool,
    /// Sign of the permutation by cycle count, against the `n ≡ 2 (mod 4)` rule.
    pub permutation_odd: bool,
    pub parity_rule_holds: bool,
    /// `det T̃` against `(2/N)^n det S_N det T_{1,N}`.
    pub det_relation_rel_error: String,
    /// `det T_{2,N}` against `±N^{(n+1)/2}` times the block product.
    pub block_identity_rel_error: String,
    pub numeric_checks_pass: bool,
}

impl SunRecord {
    pub fn holds(&self) -> bool {
        self.divisibility_i
            && self.divisibility_ii
            && self.sign_iii
            && self.parity_rule_holds
            && self.numeric_checks_pass
    }
}

/// `σ(k) = 2k` for `2k ≤ n`, else `2n + 1 − 2k`, as zero-based images.
pub fn sun_permutation(n: u64) -> Vec<usize> {
    (1..=n)
        .map(|k| if 2 * k <= n { 2 * k } else { 2 * n + 1 - 2 * k })
        .map(|v| v as usize - 1)
        .collect()
}

/// `±1` by cycle decomposition.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0usize;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `T̃ = (2/N)·S_N·T_{1,N}`, whose entries are `(−1)^{t+1}` on the support
/// and `0` elsewhere.
pub fn sun_sign_matrix(big_n: u64) -> Result<Matrix<Integer>> {
    let n = odd_half(big_n)?;
    let scale = Rational::from((2, big_n));
    let mut data = Vec::with_capacity((n * n) as usize);
    for m in 1..=n {
        for k in 1..=n {
            let v = match entry_position(big_n, m, k) {
                None => Integer::new(),
                Some((d, t)) => {
                    let q = tangent_hat_integer(1, d, t, big_n)? * &scale;
                    q.numer().clone()
                }
            };
            data.push(v);
        }
    }
    Ok(Matrix::new(n as usize, n as usize, data))
}

fn odd_half(big_n: u64) -> Result<u64> {
    if big_n % 2 == 0 || big_n < 3 {
        return Err(domain(format!("the sign checks need odd N ≥ 3, got {big_n}")));
    }
    Ok((big_n - 1) / 2)
}

fn int_mul(a: &Matrix<Integer>, b: &Matrix<Integer>) -> Matrix<Integer> {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = Integer::new();
        for k in 0..a.cols() {
            acc += Integer::from(a.get(i, k) * b.get(k, j));
        }
        acc
    })
}

/// Integer block `((−1)^{t+1}(2t − N_d))` over `u, v ∈ T_{N_d}`, `t = uv^{-1}`.
fn cosine_block(nd: u64) -> Result<Matrix<Integer>> {
    let reps = unit_group(nd)?.half_representatives();
    let mut data = Vec::with_capacity(reps.len() * reps.len());
    for &u in &reps {
        for &v in &reps {
            let t = u * inv_mod(v as i64, nd)? % nd;
            let sign: i64 = if t % 2 == 1 { 1 } else { -1 };
            data.push(Integer::from(sign * (2 * t as i64 - nd as i64)));
        }
    }
    Ok(Matrix::new(reps.len(), reps.len(), data))
}

fn divisible_by_pow2(v: &Integer, e: i64) -> bool {
    e <= 0 || v.is_zero() || v.find_one(0).is_some_and(|low| low as i64 >= e)
}

pub fn sun_check(big_n: u64) -> Result<SunRecord> {
    let n = odd_half(big_n)?;
    let tau = divisors(big_n).len() as u64;
    let tilde = sun_sign_matrix(big_n)?;
    let det_tilde = det_integer(&tilde);
    let quarter_turns = n * (n - 1) / 2;
    let s_n = if quarter_turns % 2 == 0 { det_tilde.clone() } else { -det_tilde.clone() };

    let sigma = sun_permutation(n);
    let perm = Matrix::from_fn(n as usize, n as usize, |i, j| Integer::from((sigma[i] == j) as i32));
    let t_n = det_integer(&int_mul(&tilde.transpose(), &perm));
    let permutation_odd = permutation_sign(&sigma) == -1;
    let parity_rule_holds = permutation_odd == (n % 4 == 2);

    let e = n as i64 + 1 - tau as i64;
    let divisibility_i = divisible_by_pow2(&s_n, e);
    let sign_iii = if n % 4 == 3 { s_n == Integer::from(-&t_n) } else { s_n == t_n };

    let mut block_product = Integer::from(1);
    for d in divisors(big_n) {
        if d == big_n {
            continue;
        }
        block_product *= det_integer(&cosine_block(big_n / d)?);
    }
    let divisibility_ii = divisible_by_pow2(&block_product, 2 * e);

    // numeric links to the tangent determinants
    let p = tangent_precision(big_n);
    let ctx = HpContext::new(p)?;
    let threshold = pow2(64, 40 - p as i32);
    let t1 = build_matrix(&ValueAssignment::tangent(1, big_n)?, &ctx)?.to_hp(&ctx);
    let det_t1 = det_numeric(&t1).value;
    let det_s = transform_det_closed(TransformKind::S, big_n).evaluate(&ctx);
    let two_over_n = Float::with_val(p, Float::with_val(p, 2) / big_n);
    let predicted = (&det_s * &det_t1).scale(&Float::with_val(p, two_over_n.pow(n as u32)));
    let actual = ctx.real(&Rational::from(det_tilde.clone()));
    // a vanishing integer determinant is compared against the Hadamard bound
    let rel_i = if det_tilde == 0 {
        Float::with_val(64, det_t1.abs() / hadamard_bound(&t1))
    } else {
        Float::with_val(64, predicted.relative_distance(&actual))
    };

    let t2 = build_matrix(&ValueAssignment::tangent(2, big_n)?, &ctx)?.to_hp(&ctx);
    let det_t2 = det_numeric(&t2).value;
    let sign2 = if (n * (n + 1) / 2) % 2 == 0 { 1 } else { -1 };
    let root = crate::exactnum::hp::pow_rational(p, big_n, &Rational::from((n + 1, 2)));
    let via_blocks = ctx
        .real(&Rational::from(Integer::from(&block_product * sign2)))
        .scale(&root);
    let rel_ii = if block_product == 0 {
        Float::with_val(64, det_t2.abs() / hadamard_bound(&t2))
    } else {
        Float::with_val(64, det_t2.relative_distance(&via_blocks))
    };

    let numeric_checks_pass = rel_i < threshold && rel_ii < threshold;
    Ok(SunRecord {
        big_n,
        n,
        tau,
        s_n,
        t_n,
        block_product,
        divisibility_i,
        divisibility_ii,
        sign_iii,
        permutation_odd,
        parity_rule_holds,
        det_relation_rel_error: float_to_decimal(&rel_i, 6),
        block_identity_rel_error: float_to_decimal(&rel_ii, 6),
        numeric_checks_pass,
    })
}
