//! Block factorization of paratrophic determinants.
//!
//! Multiplying `X_N`, `Y_N`, `Z_N` on the left by `F_N`, `C_N`, `S_N` gives a
//! matrix whose `(m, k)` entry is `d·ĥ_d(u v^{-1})` when `d = gcd(k, N)`
//! divides `m = du` (with `k = dv`) and zero otherwise. Ordered by decreasing
//! `d` this is block upper triangular, each diagonal block is a group matrix
//! over `(Z/N_dZ)^×` (or its quotient by `±1`), and the determinant splits
//! into one factor per divisor and character.

mod bernoulli;
mod report;
mod sun;
mod tangent;

use rug::{Float, Integer, Rational};

use crate::characters::{enumerate_characters, unit_group, DirichletCharacter, RootOfUnityValue};
use crate::error::{domain, Error, Result};
use crate::exactnum::hp::pow2;
use crate::exactnum::{CycloSum, CycloVec, HpContext, HpValue, Turn};
use crate::matrices::{
    build_matrix, build_paratrophic, build_transform, det_exact, transform_det_closed, BuiltMatrix, Family,
    Kind, Matrix, ValueAssignment,
};
use crate::par::{self, Exec};
use crate::residues::{divisors, gcd, inv_mod, lcm};

pub use bernoulli::{bernoulli_det_formula, bernoulli_det_formula_with, bernoulli_factor_scale, bernoulli_hat_closed};
pub use report::{
    assemble, pass_threshold, FactorEntry, FactorValue, FactorizationReport, Oracle, PASS_GUARD_BITS,
};
pub use sun::{permutation_sign, sun_check, sun_permutation, sun_sign_matrix, SunRecord};
pub use tangent::{
    class_number_form, tangent_det_formula, tangent_det_formula_with, tangent_hat_closed, tangent_hat_direct,
    tangent_hat_integer, tangent_lambda,
};

/// Working precision for tangent matrices of size `N`.
pub fn tangent_precision(n: u64) -> u32 {
    256.max(12 * n as u32)
}

/// `(d, t)` such that entry `(m, k)` of the transformed matrix is
/// `d·ĥ_d(t)`, or `None` when the entry vanishes because `gcd(k, N) ∤ m`.
pub fn entry_position(n: u64, m: u64, k: u64) -> Option<(u64, u64)> {
    let d = gcd(k, n);
    if m % d != 0 {
        return None;
    }
    let nd = n / d;
    if nd == 1 {
        return Some((d, 0));
    }
    let v_inv = inv_mod((k / d) as i64, nd).expect("k/d is a unit modulo N/d");
    Some((d, (m / d) % nd * v_inv % nd))
}

fn cofactor(n: u64, d: u64) -> Result<u64> {
    if d == 0 || n % d != 0 {
        return Err(domain(format!("{d} does not divide {n}")));
    }
    Ok(n / d)
}

/// `ĥ_d(t)` from its defining finite sum, as an exact cyclotomic sum.
fn hat_direct_exact(asg: &ValueAssignment, d: u64, t: u64) -> Result<CycloSum> {
    let n = asg.n();
    let nd = cofactor(n, d)?;
    let t = (t % nd) as i64;
    let val = |r: u64| asg.value_exact((d * r) as i64);
    let mut out = CycloSum::zero();
    match asg.kind() {
        Kind::X => {
            for r in 0..nd {
                out.add_term(Turn::new(t * r as i64, nd), val(r)?);
            }
        }
        Kind::Y => {
            let half = Rational::from((1, 2));
            out.add_term(Turn::ZERO, Rational::from(&val(0)? * &half));
            if nd % 2 == 0 {
                let sign = if t % 2 == 0 { 1 } else { -1 };
                out.add_term(Turn::ZERO, Rational::from(&val(nd / 2)? * &half) * sign);
            }
            for r in 1..=(nd - 1) / 2 {
                out = out.add(&CycloSum::cos_turn(t * r as i64, nd).scale(&val(r)?));
            }
        }
        Kind::Z => {
            for r in 1..=(nd - 1) / 2 {
                out = out.add(&CycloSum::sin_turn(t * r as i64, nd).scale(&val(r)?));
            }
        }
    }
    Ok(out)
}

/// `ĥ_d(t)` exactly. Tangent families go through their rational closed
/// forms, which exclude `t ≡ 0` for even exponents.
pub fn hat_exact(asg: &ValueAssignment, d: u64, t: u64) -> Result<CycloSum> {
    match asg.family() {
        Family::TangentPower { m } => {
            let q = tangent_hat_closed(*m, d, t, asg.n())?;
            Ok(CycloSum::rational(q))
        }
        _ => hat_direct_exact(asg, d, t),
    }
}

/// `ĥ_d(t)` numerically from the defining sum, for any family.
pub fn hat_direct_hp(asg: &ValueAssignment, d: u64, t: u64, ctx: &HpContext) -> Result<HpValue> {
    let n = asg.n();
    let nd = cofactor(n, d)?;
    let t = (t % nd) as i64;
    let val = |r: u64| asg.value_hp((d * r) as i64, ctx);
    let mut acc = ctx.zero();
    match asg.kind() {
        Kind::X => {
            for r in 0..nd {
                acc = &acc + &(&val(r) * &ctx.turn(t * r as i64, nd));
            }
        }
        Kind::Y => {
            let half = Rational::from((1, 2));
            acc = val(0).scale_rational(&half);
            if nd % 2 == 0 {
                let v = val(nd / 2).scale_rational(&half);
                acc = if t % 2 == 0 { &acc + &v } else { &acc - &v };
            }
            for r in 1..=(nd - 1) / 2 {
                acc = &acc + &val(r).scale(&ctx.cos_turn(t * r as i64, nd));
            }
        }
        Kind::Z => {
            for r in 1..=(nd - 1) / 2 {
                acc = &acc + &val(r).scale(&ctx.sin_turn(t * r as i64, nd));
            }
        }
    }
    Ok(acc)
}

/// `ĥ_d(t)` at the context precision, preferring exact or closed forms.
pub fn hat(asg: &ValueAssignment, d: u64, t: u64, ctx: &HpContext) -> Result<HpValue> {
    match hat_exact(asg, d, t) {
        Ok(s) => Ok(s.evaluate(ctx)),
        Err(Error::Unsupported(_)) => hat_direct_hp(asg, d, t, ctx),
        Err(e) => Err(e),
    }
}

/// Entry `(m, k)` of the transformed matrix, exactly.
pub fn transformed_entry_exact(asg: &ValueAssignment, m: u64, k: u64) -> Result<CycloSum> {
    match entry_position(asg.n(), m, k) {
        None => Ok(CycloSum::zero()),
        Some((d, t)) => Ok(hat_exact(asg, d, t)?.scale(&Rational::from(d))),
    }
}

/// Entry `(m, k)` of the transformed matrix from the defining sums.
pub fn transformed_entry(asg: &ValueAssignment, m: u64, k: u64, ctx: &HpContext) -> Result<HpValue> {
    match entry_position(asg.n(), m, k) {
        None => Ok(ctx.zero()),
        Some((d, t)) => Ok(hat_direct_hp(asg, d, t, ctx)?.scale(&Float::with_val(ctx.precision(), d))),
    }
}

/// Outcome of the exact comparison between the product transform·matrix and
/// the entry formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCheck {
    pub positions: usize,
    /// Positions where `gcd(k, N) ∤ m`.
    pub asserted_zeros: usize,
    pub mismatches: Vec<(u64, u64)>,
}

impl SupportCheck {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn to_i128(q: &Rational) -> Result<i128> {
    if *q.denom() != 1 {
        return Err(domain("value is not integral after scaling"));
    }
    q.numer()
        .to_i128()
        .ok_or_else(|| domain("scaled value exceeds 128 bits"))
}

/// Multiply the transform against the matrix in `Z[ζ_M]`, `M = lcm(N, 4)`,
/// and compare each entry with the entry formula by exact reduction
/// modulo `Φ_M`.
pub fn support_check_exact(asg: &ValueAssignment) -> Result<SupportCheck> {
    support_check_exact_with(asg, Exec::Parallel)
}

pub fn support_check_exact_with(asg: &ValueAssignment, exec: Exec) -> Result<SupportCheck> {
    if !asg.is_exact() {
        return Err(Error::Unsupported("exact support check needs exact values".into()));
    }
    let n = asg.n();
    let kind = asg.kind();
    let idx = kind.indices(n);
    let order = lcm(n, 4);
    let values: Vec<Rational> = (0..n).map(|a| asg.value_exact(a as i64)).collect::<Result<_>>()?;
    let l = values.iter().fold(Integer::from(1), |l, q| l.lcm(q.denom()));
    let scale = Rational::from(l * 4u32);
    // S·value(a) with S divisible by 4, so the halves and quarters below stay integral
    let scaled: Vec<i128> = values
        .iter()
        .map(|q| to_i128(&Rational::from(q * &scale)))
        .collect::<Result<_>>()?;
    let add_cos = |v: &mut CycloVec, a: i64, den: u64, c: i128| -> Result<()> {
        v.add_turn(a, den, c)?;
        v.add_turn(-a, den, c)
    };
    let add_sin = |v: &mut CycloVec, a: i64, den: u64, c: i128| -> Result<()> {
        let quarter = Turn::new(1, 4);
        let t1 = Turn::new(a, den).add(quarter.neg());
        let t2 = Turn::new(-a, den).add(quarter);
        v.add_turn(t1.num as i64, t1.den, c)?;
        v.add_turn(t2.num as i64, t2.den, c)
    };
    let rows = par::map(exec, &idx, |&m| -> Result<(Vec<(u64, u64)>, usize)> {
        let mut bad = Vec::new();
        let mut zeros = 0;
        for &k in &idx {
            let mut v = CycloVec::new(order);
            for &j in &idx {
                let a = (m * j % n) as i64;
                let c = scaled[(j * k % n) as usize];
                match kind {
                    Kind::X => v.add_turn(a, n, c)?,
                    Kind::Y => {
                        let half_weight = j == 0 || 2 * j == n;
                        add_cos(&mut v, a, n, if half_weight { c / 4 } else { c / 2 })?
                    }
                    Kind::Z => add_sin(&mut v, a, n, c / 2)?,
                }
            }
            match entry_position(n, m, k) {
                None => zeros += 1,
                Some((d, t)) => {
                    let nd = n / d;
                    let dd = d as i128;
                    let val = |r: u64| scaled[(d * r % n) as usize];
                    let mut w = CycloVec::new(order);
                    match kind {
                        Kind::X => {
                            for r in 0..nd {
                                w.add_turn((t * r) as i64, nd, dd * val(r))?;
                            }
                        }
                        Kind::Y => {
                            w.add_turn(0, 1, dd * val(0) / 2)?;
                            if nd % 2 == 0 {
                                let sign = if t % 2 == 0 { 1 } else { -1 };
                                w.add_turn(0, 1, sign * dd * val(nd / 2) / 2)?;
                            }
                            for r in 1..=(nd - 1) / 2 {
                                add_cos(&mut w, (t * r) as i64, nd, dd * val(r) / 2)?;
                            }
                        }
                        Kind::Z => {
                            for r in 1..=(nd - 1) / 2 {
                                add_sin(&mut w, (t * r) as i64, nd, dd * val(r) / 2)?;
                            }
                        }
                    }
                    v.sub_assign(&w)?;
                }
            }
            if !v.is_zero()? {
                bad.push((m, k));
            }
        }
        Ok((bad, zeros))
    });
    let mut check = SupportCheck {
        positions: idx.len() * idx.len(),
        asserted_zeros: 0,
        mismatches: Vec::new(),
    };
    for row in rows {
        let (bad, zeros) = row?;
        check.asserted_zeros += zeros;
        check.mismatches.extend(bad);
    }
    Ok(check)
}

/// A diagonal block `(d·ĥ_d(u v^{-1}))` of the transformed matrix.
#[derive(Debug, Clone)]
pub struct Block {
    pub d: u64,
    pub nd: u64,
    /// Row/column indices `m = du` of the block, increasing.
    pub indices: Vec<u64>,
    pub matrix: Matrix<HpValue>,
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub n: u64,
    pub kind: Kind,
    /// Native indices in block order: divisors decreasing, indices increasing.
    pub order: Vec<u64>,
    pub blocks: Vec<Block>,
    /// Largest `|transform·matrix − entry formula|` over all positions,
    /// relative to the largest entry; exactly zero for exact families.
    pub residual: Float,
    /// Largest relative entry strictly below the block diagonal after the
    /// permutation.
    pub off_block_residual: Float,
    pub exact: bool,
}

/// Representatives `u` of the block `d`: units of `Z/N_dZ` for `X`, units
/// in `[1, N_d/2]` for `Y` and `Z` (with `{0}` when `N_d = 1`).
fn block_units(kind: Kind, nd: u64) -> Result<Vec<u64>> {
    let g = unit_group(nd)?;
    Ok(match kind {
        Kind::X => {
            if nd == 1 {
                vec![0]
            } else {
                g.elements.clone()
            }
        }
        Kind::Y => g.half_representatives(),
        Kind::Z => {
            if nd <= 2 {
                Vec::new()
            } else {
                g.half_representatives()
            }
        }
    })
}

/// Group rows and columns by `gcd(·, N)` and extract the diagonal blocks.
pub fn decompose(asg: &ValueAssignment, ctx: &HpContext) -> Result<BlockDecomposition> {
    let n = asg.n();
    let kind = asg.kind();
    let mut order = Vec::new();
    let mut blocks = Vec::new();
    for &d in divisors(n).iter().rev() {
        let nd = n / d;
        let units = block_units(kind, nd)?;
        if units.is_empty() {
            continue;
        }
        let mut indices: Vec<u64> = units.iter().map(|u| d * u % n).collect();
        indices.sort_unstable();
        let matrix = Matrix::from_fn(indices.len(), indices.len(), |i, j| {
            transformed_entry_value(asg, indices[i], indices[j], ctx)
        });
        order.extend(&indices);
        blocks.push(Block { d, nd, indices, matrix });
    }
    let native = kind.indices(n);
    debug_assert_eq!(order.len(), native.len());
    let position: Vec<usize> = order
        .iter()
        .map(|m| native.iter().position(|x| x == m).expect("native index"))
        .collect();
    let mut block_of = Vec::with_capacity(order.len());
    for (b, block) in blocks.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, block.indices.len()));
    }

    let prec = ctx.precision();
    let zero = Float::new(prec);
    if asg.is_exact() {
        let check = support_check_exact(asg)?;
        if !check.holds() {
            return Err(Error::StructureViolation(format!(
                "transformed {} matrix for N = {n} differs from the entry formula at {:?}",
                kind.name(),
                check.mismatches
            )));
        }
        return Ok(BlockDecomposition {
            n,
            kind,
            order,
            blocks,
            residual: zero.clone(),
            off_block_residual: zero,
            exact: true,
        });
    }

    let built = build_paratrophic(asg, ctx)?.to_hp(ctx);
    let product = build_transform(kind.transform(), n, ctx).mul(&built);
    let scale = (0..product.rows())
        .flat_map(|i| product.row(i).iter().map(HpValue::abs))
        .fold(Float::with_val(prec, 1), |a, b| a.max(&b));
    let mut residual = zero.clone();
    let mut off_block = zero;
    for (pi, &i) in position.iter().enumerate() {
        for (pj, &j) in position.iter().enumerate() {
            let expected = transformed_entry(asg, native[i], native[j], ctx)?;
            let diff = Float::with_val(prec, (product.get(i, j) - &expected).abs() / &scale);
            residual = residual.max(&diff);
            if block_of[pi] > block_of[pj] {
                let below = Float::with_val(prec, product.get(i, j).abs() / &scale);
                off_block = off_block.max(&below);
            }
        }
    }
    let bound = pow2(prec, 32 - prec as i32);
    if residual >= bound || off_block >= bound {
        return Err(Error::StructureViolation(format!(
            "transformed {} matrix for N = {n} has residual {residual:.3e}",
            kind.name()
        )));
    }
    Ok(BlockDecomposition {
        n,
        kind,
        order,
        blocks,
        residual,
        off_block_residual: off_block,
        exact: false,
    })
}

fn transformed_entry_value(asg: &ValueAssignment, m: u64, k: u64, ctx: &HpContext) -> HpValue {
    match entry_position(asg.n(), m, k) {
        None => ctx.zero(),
        Some((d, t)) => hat(asg, d, t, ctx)
            .expect("valid block position")
            .scale(&Float::with_val(ctx.precision(), d)),
    }
}

/// Characters that index the factors of block `d` (modulus `N_d`).
pub fn factor_characters(kind: Kind, nd: u64) -> Result<Vec<DirichletCharacter>> {
    let all = enumerate_characters(nd)?;
    Ok(all
        .iter()
        .filter(|chi| match kind {
            Kind::X => true,
            Kind::Y => chi.is_even(),
            Kind::Z => !chi.is_even(),
        })
        .cloned()
        .collect())
}

/// `d·Σ_t ĥ_d(t)χ(t)` with `t` over `(Z/N_dZ)^×` (kind `X`) or over the
/// half representatives (kinds `Y`, `Z`).
pub fn dedekind_factor_exact(asg: &ValueAssignment, d: u64, chi: &DirichletCharacter) -> Result<CycloSum> {
    let n = asg.n();
    let nd = cofactor(n, d)?;
    if chi.modulus() != nd {
        return Err(domain(format!(
            "character modulus {} does not match N/d = {nd}",
            chi.modulus()
        )));
    }
    let kind = asg.kind();
    match kind {
        Kind::Y if !chi.is_even() => return Err(domain("Y factors need even characters")),
        Kind::Z if chi.is_even() => return Err(domain("Z factors need odd characters")),
        _ => {}
    }
    let mut acc = CycloSum::zero();
    for t in block_units(kind, nd)? {
        let value = if nd == 1 { RootOfUnityValue::ONE } else { chi.eval(t as i64) };
        if let RootOfUnityValue::Root(turn) = value {
            acc = acc.add(&hat_exact(asg, d, t)?.mul(&CycloSum::root(turn)));
        }
    }
    Ok(acc.scale(&Rational::from(d)))
}

pub fn dedekind_factor(
    asg: &ValueAssignment,
    d: u64,
    chi: &DirichletCharacter,
    ctx: &HpContext,
) -> Result<HpValue> {
    Ok(dedekind_factor_exact(asg, d, chi)?.evaluate(ctx))
}

fn generic_factors(asg: &ValueAssignment, lo: &HpContext, hi: &HpContext, exec: Exec) -> Result<Vec<FactorValue>> {
    let n = asg.n();
    let kind = asg.kind();
    let mut pairs = Vec::new();
    for &d in divisors(n).iter().rev() {
        let nd = n / d;
        if block_units(kind, nd)?.is_empty() {
            continue;
        }
        for chi in factor_characters(kind, nd)? {
            pairs.push((d, chi));
        }
    }
    par::map(exec, &pairs, |(d, chi)| -> Result<FactorValue> {
        let exact = dedekind_factor_exact(asg, *d, chi)?;
        Ok(FactorValue::from_exact(*d, chi, exact, lo, hi))
    })
    .into_iter()
    .collect()
}

/// The determinant from its factors alone, without any oracle: the
/// specialized product for the Bernoulli and tangent families and the
/// character factorization otherwise.
pub fn factorized_det(asg: &ValueAssignment, precision: u32, exec: Exec) -> Result<HpValue> {
    let n = asg.n();
    let ctx = HpContext::new(precision)?;
    let (prefactor, factors) = match asg.family() {
        Family::Bernoulli { k } => (bernoulli::prefactor(*k, n), bernoulli::factors(*k, n, &ctx, &ctx, exec)?),
        Family::TangentPower { m } => (tangent::prefactor(*m, n), tangent::factors(*m, n, &ctx, &ctx, exec)?),
        _ => (
            transform_det_closed(asg.kind().transform(), n).inverse(),
            generic_factors(asg, &ctx, &ctx, exec)?,
        ),
    };
    Ok(factors.iter().fold(prefactor.evaluate(&ctx), |acc, f| &acc * &f.lo))
}

/// Determinant of the built matrix: exact elimination for exact families,
/// LU at `precision` otherwise.
pub fn dense_det(asg: &ValueAssignment, precision: u32, exec: Exec) -> Result<HpValue> {
    let ctx = HpContext::new(precision)?;
    Ok(match build_matrix(asg, &ctx)? {
        BuiltMatrix::Exact(m) => ctx.real(&det_exact(&m)),
        BuiltMatrix::Hp(m) => crate::matrices::det_numeric_with(&m, exec).value,
    })
}

/// `det = det(transform)^{-1} · ∏_{d, χ} factor`, checked against a direct
/// determinant of the matrix.
pub fn det_via_factorization(asg: &ValueAssignment, precision: u32) -> Result<FactorizationReport> {
    det_via_factorization_with(asg, precision, Exec::Parallel)
}

pub fn det_via_factorization_with(
    asg: &ValueAssignment,
    precision: u32,
    exec: Exec,
) -> Result<FactorizationReport> {
    if let Family::TangentPower { m } = asg.family() {
        if m % 2 == 0 {
            return tangent_det_formula_with(*m, asg.n(), precision, exec);
        }
    }
    let n = asg.n();
    let kind = asg.kind();
    let lo = HpContext::new(precision)?;
    let hi = HpContext::new(precision + crate::exactnum::CHECK_EXTRA_BITS)?;

    let factors = generic_factors(asg, &lo, &hi, exec)?;

    let oracle = if asg.is_exact() {
        match build_matrix(asg, &lo)? {
            BuiltMatrix::Exact(m) => Oracle::Exact(det_exact(&m)),
            BuiltMatrix::Hp(_) => unreachable!("exact family"),
        }
    } else {
        Oracle::numeric(asg, &lo, &hi, exec)?
    };
    let prefactor = transform_det_closed(kind.transform(), n).inverse();
    Ok(assemble(
        n,
        asg.family(),
        "dedekind-factorization",
        prefactor,
        factors,
        oracle,
        None,
        precision,
    ))
}

#[cfg(test)]
mod tests;
