//! Determinant assembly from factors and the comparison against an oracle.

use rug::{Float, Rational};
use serde::Serialize;

use crate::characters::DirichletCharacter;
use crate::error::Result;
use crate::exactnum::hp::{digits_for_bits, float_to_decimal, pow2};
use crate::exactnum::{CycloSum, HpContext, HpValue};
use crate::matrices::{build_matrix, det_numeric_with, hadamard_bound, ClosedFormDet, Family, NumericDet, ValueAssignment};
use crate::par::Exec;

/// A result passes when its relative error is below `2^{−p+PASS_GUARD_BITS}`.
pub const PASS_GUARD_BITS: u32 = 40;

pub fn pass_threshold(precision: u32) -> Float {
    pow2(64, PASS_GUARD_BITS as i32 - precision as i32)
}

/// One `(d, χ)` factor evaluated at the working and the check precision.
#[derive(Debug, Clone)]
pub struct FactorValue {
    pub d: u64,
    pub modulus: u64,
    pub chi: Vec<u64>,
    pub exact: Option<CycloSum>,
    pub exactly_zero: bool,
    pub lo: HpValue,
    pub hi: HpValue,
}

impl FactorValue {
    pub fn from_exact(d: u64, chi: &DirichletCharacter, exact: CycloSum, lo: &HpContext, hi: &HpContext) -> Self {
        let exactly_zero = exact.is_zero_exact().unwrap_or(false);
        FactorValue {
            d,
            modulus: chi.modulus(),
            chi: chi.label(),
            lo: exact.evaluate(lo),
            hi: exact.evaluate(hi),
            exact: Some(exact),
            exactly_zero,
        }
    }

    pub fn numeric(d: u64, chi: &DirichletCharacter, lo: HpValue, hi: HpValue) -> Self {
        FactorValue {
            d,
            modulus: chi.modulus(),
            chi: chi.label(),
            exact: None,
            exactly_zero: false,
            lo,
            hi,
        }
    }

    fn rational(&self) -> Option<Rational> {
        self.exact.as_ref().and_then(CycloSum::as_rational)
    }
}

/// Direct determinant of the matrix the formula describes.
#[derive(Debug, Clone)]
pub enum Oracle {
    Exact(Rational),
    Numeric { lo: NumericDet, hi: NumericDet, hadamard: Float },
}

impl Oracle {
    /// LU determinants of the built matrix at both precisions.
    pub fn numeric(asg: &ValueAssignment, lo: &HpContext, hi: &HpContext, exec: Exec) -> Result<Oracle> {
        let m_lo = build_matrix(asg, lo)?.to_hp(lo);
        let m_hi = build_matrix(asg, hi)?.to_hp(hi);
        Ok(Oracle::Numeric {
            hadamard: hadamard_bound(&m_lo),
            lo: det_numeric_with(&m_lo, exec),
            hi: det_numeric_with(&m_hi, exec),
        })
    }

    fn values(&self, lo: &HpContext, hi: &HpContext) -> (HpValue, HpValue) {
        match self {
            Oracle::Exact(q) => (lo.real(q), hi.real(q)),
            Oracle::Numeric { lo, hi, .. } => (lo.value.clone(), hi.value.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorEntry {
    pub d: u64,
    pub modulus: u64,
    pub chi: Vec<u64>,
    pub value: String,
    pub value_is_exact: bool,
}

/// An independent closed form of the same determinant.
#[derive(Debug, Clone, Serialize)]
pub struct ThirdValue {
    pub label: String,
    pub value: String,
    pub rel_error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<u32>,
    pub formula: String,
    pub prefactor: ClosedFormDet,
    pub factors: Vec<FactorEntry>,
    pub assembled: String,
    pub oracle: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub third: Option<ThirdValue>,
    pub rel_error: String,
    /// Largest disagreement between the two precisions of either side.
    pub precision_agreement: String,
    /// `−log2(error) − (p − 40)`; positive means passing with that many bits to spare.
    pub margin_bits: String,
    pub precision_bits: [u32; 2],
    pub pass: bool,
    #[serde(skip)]
    pub assembled_value: HpValue,
    #[serde(skip)]
    pub oracle_value: HpValue,
    #[serde(skip)]
    pub rel_error_value: Float,
    #[serde(skip)]
    pub exact_assembled: Option<Rational>,
    #[serde(skip)]
    pub exact_oracle: Option<Rational>,
}

impl FactorizationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Decimal rendering that drops an imaginary part below the pass threshold.
pub(crate) fn display_value(v: &HpValue, digits: usize, threshold: &Float) -> String {
    let mag = v.abs();
    let im_abs = Float::with_val(v.precision(), v.im.abs_ref());
    if im_abs <= Float::with_val(64, &mag * threshold) {
        float_to_decimal(&v.re, digits)
    } else {
        v.to_decimal(digits)
    }
}

fn error_string(e: &Float) -> String {
    float_to_decimal(e, 6)
}

fn margin_string(err: &Float, precision: u32) -> String {
    if err.is_zero() {
        return "exact".into();
    }
    let bits = -err.to_f64().log2() - (precision - PASS_GUARD_BITS) as f64;
    format!("{bits:.1}")
}

fn product(start: HpValue, values: impl Iterator<Item = HpValue>) -> HpValue {
    values.fold(start, |acc, v| &acc * &v)
}

/// The assembled value as a rational, when every factor is exact and the
/// product reduces to a rational. An irrational prefactor is handled through
/// the square of the product, with the sign read off the numeric value.
fn exact_rational_product(prefactor: &ClosedFormDet, factors: &[FactorValue], ctx: &HpContext) -> Option<Rational> {
    if let Some(p) = prefactor.as_rational() {
        let direct = factors
            .iter()
            .map(FactorValue::rational)
            .try_fold(p.clone(), |acc, q| q.map(|q| acc * q));
        if direct.is_some() {
            return direct;
        }
    }
    let prod = factors
        .iter()
        .try_fold(CycloSum::rational(Rational::from(1)), |acc, f| f.exact.as_ref().map(|e| acc.mul(e)))?;
    if let Some(p) = prefactor.as_rational() {
        return prod.reduce_to_rational().map(|q| q * p);
    }
    let square = prod.mul(&prod).reduce_to_rational()? * prefactor.squared().as_rational()?;
    if square <= 0 {
        return None;
    }
    let (num, den) = square.into_numer_denom();
    if !num.is_perfect_square() || !den.is_perfect_square() {
        return None;
    }
    let magnitude = Rational::from((num.sqrt(), den.sqrt()));
    let numeric = product(prefactor.evaluate(ctx), factors.iter().map(|f| f.lo.clone()));
    Some(if numeric.re < 0 { -magnitude } else { magnitude })
}

/// Multiply the prefactor with every factor (in the given order) and
/// compare with the oracle at the working precision, and each side with
/// itself across the two precisions.
#[allow(clippy::too_many_arguments)]
pub fn assemble(
    n: u64,
    family: &Family,
    formula: &str,
    prefactor: ClosedFormDet,
    factors: Vec<FactorValue>,
    oracle: Oracle,
    third: Option<(String, HpValue, HpValue)>,
    precision: u32,
) -> FactorizationReport {
    let hi_prec = precision + crate::exactnum::CHECK_EXTRA_BITS;
    let lo = HpContext::new(precision).expect("validated precision");
    let hi = HpContext::new(hi_prec).expect("validated precision");
    let threshold = pass_threshold(precision);
    let digits = digits_for_bits(precision - PASS_GUARD_BITS);

    let entries: Vec<FactorEntry> = factors
        .iter()
        .map(|f| {
            let rational = f.rational();
            FactorEntry {
                d: f.d,
                modulus: f.modulus,
                chi: f.chi.clone(),
                value_is_exact: rational.is_some(),
                value: match rational {
                    Some(q) => q.to_string(),
                    None => display_value(&f.lo, digits, &threshold),
                },
            }
        })
        .collect();

    let (oracle_lo, oracle_hi) = oracle.values(&lo, &hi);
    let exact_oracle = match &oracle {
        Oracle::Exact(q) => Some(q.clone()),
        Oracle::Numeric { .. } => None,
    };
    let exact_product = exact_rational_product(&prefactor, &factors, &lo);
    let any_zero = factors.iter().any(|f| f.exactly_zero);
    let zero = Float::new(64);

    let (assembled_value, assembled, rel_error, agreement, exact_assembled, mut pass) = if any_zero {
        let (rel, pass) = match &oracle {
            Oracle::Exact(q) => {
                let rel = if *q == 0 { zero.clone() } else { Float::with_val(64, 1) };
                (rel.clone(), rel.is_zero())
            }
            Oracle::Numeric { lo: o, hadamard, .. } => {
                let rel = Float::with_val(64, o.value.abs() / hadamard);
                let pass = rel < threshold;
                (rel, pass)
            }
        };
        (lo.zero(), "0".to_string(), rel, zero.clone(), Some(Rational::new()), pass)
    } else if let (Some(a), Some(o)) = (&exact_product, &exact_oracle) {
        let rel = if a == o {
            zero.clone()
        } else if *o == 0 {
            Float::with_val(64, 1)
        } else {
            Float::with_val(64, Rational::from(a - o).abs() / o.clone().abs())
        };
        let pass = a == o;
        (lo.real(a), a.to_string(), rel, zero.clone(), Some(a.clone()), pass)
    } else {
        let a_lo = product(prefactor.evaluate(&lo), factors.iter().map(|f| f.lo.clone()));
        let a_hi = product(prefactor.evaluate(&hi), factors.iter().map(|f| f.hi.clone()));
        let rel = Float::with_val(64, a_lo.relative_distance(&oracle_lo));
        let agree = Float::with_val(64, a_lo.relative_distance(&a_hi))
            .max(&Float::with_val(64, oracle_lo.relative_distance(&oracle_hi)));
        let pass = rel < threshold && agree < threshold;
        let text = display_value(&a_lo, digits, &threshold);
        (a_lo, text, rel, agree, None, pass)
    };

    let oracle_text = match &exact_oracle {
        Some(q) => q.to_string(),
        None => display_value(&oracle_lo, digits, &threshold),
    };

    let mut worst = rel_error.clone().max(&agreement);
    let third = third.map(|(label, t_lo, t_hi)| {
        let rel = if exact_assembled.as_ref().is_some_and(|q| *q == 0) {
            let scale = match &oracle {
                Oracle::Numeric { hadamard, .. } => hadamard.clone(),
                Oracle::Exact(_) => Float::with_val(64, 1),
            };
            Float::with_val(64, t_lo.abs() / &scale)
        } else {
            Float::with_val(64, t_lo.relative_distance(&oracle_lo))
                .max(&Float::with_val(64, t_lo.relative_distance(&assembled_value)))
                .max(&Float::with_val(64, t_lo.relative_distance(&t_hi)))
        };
        pass &= rel < threshold;
        worst = worst.clone().max(&rel);
        ThirdValue {
            label,
            value: display_value(&t_lo, digits, &threshold),
            rel_error: error_string(&rel),
        }
    });

    FactorizationReport {
        n,
        family: family.tag().to_string(),
        param: family.param(),
        formula: formula.to_string(),
        prefactor,
        factors: entries,
        assembled,
        oracle: oracle_text,
        third,
        rel_error: error_string(&rel_error),
        precision_agreement: error_string(&agreement),
        margin_bits: margin_string(&worst, precision),
        precision_bits: [precision, hi_prec],
        pass,
        assembled_value,
        oracle_value: oracle_lo,
        rel_error_value: rel_error,
        exact_assembled,
        exact_oracle,
    }
}
