//! Paratrophic matrices `X_N`, `Y_N`, `Z_N` and their Bernoulli and
//! tangent-power instances, the transforms `F_N`, `C_N`, `S_N`, and the
//! determinant engines used as oracles.

use rand::Rng;
use rug::{Float, Integer, Rational};
use serde_json::{json, Value};

use crate::error::{domain, Result};
use crate::exactnum::bernoulli::periodic_bernoulli;
use crate::exactnum::hp::pow_rational;
use crate::exactnum::{CycloSum, HpContext, HpValue, Turn};
use crate::par::{self, Exec};
use crate::residues::{gcd, orbit_rep, reduce, signed_index};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Rows and columns reordered by `order` (a list of old indices).
    pub fn permuted(&self, order: &[usize]) -> Matrix<T> {
        Matrix::from_fn(order.len(), order.len(), |i, j| self.get(order[i], order[j]).clone())
    }
}

impl Matrix<HpValue> {
    pub fn mul(&self, other: &Matrix<HpValue>) -> Matrix<HpValue> {
        assert_eq!(self.cols, other.rows);
        let prec = self.data.iter().chain(&other.data).map(HpValue::precision).min().unwrap_or(64);
        let cols = other.cols;
        let rows = par::map_range(Exec::Parallel, self.rows, |i| {
            (0..cols)
                .map(|j| {
                    let mut acc = HpValue::zero(prec);
                    for k in 0..self.cols {
                        acc = &acc + &(self.get(i, k) * other.get(k, j));
                    }
                    acc
                })
                .collect::<Vec<_>>()
        });
        Matrix::new(self.rows, cols, rows.into_iter().flatten().collect())
    }
}

/// Which reduction of the index `ij` a matrix uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Kind {
    /// `x_{ij mod N}` over `0..N`.
    X,
    /// `y_[ij]` over `0..=⌊N/2⌋`, even in the index.
    Y,
    /// `z_⟨ij⟩` over `1..=⌊(N−1)/2⌋`, odd in the index.
    Z,
}

impl Kind {
    pub fn indices(self, n: u64) -> Vec<u64> {
        match self {
            Kind::X => (0..n).collect(),
            Kind::Y => (0..=n / 2).collect(),
            Kind::Z => (1..=(n - 1) / 2).collect(),
        }
    }

    pub fn transform(self) -> TransformKind {
        match self {
            Kind::X => TransformKind::F,
            Kind::Y => TransformKind::C,
            Kind::Z => TransformKind::S,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::X => "x",
            Kind::Y => "y",
            Kind::Z => "z",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `x_0, …, x_{N−1}`.
    GenericX(Vec<Rational>),
    /// `y_[0], …, y_[⌊N/2⌋]`.
    GenericY(Vec<Rational>),
    /// `z_1, …, z_{⌊(N−1)/2⌋}`.
    GenericZ(Vec<Rational>),
    /// `B̃_k(a/N)`.
    Bernoulli { k: u32 },
    /// `tan^m(πa/N)`, `N` odd.
    TangentPower { m: u32 },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::GenericX(_) => "x",
            Family::GenericY(_) => "y",
            Family::GenericZ(_) => "z",
            Family::Bernoulli { .. } => "bernoulli",
            Family::TangentPower { .. } => "tan",
        }
    }

    pub fn param(&self) -> Option<u32> {
        match self {
            Family::Bernoulli { k } => Some(*k),
            Family::TangentPower { m } => Some(*m),
            _ => None,
        }
    }
}

/// A function on `Z/NZ` together with the reduction it is read through.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueAssignment {
    n: u64,
    family: Family,
}

impl ValueAssignment {
    pub fn new(n: u64, family: Family) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("N must be at least 2, got {n}")));
        }
        let expected = |kind: Kind| kind.indices(n).len();
        match &family {
            Family::GenericX(v) if v.len() != expected(Kind::X) => {
                return Err(domain(format!("X assignment needs {} values", expected(Kind::X))))
            }
            Family::GenericY(v) if v.len() != expected(Kind::Y) => {
                return Err(domain(format!("Y assignment needs {} values", expected(Kind::Y))))
            }
            Family::GenericZ(v) if v.len() != expected(Kind::Z) => {
                return Err(domain(format!("Z assignment needs {} values", expected(Kind::Z))))
            }
            Family::Bernoulli { k: 0 } => return Err(domain("Bernoulli family needs k ≥ 1")),
            Family::TangentPower { m } => {
                if *m == 0 {
                    return Err(domain("tangent family needs m ≥ 1"));
                }
                if n % 2 == 0 || n < 3 {
                    return Err(domain(format!("tangent family needs odd N ≥ 3, got {n}")));
                }
            }
            _ => {}
        }
        Ok(ValueAssignment { n, family })
    }

    pub fn bernoulli(k: u32, n: u64) -> Result<Self> {
        Self::new(n, Family::Bernoulli { k })
    }

    pub fn tangent(m: u32, n: u64) -> Result<Self> {
        Self::new(n, Family::TangentPower { m })
    }

    /// Seeded random generic assignment with small rational values.
    pub fn random(kind: Kind, n: u64, rng: &mut impl Rng) -> Result<Self> {
        let len = kind.indices(n).len();
        let values: Vec<Rational> = (0..len)
            .map(|_| Rational::from((rng.gen_range(-12i64..=12), rng.gen_range(1i64..=5))))
            .collect();
        let family = match kind {
            Kind::X => Family::GenericX(values),
            Kind::Y => Family::GenericY(values),
            Kind::Z => Family::GenericZ(values),
        };
        Self::new(n, family)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kind(&self) -> Kind {
        match &self.family {
            Family::GenericX(_) => Kind::X,
            Family::GenericY(_) => Kind::Y,
            Family::GenericZ(_) => Kind::Z,
            Family::Bernoulli { k } | Family::TangentPower { m: k } => {
                if k % 2 == 0 {
                    Kind::Y
                } else {
                    Kind::Z
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.family, Family::TangentPower { .. })
    }

    /// Index set of [`build_matrix`]: the native one of the kind, except
    /// that even tangent powers use `1..=n` (the row `i = 0` vanishes).
    pub fn matrix_indices(&self) -> Vec<u64> {
        match self.family {
            Family::TangentPower { m } if m % 2 == 0 => (1..=(self.n - 1) / 2).collect(),
            _ => self.kind().indices(self.n),
        }
    }

    /// The value read at the (unreduced) product index `a`, exactly.
    pub fn value_exact(&self, a: i64) -> Result<Rational> {
        let n = self.n;
        Ok(match &self.family {
            Family::GenericX(v) => v[reduce(a, n) as usize].clone(),
            Family::GenericY(v) => v[orbit_rep(a, n) as usize].clone(),
            Family::GenericZ(v) => {
                let s = signed_index(a, n);
                if s.is_zero() {
                    Rational::new()
                } else {
                    Rational::from(&v[s.rep as usize - 1] * s.sign as i32)
                }
            }
            Family::Bernoulli { k } => periodic_bernoulli(*k, &Rational::from((a, n as i64)))?,
            Family::TangentPower { .. } => {
                return Err(domain("tangent values are not rational"));
            }
        })
    }

    /// The value at index `a` in the given context.
    pub fn value_hp(&self, a: i64, ctx: &HpContext) -> HpValue {
        match &self.family {
            Family::TangentPower { m } => {
                let a = reduce(a, self.n) as i64;
                let t = ctx.tan_pi(a, self.n);
                let p = ctx.precision();
                HpValue::from_real(Float::with_val(p, rug::ops::Pow::pow(&t, *m)))
            }
            _ => ctx.real(&self.value_exact(a).expect("exact family")),
        }
    }
}

/// A built matrix together with the index set it lives on.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltMatrix {
    Exact(Matrix<Rational>),
    Hp(Matrix<HpValue>),
}

impl BuiltMatrix {
    pub fn size(&self) -> usize {
        match self {
            BuiltMatrix::Exact(m) => m.rows(),
            BuiltMatrix::Hp(m) => m.rows(),
        }
    }

    pub fn to_hp(&self, ctx: &HpContext) -> Matrix<HpValue> {
        match self {
            BuiltMatrix::Exact(m) => m.map(|q| ctx.real(q)),
            BuiltMatrix::Hp(m) => m.clone(),
        }
    }
}

fn build_on(asg: &ValueAssignment, idx: &[u64], ctx: &HpContext) -> Result<BuiltMatrix> {
    let n = idx.len();
    if asg.is_exact() {
        let mut data = Vec::with_capacity(n * n);
        for &i in idx {
            for &j in idx {
                data.push(asg.value_exact((i * j) as i64)?);
            }
        }
        Ok(BuiltMatrix::Exact(Matrix::new(n, n, data)))
    } else {
        Ok(BuiltMatrix::Hp(Matrix::from_fn(n, n, |i, j| {
            asg.value_hp((idx[i] * idx[j]) as i64, ctx)
        })))
    }
}

/// `B_{k,N}`, `T_{m,N}` or the generic `X_N`/`Y_N`/`Z_N`.
pub fn build_matrix(asg: &ValueAssignment, ctx: &HpContext) -> Result<BuiltMatrix> {
    build_on(asg, &asg.matrix_indices(), ctx)
}

/// The full paratrophic matrix on the native index set of the kind.
pub fn build_paratrophic(asg: &ValueAssignment, ctx: &HpContext) -> Result<BuiltMatrix> {
    build_on(asg, &asg.kind().indices(asg.n()), ctx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TransformKind {
    /// `(ω^{mn})` over `0..N`.
    F,
    /// `(c_n cos(2πmn/N))` over `0..=⌊N/2⌋`.
    C,
    /// `(sin(2πmn/N))` over `1..=⌊(N−1)/2⌋`.
    S,
}

impl TransformKind {
    pub fn kind(self) -> Kind {
        match self {
            TransformKind::F => Kind::X,
            TransformKind::C => Kind::Y,
            TransformKind::S => Kind::Z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::F => "F",
            TransformKind::C => "C",
            TransformKind::S => "S",
        }
    }
}

/// Entry `(m, k)` of the transform as an exact sum of roots of unity.
pub fn transform_entry_exact(kind: TransformKind, n: u64, m: u64, k: u64) -> CycloSum {
    let a = (m * k % n) as i64;
    match kind {
        TransformKind::F => CycloSum::root(Turn::new(a, n)),
        TransformKind::C => {
            let half_weight = k == 0 || (n % 2 == 0 && k == n / 2);
            let c = CycloSum::cos_turn(a, n);
            if half_weight {
                c.scale(&Rational::from((1, 2)))
            } else {
                c
            }
        }
        TransformKind::S => CycloSum::sin_turn(a, n),
    }
}

pub fn build_transform(kind: TransformKind, n: u64, ctx: &HpContext) -> Matrix<HpValue> {
    let idx = kind.kind().indices(n);
    Matrix::from_fn(idx.len(), idx.len(), |i, j| {
        let (m, k) = (idx[i], idx[j]);
        let a = (m * k % n) as i64;
        match kind {
            TransformKind::F => ctx.turn(a, n),
            TransformKind::C => {
                let c = ctx.cos_turn(a, n);
                let half_weight = k == 0 || (n % 2 == 0 && k == n / 2);
                HpValue::from_real(if half_weight { c / 2u32 } else { c })
            }
            TransformKind::S => HpValue::from_real(ctx.sin_turn(a, n)),
        }
    })
}

/// `i^{i_power} · sign · N^{pow_n} · 2^{pow_2}`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ClosedFormDet {
    #[serde(skip)]
    pub n: u64,
    pub i_power: u8,
    pub sign: i8,
    #[serde(rename = "pow_N", serialize_with = "ser_rational")]
    pub pow_n: Rational,
    pub pow_2: i64,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl ClosedFormDet {
    pub fn one(n: u64) -> Self {
        ClosedFormDet {
            n,
            i_power: 0,
            sign: 1,
            pow_n: Rational::new(),
            pow_2: 0,
        }
    }

    pub fn inverse(&self) -> Self {
        ClosedFormDet {
            n: self.n,
            i_power: (4 - self.i_power) % 4,
            sign: self.sign,
            pow_n: -self.pow_n.clone(),
            pow_2: -self.pow_2,
        }
    }

    pub fn squared(&self) -> Self {
        ClosedFormDet {
            n: self.n,
            i_power: (2 * self.i_power) % 4,
            sign: 1,
            pow_n: Rational::from(&self.pow_n * 2u32),
            pow_2: 2 * self.pow_2,
        }
    }

    /// Exact value when `N^{pow_n}` is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.i_power % 2 == 1 || *self.pow_n.denom() != 1 {
            return None;
        }
        let e = self.pow_n.numer().to_i32()?;
        let base = Rational::from(self.n);
        let mut v = Rational::from(1);
        for _ in 0..e.unsigned_abs() {
            v *= &base;
        }
        if e < 0 {
            v.recip_mut();
        }
        let two = Rational::from(2);
        for _ in 0..self.pow_2.unsigned_abs() {
            if self.pow_2 < 0 {
                v /= &two;
            } else {
                v *= &two;
            }
        }
        let sign = self.sign as i32 * if self.i_power == 2 { -1 } else { 1 };
        Some(v * sign)
    }

    pub fn evaluate(&self, ctx: &HpContext) -> HpValue {
        let p = ctx.precision();
        let mag = pow_rational(p, self.n, &self.pow_n) * crate::exactnum::hp::pow2(p, self.pow_2 as i32);
        let mag = Float::with_val(p, mag * self.sign as i32);
        match self.i_power % 4 {
            0 => HpValue::from_real(mag),
            1 => HpValue::new(Float::new(p), mag),
            2 => HpValue::from_real(-mag),
            _ => HpValue::new(Float::new(p), -mag),
        }
    }
}

/// `det_numeric(build_transform)` against the closed form.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TransformCheck {
    #[serde(rename = "N")]
    pub n: u64,
    pub transform: &'static str,
    pub closed: String,
    pub numeric: String,
    pub rel_error: String,
    pub precision_bits: [u32; 2],
    pub pass: bool,
    #[serde(skip)]
    pub rel_error_value: Float,
}

/// Compare at `precision` and `precision + 128`; passes when both relative
/// errors are below `2^{−precision+tolerance_bits}`.
pub fn transform_check(kind: TransformKind, n: u64, precision: u32, tolerance_bits: u32) -> Result<TransformCheck> {
    let hi_prec = precision + crate::exactnum::CHECK_EXTRA_BITS;
    let threshold = crate::exactnum::hp::pow2(64, tolerance_bits as i32 - precision as i32);
    let mut errors = Vec::with_capacity(2);
    let mut shown = None;
    for p in [precision, hi_prec] {
        let ctx = HpContext::new(p)?;
        let closed = transform_det_closed(kind, n).evaluate(&ctx);
        let numeric = det_numeric(&build_transform(kind, n, &ctx)).value;
        errors.push(Float::with_val(64, numeric.relative_distance(&closed)));
        if shown.is_none() {
            let digits = crate::exactnum::hp::digits_for_bits(precision.saturating_sub(tolerance_bits));
            shown = Some((closed.to_decimal(digits), numeric.to_decimal(digits)));
        }
    }
    let (closed, numeric) = shown.expect("two precisions evaluated");
    let worst = errors[0].clone().max(&errors[1]);
    Ok(TransformCheck {
        n,
        transform: kind.name(),
        closed,
        numeric,
        rel_error: crate::exactnum::float_to_decimal(&errors[0], 6),
        precision_bits: [precision, hi_prec],
        pass: worst < threshold,
        rel_error_value: errors[0].clone(),
    })
}

/// Closed forms of `det F_N`, `det C_N`, `det S_N`.
pub fn transform_det_closed(kind: TransformKind, n: u64) -> ClosedFormDet {
    let n_plus = (n / 2) as i64;
    let n_minus = ((n - 1) / 2) as i64;
    let parity_sign = |e: i64| if e % 2 == 0 { 1 } else { -1 };
    match kind {
        TransformKind::F => ClosedFormDet {
            n,
            i_power: (((n - 1) * (3 * n - 2) / 2) % 4) as u8,
            sign: 1,
            pow_n: Rational::from((n, 2)),
            pow_2: 0,
        },
        TransformKind::C => ClosedFormDet {
            n,
            i_power: 0,
            sign: parity_sign(n_plus * (n_plus + 1) / 2),
            pow_n: Rational::from((n_plus + 1, 2)),
            pow_2: -(n_plus + 1),
        },
        TransformKind::S => ClosedFormDet {
            n,
            i_power: 0,
            sign: parity_sign(n_minus * (n_minus - 1) / 2),
            pow_n: Rational::from((n_minus, 2)),
            pow_2: -n_minus,
        },
    }
}

/// Fraction-free (Bareiss) determinant of an integer matrix. The pivot is
/// the first nonzero entry of the column, so the result does not depend on
/// the execution mode.
pub fn det_integer(m: &Matrix<Integer>) -> Integer {
    det_integer_with(m, Exec::Parallel)
}

pub fn det_integer_with(m: &Matrix<Integer>, exec: Exec) -> Integer {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Integer::from(1);
    }
    let mut a = m.data.clone();
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| a[i * n + k] != 0) else {
            return Integer::new();
        };
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..];
        let pivot = &pivot_row[k];
        let below = &mut tail[..(n - k - 1) * n];
        let update = |_: usize, row: &mut [Integer]| {
            let lead = row[k].clone();
            for j in k + 1..n {
                let v = Integer::from(&row[j] * pivot) - Integer::from(&lead * &pivot_row[j]);
                row[j] = v.div_exact(&prev);
            }
            row[k] = Integer::new();
        };
        if n - k > 24 {
            par::for_each_row(exec, below, n, update);
        } else {
            par::for_each_row(Exec::Sequential, below, n, update);
        }
        prev = a[k * n + k].clone();
    }
    Integer::from(&a[n * n - 1] * sign)
}

/// Exact rational determinant: rows are cleared of denominators, then
/// reduced fraction-free.
pub fn det_exact(m: &Matrix<Rational>) -> Rational {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut scale = Integer::from(1);
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = m.row(i);
        let l = row.iter().fold(Integer::from(1), |l, q| l.lcm(q.denom()));
        for q in row {
            data.push(q.numer() * Integer::from(&l / q.denom()));
        }
        scale *= l;
    }
    Rational::from((det_integer(&Matrix::new(n, n, data)), scale))
}

/// Outcome of LU elimination at a fixed working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericDet {
    pub value: HpValue,
    /// A pivot fell below `2^{−p+32}` times the largest entry.
    pub singular: bool,
    pub precision: u32,
}

/// LU with partial pivoting. Ties in pivot magnitude go to the lowest row.
pub fn det_numeric(m: &Matrix<HpValue>) -> NumericDet {
    det_numeric_with(m, Exec::Parallel)
}

pub fn det_numeric_with(m: &Matrix<HpValue>, exec: Exec) -> NumericDet {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let prec = m.data.iter().map(HpValue::precision).min().unwrap_or(64);
    if n == 0 {
        return NumericDet {
            value: HpValue::from_real(Float::with_val(prec, 1)),
            singular: false,
            precision: prec,
        };
    }
    let w = prec + 16;
    let mut a: Vec<HpValue> = m.data.iter().map(|v| v.with_precision(w)).collect();
    let largest = a.iter().map(HpValue::abs).fold(Float::new(w), |x, y| x.max(&y));
    let floor = Float::with_val(w, &largest * crate::exactnum::hp::pow2(w, -(prec as i32) + 32));
    let mut det = HpValue::from_real(Float::with_val(w, 1));
    let mut singular = false;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= floor {
            singular = true;
        }
        if best.is_zero() {
            det = HpValue::zero(w);
            break;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -&det;
        }
        det = &det * &a[k * n + k];
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..];
        let pivot = &pivot_row[k];
        let below = &mut tail[..(n - k - 1) * n];
        let update = |_: usize, row: &mut [HpValue]| {
            let f = &row[k] / pivot;
            for j in k + 1..n {
                row[j] = &row[j] - &(&f * &pivot_row[j]);
            }
        };
        if n - k > 16 {
            par::for_each_row(exec, below, n, update);
        } else {
            par::for_each_row(Exec::Sequential, below, n, update);
        }
    }
    NumericDet {
        value: det.with_precision(prec),
        singular,
        precision: prec,
    }
}

/// `∏_i ‖row_i‖₂`, an upper bound for `|det|`.
pub fn hadamard_bound(m: &Matrix<HpValue>) -> Float {
    let prec = m.data.iter().map(HpValue::precision).min().unwrap_or(64);
    let mut bound = Float::with_val(prec, 1);
    for i in 0..m.rows() {
        let mut s = Float::new(prec);
        for v in m.row(i) {
            s += Float::with_val(prec, v.abs().square_ref());
        }
        bound *= s.sqrt();
    }
    bound
}

/// Row-major JSON dump with exact entries as `"p/q"` and numeric entries as
/// decimal strings.
pub fn dump_matrix(m: &BuiltMatrix, label: &str) -> Value {
    match m {
        BuiltMatrix::Exact(m) => json!({
            "kind": label,
            "exact": true,
            "rows": (0..m.rows())
                .map(|i| m.row(i).iter().map(|q| q.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        BuiltMatrix::Hp(m) => {
            let prec = m.data.iter().map(HpValue::precision).min().unwrap_or(64);
            json!({
                "kind": label,
                "exact": false,
                "precision_bits": prec,
                "rows": (0..m.rows())
                    .map(|i| m.row(i).iter().map(|v| v.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })
        }
    }
}

/// `gcd(k, N)`, the divisor that selects the column block of index `k`.
pub fn block_divisor(k: u64, n: u64) -> u64 {
    gcd(k, n)
}
