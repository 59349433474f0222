use std::fmt::Write as _;
use std::time::Instant;

use paradet::blockfact::{
    bernoulli_det_formula_with, dense_det, det_via_factorization_with, factorized_det, pass_threshold, sun_check,
    tangent_det_formula_with, tangent_precision, FactorizationReport, PASS_GUARD_BITS,
};
use paradet::exactnum::{float_to_decimal, HpContext, HpValue, MIN_PRECISION};
use paradet::matrices::{build_matrix, dump_matrix, hadamard_bound, transform_check, Kind, TransformCheck, TransformKind, ValueAssignment};
use paradet::par::{self, Exec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, Common, FamilyArg, Format};

#[derive(Debug)]
pub enum CliError {
    Lib(paradet::Error),
    Usage(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Usage(s) => write!(f, "usage: {s}"),
            CliError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl From<paradet::Error> for CliError {
    fn from(e: paradet::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(paradet::Error::Precision(_)) => 3,
            CliError::Lib(paradet::Error::StructureViolation(_)) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Rendered report plus the exit status it implies.
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

pub fn run(command: &Command) -> Result<Outcome> {
    let (common, outcome) = match command {
        Command::Det(c) => (c, det(c)?),
        Command::Verify(c) => (c, verify(c)?),
        Command::Sun(c) => (c, sun(c)?),
        Command::Bench(c) => (c, bench(c)?),
    };
    if let Some(path) = &common.out {
        std::fs::write(path, &outcome.text).map_err(CliError::Io)?;
    }
    Ok(outcome)
}

fn exec(c: &Common) -> Exec {
    if c.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn check_precision(c: &Common) -> Result<()> {
    if c.precision < MIN_PRECISION {
        return Err(CliError::Usage(format!("precision must be at least {MIN_PRECISION} bits")));
    }
    Ok(())
}

fn moduli(c: &Common) -> Result<Vec<u64>> {
    match (&c.n, &c.n_range) {
        (Some(n), None) => Ok(vec![*n]),
        (None, Some(r)) => Ok(r.clone().collect()),
        (Some(_), Some(_)) => Err(CliError::Usage("give either --N or --N-range".into())),
        (None, None) => Err(CliError::Usage("--N or --N-range is required".into())),
    }
}

fn params(c: &Common, default: std::ops::RangeInclusive<u64>) -> Result<Vec<u32>> {
    let (range, name) = match c.family {
        FamilyArg::Bernoulli => (&c.k, "k"),
        FamilyArg::Tan => (&c.m, "m"),
        _ => return Ok(vec![0]),
    };
    let r = range.clone().unwrap_or(default);
    r.map(|v| u32::try_from(v).map_err(|_| CliError::Usage(format!("--{name} {v} is too large"))))
        .collect()
}

fn single_param(c: &Common) -> Result<u32> {
    let name = if c.family == FamilyArg::Tan { "m" } else { "k" };
    let range = if c.family == FamilyArg::Tan { &c.m } else { &c.k };
    match range {
        Some(r) if r.start() == r.end() => Ok(*r.start() as u32),
        Some(_) => Err(CliError::Usage(format!("det takes a single --{name}"))),
        None => Err(CliError::Usage(format!("--{name} is required for this family"))),
    }
}

fn kind_of(f: FamilyArg) -> Option<Kind> {
    match f {
        FamilyArg::X => Some(Kind::X),
        FamilyArg::Y => Some(Kind::Y),
        FamilyArg::Z => Some(Kind::Z),
        _ => None,
    }
}

/// One reproducible stream per `(seed, N, sample)`.
fn random_assignment(kind: Kind, n: u64, seed: u64, sample: usize) -> Result<ValueAssignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((n << 20) | sample as u64);
    Ok(ValueAssignment::random(kind, n, &mut rng)?)
}

fn assignment(c: &Common, n: u64, param: u32, sample: usize) -> Result<ValueAssignment> {
    Ok(match c.family {
        FamilyArg::Bernoulli => ValueAssignment::bernoulli(param, n)?,
        FamilyArg::Tan => ValueAssignment::tangent(param, n)?,
        f => random_assignment(kind_of(f).expect("generic family"), n, c.seed, sample)?,
    })
}

fn factorize(c: &Common, n: u64, param: u32, sample: usize, exec: Exec) -> Result<FactorizationReport> {
    Ok(match c.family {
        FamilyArg::Bernoulli => bernoulli_det_formula_with(param, n, c.precision, exec)?,
        FamilyArg::Tan => tangent_det_formula_with(param, n, c.precision, exec)?,
        _ => det_via_factorization_with(&assignment(c, n, param, sample)?, c.precision, exec)?,
    })
}

const TRANSFORMS: [TransformKind; 3] = [TransformKind::F, TransformKind::C, TransformKind::S];

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json");
    s.push('\n');
    s
}

fn margin(err: &Float, precision: u32) -> String {
    if err.is_zero() {
        return "exact".into();
    }
    format!("{:.1}", -err.to_f64().log2() - (precision - PASS_GUARD_BITS) as f64)
}

/// One sweep row; the CSV form keeps the fixed columns only.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    #[serde(rename = "N")]
    pub n: u64,
    pub family: String,
    pub param: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    pub formula: String,
    pub assembled: String,
    pub oracle: String,
    pub rel_error: String,
    pub margin_bits: String,
    pub pass: bool,
}

impl Row {
    fn from_report(r: &FactorizationReport, sample: Option<usize>) -> Row {
        Row {
            n: r.n,
            family: r.family.clone(),
            param: r.param,
            sample,
            formula: r.formula.clone(),
            assembled: r.assembled.clone(),
            oracle: r.oracle.clone(),
            rel_error: r.rel_error.clone(),
            margin_bits: r.margin_bits.clone(),
            pass: r.pass,
        }
    }

    fn from_transform(t: &TransformCheck) -> Row {
        Row {
            n: t.n,
            family: format!("transform-{}", t.transform),
            param: None,
            sample: None,
            formula: "transform-closed-form".into(),
            assembled: t.closed.clone(),
            oracle: t.numeric.clone(),
            rel_error: t.rel_error.clone(),
            margin_bits: margin(&t.rel_error_value, t.precision_bits[0]),
            pass: t.pass,
        }
    }
}

pub const CSV_HEADER: &str = "N,family,param,assembled,oracle,rel_error,pass";

fn csv(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let param = r.param.map(|p| p.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n, r.family, param, r.assembled, r.oracle, r.rel_error, r.pass
        );
    }
    s
}

fn det(c: &Common) -> Result<Outcome> {
    check_precision(c)?;
    let ns = moduli(c)?;
    let [n] = ns[..] else {
        return Err(CliError::Usage("det takes a single --N".into()));
    };
    let exec = exec(c);

    if c.family == FamilyArg::Transforms {
        let checks = TRANSFORMS
            .iter()
            .map(|&k| transform_check(k, n, c.precision, PASS_GUARD_BITS))
            .collect::<paradet::Result<Vec<_>>>()?;
        let pass = checks.iter().all(|t| t.pass);
        let text = match c.format {
            Format::Json => render(&json!({
                "N": n, "family": "transforms", "seed": c.seed, "checks": checks, "pass": pass,
            })),
            Format::Csv => csv(&checks.iter().map(Row::from_transform).collect::<Vec<_>>()),
        };
        return Ok(Outcome { text, exit_code: if pass { 0 } else { 3 } });
    }

    let param = match c.family {
        FamilyArg::Bernoulli | FamilyArg::Tan => single_param(c)?,
        _ => 0,
    };
    let report = factorize(c, n, param, 0, exec)?;
    let text = match c.format {
        Format::Json => {
            let mut v = report.to_json();
            v["seed"] = json!(c.seed);
            if c.dump_matrix {
                let asg = assignment(c, n, param, 0)?;
                let p = match c.family {
                    FamilyArg::Tan => c.precision.max(tangent_precision(n)),
                    _ => c.precision,
                };
                let m = build_matrix(&asg, &HpContext::new(p)?)?;
                v["matrix"] = dump_matrix(&m, c.family.tag());
            }
            render(&v)
        }
        Format::Csv => csv(&[Row::from_report(&report, None)]),
    };
    Ok(Outcome { text, exit_code: if report.pass { 0 } else { 3 } })
}

fn verify(c: &Common) -> Result<Outcome> {
    check_precision(c)?;
    let exec = exec(c);
    let mut rows: Vec<Row> = if c.family == FamilyArg::Transforms {
        let items: Vec<(u64, TransformKind)> = moduli(c)?
            .into_iter()
            .filter(|&n| n >= 2)
            .flat_map(|n| TRANSFORMS.iter().map(move |&k| (n, k)))
            .collect();
        par::map(exec, &items, |&(n, k)| transform_check(k, n, c.precision, PASS_GUARD_BITS))
            .into_iter()
            .map(|r| r.map(|t| Row::from_transform(&t)))
            .collect::<paradet::Result<Vec<_>>>()?
    } else {
        let default = if c.family == FamilyArg::Tan { 1..=5 } else { 1..=4 };
        let samples = if kind_of(c.family).is_some() { c.samples.max(1) } else { 1 };
        let mut items = Vec::new();
        for n in moduli(c)? {
            // tangent matrices exist for odd N only; Z needs a nonempty index set
            if (c.family == FamilyArg::Tan && n % 2 == 0) || n < 2 || (c.family == FamilyArg::Z && n < 3) {
                continue;
            }
            for &p in &params(c, default.clone())? {
                for s in 0..samples {
                    items.push((n, p, s));
                }
            }
        }
        let with_sample = kind_of(c.family).is_some();
        par::map(exec, &items, |&(n, p, s)| {
            factorize(c, n, p, s, Exec::Sequential).map(|r| Row::from_report(&r, with_sample.then_some(s)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
    };
    rows.sort_by(|a, b| (a.n, a.param, a.sample, &a.family).cmp(&(b.n, b.param, b.sample, &b.family)));
    let all_pass = rows.iter().all(|r| r.pass);
    let text = match c.format {
        Format::Json => render(&json!({
            "command": "verify",
            "family": c.family.tag(),
            "seed": c.seed,
            "precision_bits": [c.precision, c.precision + paradet::exactnum::CHECK_EXTRA_BITS],
            "rows": rows,
            "all_pass": all_pass,
        })),
        Format::Csv => csv(&rows),
    };
    Ok(Outcome { text, exit_code: if all_pass { 0 } else { 1 } })
}

fn sun(c: &Common) -> Result<Outcome> {
    let ns = moduli(c)?;
    let results = par::map(exec(c), &ns, |&n| {
        if n % 2 == 0 || n < 3 {
            Ok(None)
        } else {
            sun_check(n).map(Some)
        }
    });
    let mut rows = Vec::new();
    let mut all_hold = true;
    let mut csv_text = String::from("N,n,tau,s_n,t_n,divisibility_i,divisibility_ii,sign_iii,status\n");
    for (n, r) in ns.iter().zip(results) {
        match r? {
            None => {
                rows.push(json!({"N": n, "status": "skipped: even N"}));
                let _ = writeln!(csv_text, "{n},,,,,,,,skipped: even N");
            }
            Some(rec) => {
                let holds = rec.holds();
                all_hold &= holds;
                let status = if holds { "ok" } else { "violation" };
                let mut v = serde_json::to_value(&rec).expect("record serializes");
                v["status"] = json!(status);
                rows.push(v);
                let _ = writeln!(
                    csv_text,
                    "{},{},{},{},{},{},{},{},{status}",
                    rec.big_n, rec.n, rec.tau, rec.s_n, rec.t_n, rec.divisibility_i, rec.divisibility_ii, rec.sign_iii
                );
            }
        }
    }
    let text = match c.format {
        Format::Json => render(&json!({"command": "sun", "seed": c.seed, "rows": rows, "all_hold": all_hold})),
        Format::Csv => csv_text,
    };
    Ok(Outcome { text, exit_code: if all_hold { 0 } else { 1 } })
}

#[derive(Debug, Serialize)]
struct BenchRow {
    #[serde(rename = "N")]
    n: u64,
    family: String,
    param: Option<u32>,
    precision_bits: u32,
    dense_ms: f64,
    factorized_ms: f64,
    rel_error: String,
    agree: bool,
}

/// Relative distance, measured against the Hadamard bound when the dense
/// determinant vanishes to working precision.
fn agreement(asg: &ValueAssignment, dense: &HpValue, fact: &HpValue, precision: u32) -> Result<Float> {
    let ctx = HpContext::new(precision)?;
    let hadamard = hadamard_bound(&build_matrix(asg, &ctx)?.to_hp(&ctx));
    let floor = Float::with_val(64, &hadamard * pass_threshold(precision));
    if dense.abs() < floor {
        return Ok(Float::with_val(64, fact.abs().max(&dense.abs()) / &hadamard));
    }
    Ok(Float::with_val(64, fact.relative_distance(dense)))
}

fn bench(c: &Common) -> Result<Outcome> {
    check_precision(c)?;
    if c.family == FamilyArg::Transforms {
        return Err(CliError::Usage("bench needs a matrix family".into()));
    }
    let exec = exec(c);
    let default = if c.family == FamilyArg::Tan { 1..=1 } else { 2..=2 };
    let mut rows = Vec::new();
    for n in moduli(c)? {
        if (c.family == FamilyArg::Tan && n % 2 == 0) || n < 3 {
            continue;
        }
        for &p in &params(c, default.clone())? {
            let asg = assignment(c, n, p, 0)?;
            let precision = match c.family {
                FamilyArg::Tan => c.precision.max(tangent_precision(n)),
                _ => c.precision,
            };
            let t0 = Instant::now();
            let dense = dense_det(&asg, precision, exec)?;
            let dense_ms = t0.elapsed().as_secs_f64() * 1e3;
            let t1 = Instant::now();
            let fact = factorized_det(&asg, precision, exec)?;
            let factorized_ms = t1.elapsed().as_secs_f64() * 1e3;
            let rel = agreement(&asg, &dense, &fact, precision)?;
            rows.push(BenchRow {
                n,
                family: c.family.tag().into(),
                param: asg.family().param(),
                precision_bits: precision,
                dense_ms,
                factorized_ms,
                rel_error: float_to_decimal(&rel, 6),
                agree: rel < pass_threshold(precision),
            });
        }
    }
    let all_agree = rows.iter().all(|r| r.agree);
    let text = match c.format {
        Format::Json => render(&json!({
            "command": "bench", "seed": c.seed, "parallel": exec == Exec::Parallel, "rows": rows, "all_agree": all_agree,
        })),
        Format::Csv => {
            let mut s = String::from("N,family,param,precision_bits,dense_ms,factorized_ms,rel_error,agree\n");
            for r in &rows {
                let param = r.param.map(|p| p.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{:.3},{:.3},{},{}",
                    r.n, r.family, param, r.precision_bits, r.dense_ms, r.factorized_ms, r.rel_error, r.agree
                );
            }
            s
        }
    };
    Ok(Outcome { text, exit_code: if all_agree { 0 } else { 1 } })
}
