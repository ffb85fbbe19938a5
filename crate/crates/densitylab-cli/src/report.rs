//! JSON and CSV serialization of command results.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use densitylab::audit::AxiomReport;
use densitylab::densities::DensityValue;

/// Version of the report layout in `report.schema.json`.
pub const REPORT_VERSION: &str = "1";

/// `x` with 12 significant digits; fixed notation for moderate exponents.
pub fn decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).expect("exponent");
    if (-7..12).contains(&exp) {
        format!("{x:.*}", (11 - exp) as usize)
    } else {
        sci
    }
}

pub fn decimal_q(q: &BigRational) -> String {
    decimal(q.to_f64().unwrap_or(f64::NAN))
}

pub fn value_json(v: &DensityValue) -> Value {
    match &v.exact {
        Some(q) => json!({
            "kind": "exact",
            "num": q.numer().to_string(),
            "den": q.denom().to_string(),
            "lo": decimal_q(q),
            "hi": decimal_q(q),
        }),
        None => json!({ "kind": "bracket", "lo": decimal(v.lo), "hi": decimal(v.hi) }),
    }
}

pub struct EvalRecord<'a> {
    pub measure: &'a str,
    pub mode: &'a str,
    pub set: &'a str,
    pub ground: &'a str,
    pub value: &'a DensityValue,
    pub duration_ms: u128,
}

pub fn eval_json(r: &EvalRecord) -> Value {
    json!({
        "version": REPORT_VERSION,
        "command": "eval",
        "measure": r.measure,
        "mode": r.mode,
        "set": r.set,
        "ground": r.ground,
        "value": value_json(r.value),
        "checkpoints": r.value.checkpoints.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "certification": r.value.certification.name(),
        "notes": r.value.notes,
        "durationMs": r.duration_ms as u64,
    })
}

/// Audit report; carries no timing so equal inputs give equal bytes.
pub fn audit_json(r: &AxiomReport) -> Value {
    let axioms: Vec<Value> = r
        .axioms
        .iter()
        .map(|a| {
            let mut m = Map::new();
            m.insert("name".into(), a.name.clone().into());
            m.insert("status".into(), a.status.name().into());
            m.insert("margin".into(), a.margin.map_or(Value::Null, |x| decimal(x).into()));
            if let Some(w) = &a.witness {
                m.insert("witness".into(), w.clone().into());
            }
            m.insert("checked".into(), a.checked.into());
            m.insert("skipped".into(), a.skipped.into());
            if let Some(why) = &a.reason {
                m.insert("reason".into(), why.clone().into());
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "version": REPORT_VERSION,
        "command": "audit",
        "functional": r.functional,
        "family": r.family,
        "seed": r.seed,
        "tolerance": decimal(r.tolerance),
        "axioms": axioms,
        "pass": r.all_pass(),
    })
}

/// One line of a reproduction: what was expected, what came out.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub quantity: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(quantity: impl Into<String>, expected: impl Into<String>, computed: impl Into<String>, tolerance: Option<f64>, pass: bool) -> Self {
        Check { quantity: quantity.into(), expected: expected.into(), computed: computed.into(), tolerance, pass }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reproduction {
    pub target: String,
    pub claim: String,
    pub parameters: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Reproduction {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

pub fn reproduce_json(r: &Reproduction) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "quantity": c.quantity,
                "expected": c.expected,
                "computed": c.computed,
                "tolerance": c.tolerance.map(decimal),
                "pass": c.pass,
            })
        })
        .collect();
    json!({
        "version": REPORT_VERSION,
        "command": "reproduce",
        "target": r.target,
        "claim": r.claim,
        "parameters": r.parameters,
        "checks": checks,
        "pass": r.pass(),
    })
}

pub fn error_json(kind: &str, message: &str, extra: Map<String, Value>) -> Value {
    let mut e = Map::new();
    e.insert("kind".into(), kind.into());
    e.insert("message".into(), message.into());
    e.extend(extra);
    json!({ "version": REPORT_VERSION, "error": e })
}

pub const EVAL_COLUMNS: [&str; 10] = ["measure", "mode", "set", "ground", "kind", "num", "den", "lo", "hi", "certification"];
pub const AUDIT_COLUMNS: [&str; 8] = ["functional", "family", "seed", "tolerance", "axiom", "status", "margin", "witness"];
pub const REPRODUCE_COLUMNS: [&str; 6] = ["target", "quantity", "expected", "computed", "tolerance", "pass"];

fn csv_of<const N: usize>(header: [&str; N], rows: Vec<[String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn eval_csv(r: &EvalRecord) -> String {
    let v = r.value;
    let (kind, num, den) = match &v.exact {
        Some(q) => ("exact", q.numer().to_string(), q.denom().to_string()),
        None => ("bracket", String::new(), String::new()),
    };
    let (lo, hi) = match &v.exact {
        Some(q) => (decimal_q(q), decimal_q(q)),
        None => (decimal(v.lo), decimal(v.hi)),
    };
    let row = [r.measure.into(), r.mode.into(), r.set.into(), r.ground.into(), kind.into(), num, den, lo, hi, v.certification.name().into()];
    csv_of(EVAL_COLUMNS, vec![row])
}

pub fn audit_csv(r: &AxiomReport) -> String {
    let rows = r
        .axioms
        .iter()
        .map(|a| {
            [
                r.functional.clone(),
                r.family.clone(),
                r.seed.to_string(),
                decimal(r.tolerance),
                a.name.clone(),
                a.status.name().into(),
                a.margin.map(decimal).unwrap_or_default(),
                a.witness.clone().unwrap_or_default(),
            ]
        })
        .collect();
    csv_of(AUDIT_COLUMNS, rows)
}

pub fn reproduce_csv(r: &Reproduction) -> String {
    let rows = r
        .checks
        .iter()
        .map(|c| {
            [r.target.clone(), c.quantity.clone(), c.expected.clone(), c.computed.clone(), c.tolerance.map(decimal).unwrap_or_default(), c.pass.to_string()]
        })
        .collect();
    csv_of(REPRODUCE_COLUMNS, rows)
}

/// `(checkpoint, prefix density)` rows for `--emit-curve`.
pub fn curve_csv(points: &[(String, f64)]) -> String {
    csv_of(["checkpoint", "prefix_density"], points.iter().map(|(c, d)| [c.clone(), decimal(*d)]).collect())
}
