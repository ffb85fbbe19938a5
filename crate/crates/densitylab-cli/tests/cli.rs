use std::process::Command;
use std::sync::OnceLock;

use jsonschema::{Draft, JSONSchema};
use proptest::prelude::*;
use serde_json::Value;

use densitylab::audit::TestFamily;
use densitylab::setkit::{Counter, FactorialVariant, SetExpr};
use densitylab_cli::dsl::parse_set_expr;
use densitylab_cli::report::{AUDIT_COLUMNS, EVAL_COLUMNS, REPRODUCE_COLUMNS};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_densitylab"));
    cmd.args(args).env_remove("DENSITYLAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run { code: out.status.code().expect("exit code"), stdout: String::from_utf8(out.stdout).unwrap(), stderr: String::from_utf8(out.stderr).unwrap() }
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

fn schema() -> &'static JSONSchema {
    static S: OnceLock<JSONSchema> = OnceLock::new();
    S.get_or_init(|| {
        let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/report.schema.json")).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        JSONSchema::options().with_draft(Draft::Draft202012).compile(&v).expect("schema compiles")
    })
}

/// Parses stdout and checks it against the report schema.
fn report(r: &Run) -> Value {
    let v: Value = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout));
    if let Err(errs) = schema().validate(&v) {
        let msgs: Vec<String> = errs.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations {msgs:?} in {}", r.stdout);
    }
    v
}

#[test]
fn eval_exact_class() {
    let r = run(&["eval", "--set", "ap(4,1)", "--measure", "asympt"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = report(&r);
    assert_eq!(v["value"]["kind"], "exact");
    assert_eq!((v["value"]["num"].as_str(), v["value"]["den"].as_str()), (Some("1"), Some("4")));
    assert_eq!(v["value"]["lo"], "0.250000000000");
    assert_eq!(v["certification"], "structural");
}

#[test]
fn eval_numeric_bracket() {
    let r = run(&["eval", "--set", "valpha(1/3)", "--measure", "dual:asympt"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = report(&r);
    assert_eq!(v["mode"], "lower");
    let hi: f64 = v["value"]["hi"].as_str().unwrap().parse().unwrap();
    assert!(hi <= 0.02);
}

#[test]
fn eval_csv_columns() {
    let r = run(&["eval", "--set", "union(ap(2,0),ap(3,0))", "--measure", "banach", "--format", "csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rows = csv::Reader::from_reader(r.stdout.as_bytes());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), EVAL_COLUMNS);
    let row = rows.records().next().unwrap().unwrap();
    assert_eq!(&row[2], "union(ap(2,0),ap(3,0))");
    assert_eq!((&row[5], &row[6]), ("2", "3"));
}

#[test]
fn domain_and_parse_errors_exit_two() {
    let r = run(&["eval", "--set", "valpha(2)", "--measure", "asympt"]);
    assert_eq!(r.code, 2);
    let v = report(&r);
    assert_eq!(v["error"]["kind"], "DomainError");
    assert!(!r.stderr.is_empty());

    let r = run(&["eval", "--set", "union(ap(2,0) ap(3,1))", "--measure", "asympt"]);
    assert_eq!(r.code, 2);
    let v = report(&r);
    assert_eq!(v["error"]["kind"], "ParseError");
    assert_eq!(v["error"]["position"], 14);
    assert_eq!(v["error"]["expected"], serde_json::json!(["','"]));

    let r = run(&["eval", "--set", "ap(2,0)", "--measure", "nope"]);
    assert_eq!(r.code, 2);
    report(&r);

    assert_eq!(run(&["eval", "--set", "ap(2,0)"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
}

#[test]
fn help_and_version_succeed() {
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("reproduce"));
    assert_eq!(run(&["--version"]).code, 0);
}

#[test]
fn thread_variable_is_validated() {
    let r = run_env(&["eval", "--set", "ap(2,0)", "--measure", "asympt"], &[("DENSITYLAB_THREADS", "many")]);
    assert_eq!(r.code, 2);
    let r = run_env(&["eval", "--set", "ap(2,0)", "--measure", "asympt"], &[("DENSITYLAB_THREADS", "1")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn curve_file_is_written() {
    let dir = std::env::temp_dir().join(format!("densitylab-curve-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let r = run(&["eval", "--set", "squares", "--measure", "asympt", "--ground", "nonneg", "--emit-curve", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("checkpoint,prefix_density"));
    assert!(lines.count() >= 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn audit_reports_are_stable() {
    let args = ["audit", "--measure", "asympt", "--axioms", "f1,f2,f4,f5"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let v = report(&a);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["axioms"].as_array().unwrap().len(), 4);
}

#[test]
fn audit_failures_exit_one_with_witness() {
    let r = run(&["audit", "--measure", "theta:1", "--family", "theta-catalog", "--axioms", "f2", "--format", "csv"]);
    assert_eq!(r.code, 1);
    let mut rows = csv::Reader::from_reader(r.stdout.as_bytes());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), AUDIT_COLUMNS);
    let row = rows.records().next().unwrap().unwrap();
    assert_eq!((&row[4], &row[5]), ("f2", "fail"));
    assert!(row[7].contains('⊆'), "{}", &row[7]);

    let r = run(&["audit", "--measure", "mfix", "--axioms", "f5", "--family", "periodic-only"]);
    assert_eq!(r.code, 1);
    let v = report(&r);
    assert_eq!(v["axioms"][0]["status"], "fail");
}

#[test]
fn reproductions_pass_and_validate() {
    for args in [
        vec!["reproduce", "example-blocks"],
        vec!["reproduce", "range", "--bits", "1,3"],
        vec!["reproduce", "range", "--alpha", "1/sqrt2", "--depth", "40"],
        vec!["reproduce", "range", "--alpha", "2/3", "--depth", "30"],
        vec!["reproduce", "nonmonotone-theta", "--K", "2"],
        vec!["reproduce", "primes-meager"],
        vec!["reproduce", "log-vs-asympt"],
        vec!["reproduce", "lemma-blocks", "--alpha", "1/2", "--k", "3", "--h", "1"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stdout);
        let v = report(&r);
        assert_eq!(v["pass"], true, "{args:?}");
        assert!(v["claim"].as_str().is_some_and(|c| !c.is_empty()));
    }
}

#[test]
fn reproduce_csv_and_unknown_target() {
    let r = run(&["reproduce", "primes-meager", "--format", "csv"]);
    assert_eq!(r.code, 0);
    let mut rows = csv::Reader::from_reader(r.stdout.as_bytes());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), REPRODUCE_COLUMNS);
    assert!(rows.records().all(|row| &row.unwrap()[5] == "true"));

    let r = run(&["reproduce", "riemann"]);
    assert_eq!(r.code, 2);
    let v = report(&r);
    assert!(v["error"]["message"].as_str().unwrap().contains("example-blocks"));
}

fn leaf() -> impl Strategy<Value = SetExpr> {
    prop_oneof![
        (1u64..=30, 0u64..40).prop_map(|(k, h)| SetExpr::ap(k, h).unwrap()),
        (1u64..300, 0u64..300).prop_map(|(a, l)| SetExpr::interval(a, a + l)),
        proptest::collection::vec(1u64..400, 0..6).prop_map(SetExpr::finite),
        Just(SetExpr::squares()),
        Just(SetExpr::primes()),
        Just(SetExpr::Full),
        Just(SetExpr::Empty),
        (1i64..=20, 21i64..=40).prop_map(|(n, d)| SetExpr::valpha_ratio(n, d).unwrap()),
        Just(SetExpr::fblocks(FactorialVariant::Standard)),
        Just(SetExpr::fblocks(FactorialVariant::Full)),
        proptest::collection::btree_set(1u32..20, 1..5).prop_map(|s| SetExpr::rangeset(s.into_iter().collect()).unwrap()),
    ]
}

fn expr() -> impl Strategy<Value = SetExpr> {
    leaf().prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::union(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::inter(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::diff(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::symdiff(a, b)),
            inner.clone().prop_map(SetExpr::compl),
            (1u64..=5, 0u64..=9, inner).prop_map(|(k, h, a)| SetExpr::affine(k, h, a).unwrap()),
        ]
    })
}

proptest! {
    #[test]
    fn printed_sets_parse_back(e in expr()) {
        let text = e.to_string();
        let back = parse_set_expr(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back.key(), e.key());
    }

    #[test]
    fn whitespace_is_insignificant(e in expr()) {
        let text = e.to_string();
        let spaced = text.replace(',', " , ").replace('(', " ( ");
        prop_assert_eq!(parse_set_expr(&spaced).unwrap().key(), e.key());
    }
}

#[test]
fn standard_family_round_trips() {
    let c = Counter::default();
    for e in TestFamily::standard(42).sets {
        let back = parse_set_expr(&e.to_string()).unwrap_or_else(|err| panic!("{e}: {err}"));
        assert_eq!(back.key(), e.key());
        let n = num_bigint::BigUint::from(5000u32);
        assert_eq!(c.count_prefix(&back, &n).unwrap(), c.count_prefix(&e, &n).unwrap());
    }
}
