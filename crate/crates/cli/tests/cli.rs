use std::process::Command;

use ostrowski::bounds::BoundReport;
use ostrowski::funcspace::RegistryListing;
use ostrowski::quadrature::QuadratureResult;
use ostrowski::verify::{ProofStepAudit, SuiteReport};
use ostrowski_cli::ConvergenceRow;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn bin(args: &str) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ostrowski"))
        .args(args.split_whitespace())
        .output()
        .expect("spawn binary");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &str) -> String {
    let r = bin(args);
    assert_eq!(r.code, 0, "{args}: {}", r.stderr);
    r.stdout
}

fn csv_rows(args: &str) -> usize {
    let out = ok(&format!("{args} --format csv"));
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    rdr.records().filter(|r| r.is_ok()).count()
}

const CHECK: &str = "check --ineq 2.6 --function square --weight unit --a 0 --b 1 --x 0.5";
const INTEGRATE: &str = "integrate --function square --weight unit --a 0 --b 1 --n 2";
const CONVERGE: &str = "converge --function square --weight unit --a 0 --b 1 --ns 1,2,4";
const AUDIT: &str = "audit --function sqrt_ln --weight inv_sqrt --a 1 --b 4 --x 2";
const VERIFY: &str = "verify --suite weighted_invsqrt --samples 25 --seed 7";

#[test]
fn check_round_trip() {
    let r: BoundReport = serde_json::from_str(&ok(CHECK)).unwrap();
    assert!((r.lhs - 0.0833333).abs() < 1e-7);
    assert!((r.rhs - 0.25).abs() < 1e-12);
    assert!(r.holds);
    assert_eq!(csv_rows(CHECK), 1);
}

#[test]
fn report_keys_are_flat() {
    let v: serde_json::Value = serde_json::from_str(&ok(CHECK)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in [
        "inequality",
        "lhs",
        "rhs",
        "margin",
        "holds",
        "ratio",
        "function",
        "weight",
        "a",
        "b",
        "x",
        "mode",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(keys.len(), 12);
}

#[test]
fn integrate_round_trip() {
    let q: QuadratureResult = serde_json::from_str(&ok(INTEGRATE)).unwrap();
    assert_eq!(q.n, 2);
    assert!((q.estimate - 0.3125).abs() < 1e-12);
    assert!((q.actual_error.unwrap() - 1.0 / 48.0).abs() < 1e-9);
    assert!((q.bound - 0.0625).abs() < 1e-12);
    assert_eq!(q.per_interval.len(), 2);
    assert_eq!(csv_rows(INTEGRATE), 1);

    let adaptive = "integrate --function exp --weight inv_sqrt --a 1 --b 3 --tol 1e-4";
    let q: QuadratureResult = serde_json::from_str(&ok(adaptive)).unwrap();
    assert!(q.bound <= 1e-4);
    assert!(q.actual_error.unwrap() <= q.bound);
}

#[test]
fn converge_round_trip() {
    let rows: Vec<ConvergenceRow> = serde_json::from_str(&ok(CONVERGE)).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(csv_rows(CONVERGE), rows.len());
    assert!(rows[0].order.is_none());
    assert!((rows[2].order.unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn audit_round_trip() {
    let steps: Vec<ProofStepAudit> = serde_json::from_str(&ok(AUDIT)).unwrap();
    assert_eq!(steps.len(), 3);
    assert_eq!(csv_rows(AUDIT), 3);
    assert!((steps[0].lhs_value + 0.6666667).abs() < 1e-6);
    assert!((steps[0].rhs_value + 1.0606602).abs() < 1e-6);
}

#[test]
fn verify_round_trip() {
    let s: SuiteReport = serde_json::from_str(&ok(VERIFY)).unwrap();
    assert_eq!(s.samples, 25);
    assert_eq!(s.log.len(), 75);
    assert_eq!(csv_rows(VERIFY), s.log.len());
    assert!(s.total_violations() >= 1);
    assert_eq!(bin(&format!("{VERIFY} --strict")).code, 1);
}

#[test]
fn list_round_trip() {
    let l: RegistryListing = serde_json::from_str(&ok("list")).unwrap();
    assert!(l.functions.iter().any(|e| e.id == "pow_p_half"));
    assert!(l.weights.iter().any(|e| e.id == "inv_sqrt"));
    assert_eq!(csv_rows("list"), l.functions.len() + l.weights.len());
}

#[test]
fn means_round_trip() {
    let r: BoundReport = serde_json::from_str(&ok("means --case C3_4 --a 1 --b 2")).unwrap();
    assert!(r.holds);
    let strict = bin("means --case C3_2 --a 1 --b 2 --strict");
    assert_eq!(strict.code, 1);
    let r: BoundReport = serde_json::from_str(&strict.stdout).unwrap();
    assert!(!r.holds);
}

#[test]
fn output_is_byte_identical() {
    for args in [CHECK, INTEGRATE, CONVERGE, AUDIT, VERIFY, "list"] {
        assert_eq!(ok(args), ok(args), "{args}");
        let csv = format!("{args} --format csv");
        assert_eq!(ok(&csv), ok(&csv), "{csv}");
    }
}

#[test]
fn floats_carry_nine_significant_digits() {
    let out = ok(CHECK);
    assert!(out.contains("\"lhs\": 0.0833333333,"), "{out}");
}

#[test]
fn invalid_input_reports_on_stderr() {
    let r = bin("check --ineq 2.6 --function square --weight unit --a 0 --b 1 --x 5");
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("error"));

    let r = bin("check --ineq 2.7 --function sqrt_ln --weight inv_sqrt --a -1 --b 2");
    assert_eq!(r.code, 2);

    let r = bin("verify --suite unweighted_default --samples x");
    assert_eq!(r.code, 2);
}

#[test]
fn strict_without_violation_exits_zero() {
    assert_eq!(bin(&format!("{CHECK} --strict")).code, 0);
}
