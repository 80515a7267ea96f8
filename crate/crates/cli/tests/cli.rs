use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ensembleq_core::accinfo::{AccInfoReport, PureLimitIdentities};
use ensembleq_core::extopt::QuantumnessReport;
use ensembleq_core::recovery::AuReport;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn ensembleq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ensembleq"))
        .args(args)
        .env_remove("ENSEMBLEQ_SEED")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = ensembleq(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn value_of(args: &[&str]) -> f64 {
    json_of(args)["value"].as_f64().unwrap()
}

fn with_fixture<'a>(cmd: &'a str, path: &'a Path) -> [&'a str; 3] {
    [cmd, "--input", path.to_str().unwrap()]
}

#[test]
fn holevo_examples() {
    let orth = fixture("orthogonal_pair.json");
    let padded = fixture("zero_prob_member.json");
    let zp = fixture("zero_plus.json");
    assert!((value_of(&with_fixture("holevo", &orth)) - 1.0).abs() < 1e-12);
    assert!((value_of(&with_fixture("holevo", &padded)) - 1.0).abs() < 1e-9);
    assert!((value_of(&with_fixture("holevo", &zp)) - 0.6009).abs() < 1e-3);
}

#[test]
fn chi_q_examples() {
    let commuting = fixture("commuting_pair.json");
    let zp = fixture("zero_plus.json");
    let v = json_of(&with_fixture("chi-q", &commuting));
    assert!(v["value"].as_f64().unwrap() <= 1e-6);
    let two = value_of(&with_fixture("chi-q", &zp));
    assert!((two - 0.2104).abs() < 5e-3);
    let mut args = with_fixture("chi-q", &zp).to_vec();
    args.extend(["-n", "3"]);
    let report: QuantumnessReport = serde_json::from_value(json_of(&args)).unwrap();
    assert!(report.value >= two - 1e-4);
}

#[test]
fn information_commands() {
    let orth = fixture("orthogonal_pair.json");
    let zp = fixture("zero_plus.json");
    assert!(value_of(&with_fixture("fuchs", &orth)).abs() < 1e-6);
    let ids: PureLimitIdentities = serde_json::from_value(json_of(&with_fixture("pure-limits", &zp))).unwrap();
    assert!(ids.identity_residual <= 1e-9);
    assert!((ids.q_fuchs - 0.2018).abs() < 3e-3);
    let acc: AccInfoReport = serde_json::from_value(json_of(&with_fixture("acc-info", &zp))).unwrap();
    assert!((acc.value - 0.3991).abs() < 2e-3);
    assert_eq!(acc.restarts_used, acc.mutual_info_per_restart.len());
}

#[test]
fn recovery_commands() {
    let rep: AuReport = serde_json::from_value(json_of(&["au-check", "--example", "0.25"])).unwrap();
    assert!(!rep.feasible && rep.min_margin < -1e-4);
    let rep: AuReport = serde_json::from_value(json_of(&["au-check", "--example", "0"])).unwrap();
    assert!(rep.feasible);
    let v = json_of(&[
        "petz-check",
        "--reference",
        fixture("reference_qubit.json").to_str().unwrap(),
        "--channel",
        fixture("depolarizing_qubit.json").to_str().unwrap(),
    ]);
    assert!(v["recovery_error"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn sweep_rows() {
    let out = ensembleq(&["sweep-example", "--steps", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("a,commutator_norm,au_min_margin,au_feasible,chi_q_n2,fidelity_q_n2")
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let a: f64 = row[0].parse().unwrap();
        let comm: f64 = row[1].parse().unwrap();
        assert!((comm - 2f64.sqrt() * (a * (1.0 - 2.0 * a)).sqrt()).abs() < 1e-8);
    }
    let num = |r: usize, c: usize| rows[r][c].parse::<f64>().unwrap();
    // a = 0, 0.25 and 0.5
    assert_eq!(rows[0][3], "true");
    assert!(num(0, 4) <= 1e-6);
    assert!((num(2, 1) - 0.5).abs() < 1e-6);
    assert_eq!(rows[2][3], "false");
    assert!(num(2, 4) > 1e-4);
    assert!(num(4, 1).abs() < 1e-12 && num(4, 4) <= 1e-6);
}

#[test]
fn sweep_json_and_bounds() {
    let v = json_of(&[
        "sweep-example",
        "--format",
        "json",
        "--a-min",
        "0.1",
        "--a-max",
        "0.1",
        "--steps",
        "1",
    ]);
    assert_eq!(v.as_array().unwrap().len(), 1);
    let out = ensembleq(&["sweep-example", "--a-max", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let bad = fixture("not_psd.json");
    assert_eq!(ensembleq(&with_fixture("holevo", &bad)).status.code(), Some(2));
    let big = fixture("qutrit_triple.json");
    let mut args = with_fixture("chi-q", &big).to_vec();
    args.extend(["-n", "5"]);
    assert_eq!(ensembleq(&args).status.code(), Some(4));
    assert_eq!(
        ensembleq(&["holevo", "--input", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(ensembleq(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn failed_runs_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let t = target.to_str().unwrap();
    let out = ensembleq(&["sweep-example", "--a-min", "0.4", "--a-max", "0.2", "--output", t]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!target.exists());
    let out = ensembleq(&["sweep-example", "--steps", "3", "--output", t]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert!(std::fs::read_to_string(&target)
        .unwrap()
        .starts_with("a,commutator_norm"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn seed_flag_overrides_environment() {
    let zp = fixture("zero_plus.json");
    let args = with_fixture("acc-info", &zp);
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ensembleq"));
        c.args(extra).args(args).env_remove("ENSEMBLEQ_SEED");
        if let Some(s) = env {
            c.env("ENSEMBLEQ_SEED", s);
        }
        c.output().unwrap().stdout
    };
    let flag = run(Some("7"), &["--seed", "9"]);
    assert_eq!(flag, run(None, &["--seed", "9"]));
    assert_eq!(run(Some("7"), &[]), run(None, &["--seed", "7"]));
}

#[test]
fn twelve_significant_digits() {
    let zp = fixture("zero_plus.json");
    let out = ensembleq(&["--format", "csv", "holevo", "--input", zp.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = text.lines().nth(1).unwrap();
    let digits = value.chars().filter(char::is_ascii_digit).collect::<String>();
    assert!(digits.trim_start_matches('0').len() <= 12, "{value}");
}
