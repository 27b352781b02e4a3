use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn default_run_succeeds_with_zero_qber() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qss(&["run", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&path);
    assert_eq!(r["config"]["rounds"], 10_000);
    assert_eq!(r["config"]["p_d"], 0.1);
    assert_eq!(r["config"]["epsilon_th"], 0.05);
    assert_eq!(r["config"]["attack"]["kind"], "none");
    for agent in ["bob", "charlie"] {
        assert_eq!(r["qber"]["first_check"][agent]["qber"], 0.0);
    }
    assert_eq!(r["qber"]["second_check"]["qber"], 0.0);
    assert_eq!(r["aborted"], false);
}

#[test]
fn report_fields_come_in_fixed_order() {
    let out = qss(&["run", "--rounds", "300"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "\"schema\"",
        "\"seed\"",
        "\"config\"",
        "\"counts\"",
        "\"qber\"",
        "\"efficiency\"",
        "\"decoy_yield\"",
        "\"leakage\"",
        "\"aborted\"",
        "\"abort\"",
    ];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
}

#[test]
fn opaque_attack_with_decoys_aborts() {
    let out = qss(&["run", "--attack", "fake-epr", "--pd", "0.3", "--rounds", "3000"]);
    assert_eq!(code(&out), 2);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["aborted"], true);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("abort:"));
}

#[test]
fn fixed_seed_reports_are_byte_identical() {
    let args = [
        "run",
        "--rounds",
        "4000",
        "--seed",
        "42",
        "--attack",
        "intercept-resend",
    ];
    let a = qss(&args);
    let b = qss(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = qss(&[
        "run",
        "--rounds",
        "4000",
        "--seed",
        "43",
        "--attack",
        "intercept-resend",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "rounds = 500\np_d = 0.2\nattack = \"loss-only\"\nattack_leg = \"bob-to-alice\"\n",
    )
    .unwrap();
    let out = qss(&["run", "--config", cfg.to_str().unwrap(), "--pd", "0.05"]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["rounds"], 500);
    assert_eq!(r["config"]["p_d"], 0.05);
    assert_eq!(r["config"]["attack"]["kind"], "loss-only");
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "rounds = 500\nround_count = 3\n").unwrap();
    let out = qss(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("round_count"));
}

#[test]
fn bad_values_and_flags_are_usage_errors() {
    for args in [
        &["run", "--pc", "0.5"][..],
        &["run", "--pd", "1.2"],
        &["run", "--rounds", "0"],
        &["run", "--attack", "teleport"],
        &["run", "--attack-leg", "alice-to-dave"],
        &["run", "--attack-basis", "z"],
        &["run", "--depolarize", "-0.1"],
        &["run", "--config", "/nonexistent/run.toml"],
        &["sweep", "--pd-values", "0.1,2"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&qss(args)), 1, "{args:?}");
    }
    assert_eq!(code(&qss(&["--help"])), 0);
}

#[test]
fn tables_lists_the_single_mismatch_and_key_transitions() {
    let out = qss(&["tables"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("MISMATCH")).count(), 1);
    assert!(text.contains("U2 on C: ψ+ → φ+"));
    assert!(text.contains("U1 on B: Φ+ → Ψ-"));
}

#[test]
fn selftest_passes_and_catches_a_perturbed_fixture() {
    let clean = qss(&["selftest"]);
    assert_eq!(code(&clean), 0);
    let text = String::from_utf8(clean.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");

    let perturbed = qss(&["selftest", "--perturbed-fixture"]);
    assert_eq!(code(&perturbed), 1);
    let text = String::from_utf8(perturbed.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL representations")), "{text}");
}

#[test]
fn sweep_writes_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("grid.txt");
    let out = qss(&[
        "sweep",
        "--rounds",
        "2000",
        "--seed",
        "5",
        "--pd-values",
        "0,0.3",
        "--pc-values",
        "0.1",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().next().unwrap().contains("eta_q"));
    let csv = fs::read_to_string(table.with_extension("csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("index,p_d,p_c,seed,"));
    assert!(lines[1].starts_with("0,0.0,0.1,"));
    assert!(lines[2].starts_with("1,0.3,0.1,"));
}
