use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fxsched::io::{read_instance, read_solution, write_json};

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/instances/example-1.json")
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fxsched")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let log = dir.path().join("log.csv");
    let lp = dir.path().join("m.lp");
    let out = cli(&[
        "solve", s(&example()), "--solver", "exact", "--out", s(&sol), "--csv", s(&log), "--lp", s(&lp),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("criterion 40.38"));
    let text = std::fs::read_to_string(&log).unwrap();
    assert!(text.starts_with("iteration,beta,criterion,slots_A,slots_B,gw_slots\n1,1,"));
    assert!(std::fs::read_to_string(&lp).unwrap().contains(" pin: x_4 = 1"));
    let solution = read_solution(&sol).unwrap();
    assert!(solution.assignment.optimal);

    let v = cli(&["validate", s(&example()), s(&sol)]);
    assert!(v.status.success());
    assert_eq!(String::from_utf8_lossy(&v.stdout).trim(), "[]");
}

#[test]
fn validate_reports_broken_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    assert!(cli(&["solve", s(&example()), "--tries", "10", "--out", s(&sol)]).status.success());
    let mut solution = read_solution(&sol).unwrap();
    solution.schedule.a.slots.clear();
    write_json(&sol, &solution).unwrap();
    let v = cli(&["validate", s(&example()), s(&sol)]);
    assert!(v.status.success());
    let report: serde_json::Value = serde_json::from_slice(&v.stdout).unwrap();
    let codes: Vec<&str> = report.as_array().unwrap().iter().map(|x| x["code"].as_str().unwrap()).collect();
    assert!(codes.contains(&"V1"));
}

#[test]
fn generate_presets_and_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    assert!(cli(&["generate", "--preset", "realcase", "--seed", "2", "--out", s(&out)]).status.success());
    let inst = read_instance(&out).unwrap();
    assert_eq!((inst.ecus.len(), inst.signals.len()), (24, 5043));

    let profile = dir.path().join("p.json");
    std::fs::write(&profile, r#"{"signal_count": 0, "name": "empty"}"#).unwrap();
    assert!(cli(&["generate", "--profile", s(&profile), "--seed", "1", "--out", s(&out)]).status.success());
    assert!(read_instance(&out).unwrap().signals.is_empty());
}

#[test]
fn hard_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.json");
    let out = cli(&["solve", s(&missing)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("none.json"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"signal_count": 1, "common_ecu_fraction": 2.0}"#).unwrap();
    let out = cli(&["generate", "--profile", s(&bad), "--seed", "1", "--out", s(&missing)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("common_ecu_fraction"));

    let out = cli(&["generate", "--preset", "sae9", "--seed", "1", "--out", s(&missing)]);
    assert!(!out.status.success());

    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"signal_count": 1, "colour": "red"}"#).unwrap();
    let out = cli(&["sweep", "--profile", s(&unknown), "--csv", s(&missing)]);
    assert!(!out.status.success());
}

#[test]
fn sweep_restricted_to_one_common_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let profile = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/profiles/sweep.json");
    let csv = dir.path().join("w.csv");
    let out = cli(&[
        "sweep", "--profile", s(&profile), "--csv", s(&csv), "--step", "0.25", "--instances", "1", "--common", "1.0",
        "--tries", "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().skip(1).all(|l| l.starts_with("1.00,")));
}
