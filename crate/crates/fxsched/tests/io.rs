use fxsched::io::{read_instance, read_json, write_iteration_csv, write_json, IoError, Solution};
use fxsched_core::driver::{run, DriverConfig, IterationRecord};
use fxsched_core::generator::{generate, GeneratorProfile};
use fxsched_core::Instance;

#[test]
fn instance_and_solution_round_trip() {
    let inst = generate(&GeneratorProfile { signal_count: 80, ..GeneratorProfile::sae(6) }, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    write_json(&path, &inst).unwrap();
    assert_eq!(read_instance(&path).unwrap(), inst);

    let out = run(&inst, &DriverConfig { cah_tries: 10, ..DriverConfig::default() }).unwrap();
    let sol = Solution {
        assignment: out.assignment,
        schedule: out.schedule,
        log: out.log,
    };
    let spath = dir.path().join("s.json");
    write_json(&spath, &sol).unwrap();
    assert_eq!(read_json::<Solution>(&spath).unwrap(), sol);
    let text = std::fs::read_to_string(&spath).unwrap();
    assert!(text.contains("\"P_A\"") && text.contains("\"P_G\""));
}

#[test]
fn invalid_instances_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    let mut inst: Instance = generate(&GeneratorProfile { signal_count: 3, ..GeneratorProfile::sae(1) }, 1).unwrap();
    inst.signals[0].period_cycles = 3;
    write_json(&path, &inst).unwrap();
    assert!(matches!(read_instance(&path), Err(IoError::Instance { .. })));
    std::fs::write(&path, r#"{"config": {}, "ecus": [], "signals": []}"#).unwrap();
    assert!(matches!(read_instance(&path), Err(IoError::Json { .. })));
}

#[test]
fn iteration_log_columns() {
    let log = [IterationRecord {
        iteration: 1,
        beta: 1.0,
        criterion: 2.5,
        slots_a: 3,
        slots_b: 4,
        gw_slots: 1,
    }];
    let mut out = Vec::new();
    write_iteration_csv(&mut out, &log).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "iteration,beta,criterion,slots_A,slots_B,gw_slots\n1,1,2.5,3,4,1\n");
}
