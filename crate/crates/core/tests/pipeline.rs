use fxsched_core::assignment::{solve_exact, Channel};
use fxsched_core::driver::{run, DriverConfig, SolverKind};
use fxsched_core::generator::{generate, GeneratorProfile};
use fxsched_core::scheduler::{schedule_channels, Target};
use fxsched_core::validator::validate;
use fxsched_core::{build_hypergraph, CriterionParams, EcuClass};

fn small(k: u32) -> GeneratorProfile {
    GeneratorProfile {
        signal_count: 120,
        tight_deadline_fraction: 0.3,
        fault_tolerant_fraction: 0.2,
        common_ecu_fraction: 0.4,
        ..GeneratorProfile::sae(k)
    }
}

#[test]
fn every_family_schedules_cleanly() {
    for k in 1..=7 {
        for seed in 0..4 {
            let inst = generate(&small(k), seed).unwrap();
            for solver in [SolverKind::Exact, SolverKind::Cah, SolverKind::Ga] {
                let cfg = DriverConfig {
                    solver,
                    cah_tries: 20,
                    rng_seed: seed,
                    ..DriverConfig::default()
                };
                let out = run(&inst, &cfg).unwrap();
                assert_eq!(validate(&inst, &out.assignment, &out.schedule), vec![], "sae{k} seed {seed}");
                assert!(out.best().max_slot() <= out.first.max_slot());
            }
        }
    }
}

#[test]
fn images_follow_their_originals() {
    let inst = generate(&small(7), 3).unwrap();
    let asg = solve_exact(&build_hypergraph(&inst), &CriterionParams::for_instance(&inst));
    let sched = schedule_channels(&inst, &asg).unwrap();
    let mut images = 0;
    for img in sched.placements.iter().filter(|p| p.is_image) {
        let orig = sched
            .placements
            .iter()
            .find(|p| p.signal == img.signal && !p.is_image)
            .unwrap();
        assert_ne!(orig.channel, img.channel);
        assert_eq!(orig.base_cycle, img.base_cycle);
        assert!(orig.slot < img.slot);
        images += 1;
    }
    assert!(images > 0);
}

#[test]
fn one_port_ecus_on_one_channel_need_no_gateway() {
    let inst = generate(&small(4), 6).unwrap();
    let mut asg = solve_exact(&build_hypergraph(&inst), &CriterionParams::for_instance(&inst));
    for ch in asg.channel_of.values_mut() {
        *ch = Channel::B;
    }
    let sched = schedule_channels(&inst, &asg).unwrap();
    assert_eq!(sched.stats().gateway_slots, 0);
    assert_eq!(validate(&inst, &asg, &sched), vec![]);
    let net = inst.network();
    for p in &sched.placements {
        let sig = inst.signals.iter().find(|s| s.id == p.signal).unwrap();
        if net.class_of(sig.transmitter) == Some(EcuClass::OnePort) {
            assert_eq!(p.channel, Target::B);
        }
    }
}
