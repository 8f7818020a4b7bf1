//! Slot usage over the common-ECU and fault-tolerant fraction grid.

use std::io::Write;

use fxsched_core::driver::{run, DriverConfig};
use fxsched_core::generator::{generate, sweep_profiles, GeneratorProfile};
use fxsched_core::scheduler::schedule_single_channel;

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub step: f64,
    pub instances: u32,
    /// Instance `j` of every grid point is drawn with seed `seed + j`.
    pub seed: u64,
    /// Restricts the grid to one common-ECU fraction.
    pub common_fraction: Option<f64>,
    pub driver: DriverConfig,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            step: 0.05,
            instances: 5,
            seed: 0,
            common_fraction: None,
            driver: DriverConfig {
                cah_tries: 100,
                ..DriverConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub common_fraction: f64,
    pub fault_tolerant_fraction: f64,
    pub instances: u32,
    pub mean_slots: f64,
    pub mean_gw_slots: f64,
    pub mean_single_slots: f64,
    pub errors: u32,
}

pub fn sweep_point(profile: &GeneratorProfile, opts: &SweepOptions) -> SweepRow {
    let (mut slots, mut gw, mut single, mut ok, mut errors) = (0.0, 0.0, 0.0, 0u32, 0u32);
    for j in 0..opts.instances {
        let outcome = generate(profile, opts.seed + u64::from(j))
            .map_err(|e| e.to_string())
            .and_then(|inst| {
                let out = run(&inst, &opts.driver).map_err(|e| e.to_string())?;
                let s = schedule_single_channel(&inst).map_err(|e| e.to_string())?;
                Ok((out.best(), s.max_slot()))
            });
        match outcome {
            Ok((best, s)) => {
                slots += f64::from(best.max_slot());
                gw += f64::from(best.gateway_slots);
                single += f64::from(s);
                ok += 1;
            }
            Err(_) => errors += 1,
        }
    }
    let mean = |x: f64| if ok == 0 { f64::NAN } else { x / f64::from(ok) };
    SweepRow {
        common_fraction: profile.common_ecu_fraction,
        fault_tolerant_fraction: profile.fault_tolerant_fraction,
        instances: ok,
        mean_slots: mean(slots),
        mean_gw_slots: mean(gw),
        mean_single_slots: mean(single),
        errors,
    }
}

pub fn run_sweep(base: &GeneratorProfile, opts: &SweepOptions) -> Vec<SweepRow> {
    sweep_profiles(base, opts.step)
        .iter()
        .filter(|p| opts.common_fraction.is_none_or(|c| (p.common_ecu_fraction - c).abs() < 1e-9))
        .map(|p| sweep_point(p, opts))
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "common_fraction",
        "ft_fraction",
        "instances",
        "mean_slots",
        "mean_gw_slots",
        "mean_single_slots",
        "errors",
    ])?;
    for r in rows {
        w.write_record([
            format!("{:.2}", r.common_fraction),
            format!("{:.2}", r.fault_tolerant_fraction),
            r.instances.to_string(),
            format!("{:.3}", r.mean_slots),
            format!("{:.3}", r.mean_gw_slots),
            format!("{:.3}", r.mean_single_slots),
            r.errors.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
