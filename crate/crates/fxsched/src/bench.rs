//! Per-instance comparison of the assignment solvers and schedulers.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fxsched_core::assignment::{solve_cah, solve_ga};
use fxsched_core::driver::{run_with, DriverConfig, SolverKind};
use fxsched_core::scheduler::{lbsc, schedule_single_channel};
use fxsched_core::{build_hypergraph, CriterionParams, Instance};

use crate::io::{read_instance, IoError};
use crate::solver::{solve_exact_timed, Solver};

#[derive(Clone, Copy, Debug)]
pub struct BenchOptions {
    pub cah_tries: u32,
    pub rng_seed: u64,
    pub exact_budget: Duration,
    pub max_iterations: u32,
    /// Scheduling loop solver.
    pub driver_solver: SolverKind,
    /// Adds wall-clock columns, which makes the output run-dependent.
    pub timings: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            cah_tries: 1000,
            rng_seed: 0,
            exact_budget: Duration::from_secs(10),
            max_iterations: 10,
            driver_solver: SolverKind::Cah,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchMetrics {
    pub signals: usize,
    pub ecus: usize,
    pub exact: f64,
    pub exact_optimal: bool,
    pub cah: f64,
    pub ga: f64,
    pub lbsc: u64,
    pub single_slots: u32,
    pub isss1_slots: u32,
    pub isss1_gw_slots: u32,
    pub isss_slots: u32,
    pub isss_gw_slots: u32,
    pub iterations: usize,
    /// Milliseconds for exact, CAH, GA and the scheduling loop.
    pub millis: [f64; 4],
}

impl BenchMetrics {
    pub fn cah_gap_permille(&self) -> f64 {
        gap_permille(self.cah, self.exact)
    }

    pub fn ga_gap_permille(&self) -> f64 {
        gap_permille(self.ga, self.exact)
    }
}

/// `(heuristic - exact) / exact` in per-mille; 0 when both are 0.
pub fn gap_permille(heuristic: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if heuristic == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (heuristic - exact) / exact * 1000.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub result: Result<BenchMetrics, String>,
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

pub fn bench_instance(inst: &Instance, opts: &BenchOptions) -> Result<BenchMetrics, String> {
    let hg = build_hypergraph(inst);
    let params = CriterionParams::for_instance(inst);

    let t = Instant::now();
    let exact = solve_exact_timed(&hg, &params, opts.exact_budget);
    let exact_ms = millis(t);
    let t = Instant::now();
    let cah = solve_cah(&hg, &params, opts.cah_tries, opts.rng_seed);
    let cah_ms = millis(t);
    let t = Instant::now();
    let ga = solve_ga(&hg, &params, opts.rng_seed);
    let ga_ms = millis(t);

    let single = schedule_single_channel(inst).map_err(|e| e.to_string())?;
    let cfg = DriverConfig {
        alpha: None,
        max_iterations: opts.max_iterations,
        solver: opts.driver_solver,
        cah_tries: opts.cah_tries,
        rng_seed: opts.rng_seed,
    };
    let mut solver = Solver {
        kind: opts.driver_solver,
        cah_tries: opts.cah_tries,
        rng_seed: opts.rng_seed,
        exact_budget: opts.exact_budget,
    };
    let t = Instant::now();
    let out = run_with(inst, &cfg, &mut solver).map_err(|e| e.to_string())?;
    let driver_ms = millis(t);
    let best = out.best();

    Ok(BenchMetrics {
        signals: inst.signals.len(),
        ecus: inst.ecus.len(),
        exact: exact.criterion,
        exact_optimal: exact.optimal,
        cah: cah.criterion,
        ga: ga.criterion,
        lbsc: lbsc(inst),
        single_slots: single.max_slot(),
        isss1_slots: out.first.max_slot(),
        isss1_gw_slots: out.first.gateway_slots,
        isss_slots: best.max_slot(),
        isss_gw_slots: best.gateway_slots,
        iterations: out.log.len(),
        millis: [exact_ms, cah_ms, ga_ms, driver_ms],
    })
}

/// `*.json` files of `dir` in name order.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>, IoError> {
    let entries = std::fs::read_dir(dir).map_err(|source| IoError::File {
        path: dir.to_owned(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// One row per instance file; unreadable or unschedulable instances give
/// error rows.
pub fn run_benchmark(dir: &Path, opts: &BenchOptions) -> Result<Vec<BenchRow>, IoError> {
    Ok(instance_files(dir)?
        .iter()
        .map(|path| {
            let instance = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let result = read_instance(path)
                .map_err(|e| e.to_string())
                .and_then(|inst| bench_instance(&inst, opts));
            BenchRow { instance, result }
        })
        .collect())
}

const HEADER: [&str; 17] = [
    "instance",
    "signals",
    "ecus",
    "exact",
    "exact_optimal",
    "cah",
    "cah_gap_permille",
    "ga",
    "ga_gap_permille",
    "lbsc",
    "single_slots",
    "isss1_slots",
    "isss1_gw_slots",
    "isss_slots",
    "isss_gw_slots",
    "iterations",
    "error",
];
const TIMING_HEADER: [&str; 4] = ["exact_ms", "cah_ms", "ga_ms", "isss_ms"];

fn numeric(m: &BenchMetrics) -> [f64; 14] {
    [
        m.signals as f64,
        m.ecus as f64,
        m.exact,
        f64::from(u8::from(m.exact_optimal)),
        m.cah,
        m.cah_gap_permille(),
        m.ga,
        m.ga_gap_permille(),
        m.lbsc as f64,
        f64::from(m.single_slots),
        f64::from(m.isss1_slots),
        f64::from(m.isss1_gw_slots),
        f64::from(m.isss_slots),
        f64::from(m.isss_gw_slots),
    ]
}

/// Writes the rows followed by an `average` row over the successful ones.
pub fn write_bench_csv<W: Write>(out: W, rows: &[BenchRow], timings: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = HEADER.to_vec();
    if timings {
        header.extend(TIMING_HEADER);
    }
    w.write_record(&header)?;

    let ok: Vec<&BenchMetrics> = rows.iter().filter_map(|r| r.result.as_ref().ok()).collect();
    for row in rows {
        let mut rec = vec![row.instance.clone()];
        match &row.result {
            Ok(m) => {
                rec.extend([
                    m.signals.to_string(),
                    m.ecus.to_string(),
                    m.exact.to_string(),
                    m.exact_optimal.to_string(),
                    m.cah.to_string(),
                    format!("{:.3}", m.cah_gap_permille()),
                    m.ga.to_string(),
                    format!("{:.3}", m.ga_gap_permille()),
                    m.lbsc.to_string(),
                    m.single_slots.to_string(),
                    m.isss1_slots.to_string(),
                    m.isss1_gw_slots.to_string(),
                    m.isss_slots.to_string(),
                    m.isss_gw_slots.to_string(),
                    m.iterations.to_string(),
                    String::new(),
                ]);
                if timings {
                    rec.extend(m.millis.iter().map(|t| format!("{t:.3}")));
                }
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), HEADER.len() - 2));
                rec.push(e.clone());
                if timings {
                    rec.extend(std::iter::repeat_n(String::new(), TIMING_HEADER.len()));
                }
            }
        }
        w.write_record(&rec)?;
    }

    let mut avg = vec![String::from("average")];
    if ok.is_empty() {
        avg.extend(std::iter::repeat_n(String::new(), header.len() - 1));
    } else {
        let n = ok.len() as f64;
        let mut sums = [0.0; 14];
        let mut iterations = 0.0;
        let mut times = [0.0; 4];
        for m in &ok {
            for (s, v) in sums.iter_mut().zip(numeric(m)) {
                *s += v;
            }
            iterations += m.iterations as f64;
            for (s, v) in times.iter_mut().zip(m.millis) {
                *s += v;
            }
        }
        avg.extend(sums.iter().map(|s| format!("{:.3}", s / n)));
        avg.push(format!("{:.3}", iterations / n));
        avg.push(format!("{} failed", rows.len() - ok.len()));
        if timings {
            avg.extend(times.iter().map(|s| format!("{:.3}", s / n)));
        }
    }
    w.write_record(&avg)?;
    w.flush()?;
    Ok(())
}
