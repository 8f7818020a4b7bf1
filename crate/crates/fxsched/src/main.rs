use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fxsched::bench::{run_benchmark, write_bench_csv, BenchOptions};
use fxsched::fibex::write_fibex;
use fxsched::io::{
    csv_file, read_instance, read_profile, read_solution, violations_json, write_iteration_csv, write_json,
    write_text, Solution,
};
use fxsched::solver::Solver;
use fxsched::sweep::{run_sweep, write_sweep_csv, SweepOptions};
use fxsched_core::assignment::lp::to_lp_string;
use fxsched_core::driver::{run_with, DriverConfig, SolverKind};
use fxsched_core::generator::{generate, GeneratorProfile};
use fxsched_core::validator::validate;
use fxsched_core::{build_hypergraph, CriterionParams};

#[derive(Parser)]
#[command(name = "fxsched", version, about = "Dual-channel FlexRay static segment scheduler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Cah,
    Ga,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Exact => SolverKind::Exact,
            SolverArg::Cah => SolverKind::Cah,
            SolverArg::Ga => SolverKind::Ga,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Assign ECUs to channels and schedule both channels.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "cah")]
        solver: SolverArg,
        /// Gateway weight; defaults to 1 / total payload.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 10)]
        iters: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CAH restarts per iteration.
        #[arg(long, default_value_t = 1000)]
        tries: u32,
        /// Wall-clock budget of the exact search per iteration, in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long)]
        fibex: Option<PathBuf>,
        /// Iteration log.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Assignment, schedule and log as JSON, readable by `validate`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// First-iteration assignment model in CPLEX LP format.
        #[arg(long)]
        lp: Option<PathBuf>,
    },
    /// Draw a synthetic instance.
    Generate {
        /// Profile JSON; missing fields take the SAE1-like defaults.
        #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
        profile: Option<PathBuf>,
        /// Built-in profile: sae1 .. sae7 or realcase.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare solvers and schedulers over a directory of instances.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 1000)]
        tries: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10.0)]
        time_limit: f64,
        /// Adds wall-clock columns.
        #[arg(long)]
        timings: bool,
    },
    /// Mean slot usage over the common-ECU / fault-tolerant fraction grid.
    Sweep {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Instances per grid point.
        #[arg(long, default_value_t = 5)]
        instances: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        tries: u32,
        /// Only this common-ECU fraction.
        #[arg(long)]
        common: Option<f64>,
    },
    /// Check a `solve --out` file against its instance; prints violations as JSON.
    Validate { instance: PathBuf, schedule: PathBuf },
}

fn preset(name: &str) -> Result<GeneratorProfile> {
    if name == "realcase" {
        return Ok(GeneratorProfile::real_case());
    }
    match name.strip_prefix("sae").and_then(|k| k.parse::<u32>().ok()) {
        Some(k @ 1..=7) => Ok(GeneratorProfile::sae(k)),
        _ => bail!("unknown preset {name:?}; expected sae1 .. sae7 or realcase"),
    }
}

fn budget(seconds: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(seconds).with_context(|| format!("invalid time limit {seconds}"))
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve {
            instance,
            solver,
            alpha,
            iters,
            seed,
            tries,
            time_limit,
            fibex,
            csv,
            out,
            lp,
        } => {
            let inst = read_instance(&instance)?;
            let cfg = DriverConfig {
                alpha,
                max_iterations: iters,
                solver: solver.into(),
                cah_tries: tries,
                rng_seed: seed,
            };
            if let Some(path) = &lp {
                let alpha = alpha.unwrap_or_else(|| CriterionParams::default_alpha(&inst));
                let params = CriterionParams::new(alpha, 1.0)?;
                let (text, _) = to_lp_string(&build_hypergraph(&inst), &params);
                write_text(path, &text)?;
            }
            let mut solver = Solver {
                kind: cfg.solver,
                cah_tries: tries,
                rng_seed: seed,
                exact_budget: budget(time_limit)?,
            };
            let result = run_with(&inst, &cfg, &mut solver)?;
            let best = result.best();
            println!(
                "criterion {} | slots A {} B {} | gateway slots {} | best iteration {} of {}",
                result.assignment.criterion,
                best.max_slot_a,
                best.max_slot_b,
                best.gateway_slots,
                result.best_iteration,
                result.log.len()
            );
            if let Some(path) = &csv {
                write_iteration_csv(csv_file(path)?, &result.log).with_context(|| path.display().to_string())?;
            }
            if let Some(path) = &fibex {
                write_fibex(&inst, &result.schedule, path)?;
            }
            if let Some(path) = &out {
                write_json(
                    path,
                    &Solution {
                        assignment: result.assignment,
                        schedule: result.schedule,
                        log: result.log,
                    },
                )?;
            }
        }
        Command::Generate {
            profile,
            preset: name,
            seed,
            out,
        } => {
            let profile = match (profile, name) {
                (Some(path), _) => read_profile(&path)?,
                (None, Some(name)) => preset(&name)?,
                (None, None) => unreachable!("clap requires one of --profile and --preset"),
            };
            write_json(&out, &generate(&profile, seed)?)?;
        }
        Command::Bench {
            dir,
            csv,
            tries,
            seed,
            time_limit,
            timings,
        } => {
            let opts = BenchOptions {
                cah_tries: tries,
                rng_seed: seed,
                exact_budget: budget(time_limit)?,
                timings,
                ..BenchOptions::default()
            };
            let rows = run_benchmark(&dir, &opts)?;
            for r in &rows {
                if let Err(e) = &r.result {
                    eprintln!("{}: {e}", r.instance);
                }
            }
            write_bench_csv(csv_file(&csv)?, &rows, timings).with_context(|| csv.display().to_string())?;
        }
        Command::Sweep {
            profile,
            csv,
            step,
            instances,
            seed,
            tries,
            common,
        } => {
            if !(step > 0.0 && step <= 1.0) {
                bail!("step must lie in (0, 1], got {step}");
            }
            let base = read_profile(&profile)?;
            base.validate()?;
            let opts = SweepOptions {
                step,
                instances,
                seed,
                common_fraction: common,
                driver: DriverConfig {
                    cah_tries: tries,
                    rng_seed: seed,
                    ..DriverConfig::default()
                },
            };
            let rows = run_sweep(&base, &opts);
            write_sweep_csv(csv_file(&csv)?, &rows).with_context(|| csv.display().to_string())?;
        }
        Command::Validate { instance, schedule } => {
            let inst = read_instance(&instance)?;
            let sol = read_solution(&schedule)?;
            let violations = validate(&inst, &sol.assignment, &sol.schedule);
            println!("{}", violations_json(&violations));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
