//! JSON and CSV files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fxsched_core::driver::IterationRecord;
use fxsched_core::generator::GeneratorProfile;
use fxsched_core::scheduler::Schedule;
use fxsched_core::validator::Violation;
use fxsched_core::{ChannelAssignment, Instance, ModelError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: invalid instance: {source}")]
    Instance { path: PathBuf, source: ModelError },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// Assignment, schedule and iteration log of one `solve` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solution {
    pub assignment: ChannelAssignment,
    pub schedule: Schedule,
    #[serde(default)]
    pub log: Vec<IterationRecord>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_owned(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.to_owned(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.to_owned(),
        source,
    })
}

/// Reads and validates an instance.
pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    let inst: Instance = read_json(path)?;
    inst.validate().map_err(|source| IoError::Instance {
        path: path.to_owned(),
        source,
    })?;
    Ok(inst)
}

pub fn read_profile(path: &Path) -> Result<GeneratorProfile, IoError> {
    read_json(path)
}

pub fn read_solution(path: &Path) -> Result<Solution, IoError> {
    read_json(path)
}

pub fn violations_json(violations: &[Violation]) -> String {
    serde_json::to_string_pretty(violations).expect("violations serialise")
}

pub const ITERATION_HEADER: [&str; 6] = ["iteration", "beta", "criterion", "slots_A", "slots_B", "gw_slots"];

pub fn write_iteration_csv<W: Write>(out: W, log: &[IterationRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ITERATION_HEADER)?;
    for r in log {
        w.write_record([
            r.iteration.to_string(),
            r.beta.to_string(),
            r.criterion.to_string(),
            r.slots_a.to_string(),
            r.slots_b.to_string(),
            r.gw_slots.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_file(path: &Path) -> Result<fs::File, IoError> {
    fs::File::create(path).map_err(|source| IoError::File {
        path: path.to_owned(),
        source,
    })
}
