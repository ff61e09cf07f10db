//! JSON interchange: instance and schedule files, solver results, and
//! certificates. All values are decimal integers; unknown fields are
//! rejected, except that instance files may carry the generator metadata keys
//! `target_makespan` and `provenance`, which solvers ignore.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, Job, ModelError, Schedule, Supply, Time};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Model(#[from] ModelError),
}

/// On-disk instance representation, with optional generator metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub resources: usize,
    pub jobs: Vec<Job>,
    pub supplies: Vec<Supply>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target_makespan: Option<Time>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            resources: inst.resources(),
            jobs: inst.jobs().to_vec(),
            supplies: inst.supplies().to_vec(),
            target_makespan: None,
            provenance: None,
        }
    }

    pub fn to_instance(&self) -> Result<Instance, ModelError> {
        Instance::new(self.resources, self.jobs.clone(), self.supplies.clone())
    }
}

pub fn parse_instance(json: &str) -> Result<(Instance, InstanceFile), IoError> {
    let file: InstanceFile = serde_json::from_str(json)?;
    let inst = file.to_instance()?;
    Ok((inst, file))
}

pub fn read_to_string(path: &str) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_string(),
        source,
    })
}

/// Loads an instance from a file path, or parses `input` directly when it is
/// inline JSON (starts with `{`).
pub fn load_instance(input: &str) -> Result<(Instance, InstanceFile), IoError> {
    if input.trim_start().starts_with('{') {
        parse_instance(input)
    } else {
        parse_instance(&read_to_string(input)?)
    }
}

pub fn load_schedule(path: &str) -> Result<Schedule, IoError> {
    Ok(serde_json::from_str(&read_to_string(path)?)?)
}

pub fn write_json<T: Serialize>(path: &str, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_string(),
        source,
    })
}

/// Solver output as emitted by the command line: the makespan of the returned
/// schedule, the idle time before its first job, and the algorithm tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOutput {
    pub makespan: Time,
    pub front_idle: Time,
    pub algorithm: String,
    pub schedule: Schedule,
}
