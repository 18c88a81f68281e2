//! Random workload generation and the line-delimited JSON workload format.
//!
//! Each non-empty line of a workload file holds one workload:
//!
//! ```text
//! {"name":"case1","processes":[{"id":"P1","arrival":0,"burst":20},{"id":"P2","arrival":0,"burst":40}]}
//! ```
//!
//! `arrival` and `burst` are integer milliseconds.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::process::{validate_workload, Pid, ProcessSpec, ValidationError, Workload};
use crate::time::Time;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n_samples: usize,
    pub n_procs: usize,
    pub at_min: u64,
    pub at_max: u64,
    pub bt_min: u64,
    pub bt_max: u64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    /// 50 samples of 4 processes, arrivals and bursts uniform on [10, 100].
    fn default() -> Self {
        GeneratorConfig {
            n_samples: 50,
            n_procs: 4,
            at_min: 10,
            at_max: 100,
            bt_min: 10,
            bt_max: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.at_min > self.at_max {
            return Err(GeneratorError::InvalidRange(format!(
                "arrival range {}..={} is empty",
                self.at_min, self.at_max
            )));
        }
        if self.bt_min == 0 || self.bt_min > self.bt_max {
            return Err(GeneratorError::InvalidRange(format!(
                "burst range {}..={} must be non-empty and start at 1 or more",
                self.bt_min, self.bt_max
            )));
        }
        if self.n_procs == 0 {
            return Err(GeneratorError::InvalidRange(
                "at least one process per sample is required".into(),
            ));
        }
        Ok(())
    }
}

/// Draws `n_samples` workloads from a ChaCha8 stream seeded with `cfg.seed`.
/// Within a sample, each process draws its arrival and then its burst.
pub fn generate_samples(cfg: &GeneratorConfig) -> Result<Vec<Workload>, GeneratorError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = (0..cfg.n_samples)
        .map(|i| {
            let processes = (1..=cfg.n_procs)
                .map(|p| {
                    let arrival = rng.random_range(cfg.at_min..=cfg.at_max);
                    let burst = rng.random_range(cfg.bt_min..=cfg.bt_max);
                    ProcessSpec::new(format!("P{p}"), arrival, burst)
                })
                .collect();
            Workload::new(format!("sample-{i}"), processes)
        })
        .collect();
    Ok(samples)
}

#[derive(Debug, Error)]
pub enum WorkloadIoError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Validation {
        line: usize,
        #[source]
        source: ValidationError,
    },
    #[error("workload {workload}: process {pid} has a non-integer or out-of-range time")]
    NonIntegerTime { workload: String, pid: Pid },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkloadRecord {
    name: String,
    processes: Vec<ProcessRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProcessRecord {
    id: String,
    arrival: i64,
    burst: i64,
}

impl WorkloadRecord {
    fn into_workload(self, line: usize) -> Result<Workload, WorkloadIoError> {
        let invalid = |source| WorkloadIoError::Validation { line, source };
        let mut processes = Vec::with_capacity(self.processes.len());
        for p in self.processes {
            let id = Pid::new(p.id);
            let arrival = u64::try_from(p.arrival)
                .map_err(|_| invalid(ValidationError::NegativeArrival(id.clone())))?;
            let burst = u64::try_from(p.burst)
                .map_err(|_| invalid(ValidationError::NonPositiveBurst(id.clone())))?;
            processes.push(ProcessSpec::new(id, arrival, burst));
        }
        let workload = Workload::new(self.name, processes);
        validate_workload(&workload).map_err(invalid)?;
        Ok(workload)
    }

    fn from_workload(w: &Workload) -> Result<Self, WorkloadIoError> {
        let whole = |t: &Time, pid: &Pid| {
            t.to_ms()
                .and_then(|ms| i64::try_from(ms).ok())
                .ok_or_else(|| WorkloadIoError::NonIntegerTime {
                    workload: w.name.clone(),
                    pid: pid.clone(),
                })
        };
        let processes = w
            .processes
            .iter()
            .map(|p| {
                Ok(ProcessRecord {
                    id: p.id.to_string(),
                    arrival: whole(&p.arrival, &p.id)?,
                    burst: whole(&p.burst, &p.id)?,
                })
            })
            .collect::<Result<_, WorkloadIoError>>()?;
        Ok(WorkloadRecord {
            name: w.name.clone(),
            processes,
        })
    }
}

/// Parses workload lines; blank lines are skipped and line numbers are 1-based.
pub fn parse_workloads<R: BufRead>(reader: R) -> Result<Vec<Workload>, WorkloadIoError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: WorkloadRecord =
            serde_json::from_str(&line).map_err(|e| WorkloadIoError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        out.push(record.into_workload(line_no)?);
    }
    Ok(out)
}

pub fn format_workloads<W: Write>(samples: &[Workload], mut out: W) -> Result<(), WorkloadIoError> {
    for (i, w) in samples.iter().enumerate() {
        validate_workload(w).map_err(|source| WorkloadIoError::Validation { line: i + 1, source })?;
        let record = WorkloadRecord::from_workload(w)?;
        let json = serde_json::to_string(&record).expect("records always serialize");
        writeln!(out, "{json}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_workloads(path: impl AsRef<Path>) -> Result<Vec<Workload>, WorkloadIoError> {
    parse_workloads(BufReader::new(File::open(path)?))
}

pub fn write_workloads(samples: &[Workload], path: impl AsRef<Path>) -> Result<(), WorkloadIoError> {
    format_workloads(samples, BufWriter::new(File::create(path)?))
}
