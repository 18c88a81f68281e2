//! Turnaround, waiting and context-switch accounting over a finished trace.
//!
//! Two context-switch conventions are kept side by side:
//! `slice-boundary` counts every boundary between consecutive slices
//! (including a process continuing after its own quantum expiry), and
//! `process-change` counts only boundaries where the running process
//! changes. Idle gaps are not switches under either convention.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::process::Pid;
use crate::time::Time;
use crate::trace::{SliceEnd, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("process {0} never completed")]
    IncompleteTrace(Pid),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CsConvention {
    #[default]
    SliceBoundary,
    ProcessChange,
}

impl CsConvention {
    pub fn name(self) -> &'static str {
        match self {
            CsConvention::SliceBoundary => "slice-boundary",
            CsConvention::ProcessChange => "process-change",
        }
    }
}

impl fmt::Display for CsConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CsConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "slice-boundary" => Ok(CsConvention::SliceBoundary),
            "process-change" => Ok(CsConvention::ProcessChange),
            other => Err(format!(
                "unknown context-switch convention `{other}` (expected slice-boundary or process-change)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessMetrics {
    pub pid: Pid,
    pub arrival: Time,
    pub burst: Time,
    pub completion: Time,
    pub turnaround: Time,
    pub waiting: Time,
    /// Delay between arrival and first dispatch.
    pub response: Time,
    pub slices: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunMetrics {
    /// In workload input order.
    pub per_process: Vec<ProcessMetrics>,
    pub avg_turnaround: Time,
    pub avg_waiting: Time,
    pub switches_slice_boundary: usize,
    pub switches_process_change: usize,
    /// `rounds[r - 1]` is the number of processes that received at least `r`
    /// slices. Ends at the last non-zero entry.
    pub rounds: Vec<usize>,
    /// Total switches from the rounds profile: `(sum of rounds) - 1`.
    pub q_t: usize,
}

impl RunMetrics {
    pub fn switches(&self, convention: CsConvention) -> usize {
        match convention {
            CsConvention::SliceBoundary => self.switches_slice_boundary,
            CsConvention::ProcessChange => self.switches_process_change,
        }
    }

    /// Number of rounds any process needed.
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }
}

pub fn compute_metrics(trace: &Trace) -> Result<RunMetrics, MetricsError> {
    let mut per_process = Vec::with_capacity(trace.workload.len());
    let mut slice_counts = Vec::with_capacity(trace.workload.len());

    for spec in &trace.workload.processes {
        let mut count = 0usize;
        let mut first_start = None;
        let mut completion = None;
        for s in trace.slices_of(&spec.id) {
            count += 1;
            first_start.get_or_insert_with(|| s.start.clone());
            if s.reason == SliceEnd::Completed {
                completion = Some(s.end.clone());
            }
        }
        let (Some(first_start), Some(completion)) = (first_start, completion) else {
            return Err(MetricsError::IncompleteTrace(spec.id.clone()));
        };
        let turnaround = &completion - &spec.arrival;
        let waiting = &turnaround - &spec.burst;
        per_process.push(ProcessMetrics {
            pid: spec.id.clone(),
            arrival: spec.arrival.clone(),
            burst: spec.burst.clone(),
            response: &first_start - &spec.arrival,
            completion,
            turnaround,
            waiting,
            slices: count,
        });
        slice_counts.push(count);
    }

    let avg_turnaround = Time::mean(per_process.iter().map(|m| &m.turnaround)).unwrap_or_default();
    let avg_waiting = Time::mean(per_process.iter().map(|m| &m.waiting)).unwrap_or_default();

    let switches_slice_boundary = trace.slices.len().saturating_sub(1);
    let switches_process_change = trace
        .slices
        .windows(2)
        .filter(|pair| pair[0].pid != pair[1].pid)
        .count();

    let max_rounds = slice_counts.iter().copied().max().unwrap_or(0);
    let rounds: Vec<usize> = (1..=max_rounds)
        .map(|r| slice_counts.iter().filter(|&&c| c >= r).count())
        .collect();
    let q_t = rounds.iter().sum::<usize>().saturating_sub(1);

    Ok(RunMetrics {
        per_process,
        avg_turnaround,
        avg_waiting,
        switches_slice_boundary,
        switches_process_change,
        rounds,
        q_t,
    })
}
