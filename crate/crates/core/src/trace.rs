use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::policy::PolicyDescriptor;
use crate::process::{Pid, Workload};
use crate::time::Time;

/// Why a slice ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SliceEnd {
    Completed,
    /// The quantum ran out (or, for SRTF, a shorter job arrived) with work
    /// still remaining.
    QuantumExpired,
}

impl fmt::Display for SliceEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SliceEnd::Completed => "completed",
            SliceEnd::QuantumExpired => "expired",
        })
    }
}

/// One contiguous interval of CPU occupancy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub pid: Pid,
    pub start: Time,
    pub end: Time,
    pub reason: SliceEnd,
}

impl Slice {
    pub fn duration(&self) -> Time {
        &self.end - &self.start
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub workload: Workload,
    pub policy: PolicyDescriptor,
    pub slices: Vec<Slice>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceViolation {
    #[error("slice {0} has non-positive length")]
    EmptySlice(usize),
    #[error("slice {0} overlaps or precedes its predecessor")]
    Overlap(usize),
    #[error("slice {0} belongs to unknown process {1}")]
    UnknownProcess(usize, Pid),
    #[error("process {0} runs before it arrives")]
    EarlyStart(Pid),
    #[error("process {0} receives more CPU time than its burst")]
    Overrun(Pid),
    #[error("slice {0} has the wrong termination reason")]
    WrongReason(usize),
    #[error("process {0} received {1} of {2} ms")]
    NotConserved(Pid, Time, Time),
    #[error("CPU idles at {0} while work is pending")]
    IdleWithPendingWork(Time),
}

impl Trace {
    /// Start of the first slice and end of the last slice.
    pub fn makespan(&self) -> Option<(Time, Time)> {
        Some((
            self.slices.first()?.start.clone(),
            self.slices.last()?.end.clone(),
        ))
    }

    pub fn slices_of<'a>(&'a self, pid: &'a Pid) -> impl Iterator<Item = &'a Slice> + 'a {
        self.slices.iter().filter(move |s| &s.pid == pid)
    }

    /// Checks every structural invariant of a schedule: ordering, exact
    /// conservation of each burst, termination reasons, and that the CPU
    /// never idles while an admitted process still has work.
    #[allow(clippy::result_large_err)] // failure path only
    pub fn check_invariants(&self) -> Result<(), TraceViolation> {
        let index: HashMap<&Pid, usize> = self
            .workload
            .processes
            .iter()
            .enumerate()
            .map(|(i, p)| (&p.id, i))
            .collect();
        let mut executed = vec![Time::zero(); self.workload.len()];
        let mut completion: Vec<Option<Time>> = vec![None; self.workload.len()];

        for (i, s) in self.slices.iter().enumerate() {
            if s.end <= s.start {
                return Err(TraceViolation::EmptySlice(i));
            }
            if i > 0 && self.slices[i - 1].end > s.start {
                return Err(TraceViolation::Overlap(i));
            }
            let &p = index
                .get(&s.pid)
                .ok_or_else(|| TraceViolation::UnknownProcess(i, s.pid.clone()))?;
            let spec = &self.workload.processes[p];
            if s.start < spec.arrival {
                return Err(TraceViolation::EarlyStart(s.pid.clone()));
            }
            if completion[p].is_some() {
                return Err(TraceViolation::Overrun(s.pid.clone()));
            }
            executed[p] += s.duration();
            if executed[p] > spec.burst {
                return Err(TraceViolation::Overrun(s.pid.clone()));
            }
            let done = executed[p] == spec.burst;
            if done != (s.reason == SliceEnd::Completed) {
                return Err(TraceViolation::WrongReason(i));
            }
            if done {
                completion[p] = Some(s.end.clone());
            }
        }

        for (p, spec) in self.workload.processes.iter().enumerate() {
            if executed[p] != spec.burst {
                return Err(TraceViolation::NotConserved(
                    spec.id.clone(),
                    executed[p].clone(),
                    spec.burst.clone(),
                ));
            }
        }

        // Gaps: before the first slice and between consecutive slices.
        let mut gap_start = Time::zero();
        for s in &self.slices {
            if s.start > gap_start {
                let pending = self.workload.processes.iter().enumerate().any(|(p, spec)| {
                    spec.arrival < s.start
                        && completion[p].as_ref().is_some_and(|c| c > &gap_start)
                });
                if pending {
                    return Err(TraceViolation::IdleWithPendingWork(gap_start));
                }
            }
            gap_start = s.end.clone();
        }
        Ok(())
    }
}
