use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::time::Time;

/// Process identifier, unique within a [`Workload`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pid(String);

impl Pid {
    pub fn new(id: impl Into<String>) -> Self {
        Pid(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for Pid {
    fn from(s: &str) -> Self {
        Pid(s.to_owned())
    }
}

impl From<String> for Pid {
    fn from(s: String) -> Self {
        Pid(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessSpec {
    pub id: Pid,
    pub arrival: Time,
    pub burst: Time,
}

impl ProcessSpec {
    pub fn new(id: impl Into<Pid>, arrival: impl Into<Time>, burst: impl Into<Time>) -> Self {
        ProcessSpec {
            id: id.into(),
            arrival: arrival.into(),
            burst: burst.into(),
        }
    }
}

/// A named set of processes. Input order breaks ties between simultaneous
/// arrivals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Workload {
    pub name: String,
    pub processes: Vec<ProcessSpec>,
}

impl Workload {
    pub fn new(name: impl Into<String>, processes: Vec<ProcessSpec>) -> Self {
        Workload {
            name: name.into(),
            processes,
        }
    }

    /// Builds a workload from `(arrival, burst)` pairs in milliseconds, naming
    /// the processes `P1..Pn`.
    pub fn from_pairs(name: impl Into<String>, pairs: &[(u64, u64)]) -> Self {
        let processes = pairs
            .iter()
            .enumerate()
            .map(|(i, &(arrival, burst))| ProcessSpec::new(format!("P{}", i + 1), arrival, burst))
            .collect();
        Workload::new(name, processes)
    }

    pub fn len(&self) -> usize {
        self.processes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processes.is_empty()
    }

    pub fn process(&self, pid: &Pid) -> Option<&ProcessSpec> {
        self.processes.iter().find(|p| &p.id == pid)
    }

    pub fn total_burst(&self) -> Time {
        self.processes.iter().map(|p| &p.burst).sum()
    }

    pub fn mean_burst(&self) -> Option<Time> {
        Time::mean(self.processes.iter().map(|p| &p.burst))
    }

    /// Every arrival and burst multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Workload {
        Workload {
            name: self.name.clone(),
            processes: self
                .processes
                .iter()
                .map(|p| ProcessSpec {
                    id: p.id.clone(),
                    arrival: &p.arrival * k,
                    burst: &p.burst * k,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("workload has no processes")]
    EmptyWorkload,
    #[error("process #{0} has an empty id")]
    EmptyId(usize),
    #[error("process {0} has a non-positive burst")]
    NonPositiveBurst(Pid),
    #[error("process {0} has a negative arrival")]
    NegativeArrival(Pid),
    #[error("process id {0} appears more than once")]
    DuplicateId(Pid),
}

pub fn validate_workload(w: &Workload) -> Result<(), ValidationError> {
    if w.processes.is_empty() {
        return Err(ValidationError::EmptyWorkload);
    }
    let mut seen = HashSet::with_capacity(w.processes.len());
    for (i, p) in w.processes.iter().enumerate() {
        if p.id.as_str().is_empty() {
            return Err(ValidationError::EmptyId(i));
        }
        // Time cannot hold a negative value, so NegativeArrival only
        // surfaces from raw file input.
        if p.burst.is_zero() {
            return Err(ValidationError::NonPositiveBurst(p.id.clone()));
        }
        if !seen.insert(&p.id) {
            return Err(ValidationError::DuplicateId(p.id.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_one_is_valid() {
        let w = Workload::from_pairs("case1", &[(0, 20), (0, 40), (0, 60), (0, 80)]);
        assert_eq!(validate_workload(&w), Ok(()));
        assert_eq!(w.mean_burst(), Some(Time::from_ms(50)));
    }

    #[test]
    fn zero_burst_rejected() {
        let w = Workload::from_pairs("z", &[(0, 0)]);
        assert_eq!(
            validate_workload(&w),
            Err(ValidationError::NonPositiveBurst("P1".into()))
        );
    }

    #[test]
    fn duplicate_ids_rejected() {
        let w = Workload::new(
            "dup",
            vec![ProcessSpec::new("P1", 0, 5), ProcessSpec::new("P1", 3, 5)],
        );
        assert_eq!(
            validate_workload(&w),
            Err(ValidationError::DuplicateId("P1".into()))
        );
    }

    #[test]
    fn empty_and_unnamed() {
        assert_eq!(
            validate_workload(&Workload::new("e", vec![])),
            Err(ValidationError::EmptyWorkload)
        );
        let w = Workload::new("n", vec![ProcessSpec::new("", 0, 1)]);
        assert_eq!(validate_workload(&w), Err(ValidationError::EmptyId(0)));
    }
}
