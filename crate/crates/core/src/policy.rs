//! Scheduling policies.
//!
//! Round-robin style policies (`an`, `rr`, `median-rr`) serve a FIFO ready
//! queue and differ only in the quantum granted at each dispatch; they
//! implement [`QuantumRule`]. `fcfs`, `sjf` and `srtf` instead choose which
//! ready process runs next via [`sjf_pick`] / [`fcfs_pick`].

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::process::Pid;
use crate::time::Time;

/// Default lower bound applied to the median quantum, in milliseconds.
pub const DEFAULT_MEDIAN_FLOOR_MS: u64 = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("fixed quantum must be positive")]
    NonPositiveQuantum,
    #[error("median floor must be positive")]
    NonPositiveFloor,
    #[error("policy `rr` requires a quantum")]
    MissingQuantum,
    #[error("median of an empty round")]
    EmptyRound,
    #[error("no candidates to pick from")]
    EmptyCandidates,
    #[error("unknown policy `{0}` (expected an, rr, median-rr, fcfs, sjf or srtf)")]
    UnknownPolicy(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Mean of the remaining bursts waiting in the ready queue.
    An,
    FixedRr,
    /// Median of the remaining bursts, recomputed once per round and floored.
    MedianRr,
    Fcfs,
    /// Non-preemptive shortest job first.
    Sjf,
    /// Shortest remaining time first (preemptive SJF).
    Srtf,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::An,
        PolicyKind::FixedRr,
        PolicyKind::MedianRr,
        PolicyKind::Fcfs,
        PolicyKind::Sjf,
        PolicyKind::Srtf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::An => "an",
            PolicyKind::FixedRr => "rr",
            PolicyKind::MedianRr => "median-rr",
            PolicyKind::Fcfs => "fcfs",
            PolicyKind::Sjf => "sjf",
            PolicyKind::Srtf => "srtf",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| PolicyError::UnknownPolicy(s.to_owned()))
    }
}

/// A policy together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolicyDescriptor {
    kind: PolicyKind,
    fixed_quantum: Option<Time>,
    median_floor: Time,
}

impl PolicyDescriptor {
    /// `fixed_quantum` is required for `rr` and ignored otherwise; the median
    /// floor defaults to 25 ms.
    pub fn new(
        kind: PolicyKind,
        fixed_quantum: Option<Time>,
        median_floor: Option<Time>,
    ) -> Result<Self, PolicyError> {
        let median_floor = median_floor.unwrap_or_else(|| Time::from_ms(DEFAULT_MEDIAN_FLOOR_MS));
        if median_floor.is_zero() {
            return Err(PolicyError::NonPositiveFloor);
        }
        let fixed_quantum = match kind {
            PolicyKind::FixedRr => {
                let q = fixed_quantum.ok_or(PolicyError::MissingQuantum)?;
                if q.is_zero() {
                    return Err(PolicyError::NonPositiveQuantum);
                }
                Some(q)
            }
            _ => None,
        };
        Ok(PolicyDescriptor {
            kind,
            fixed_quantum,
            median_floor,
        })
    }

    pub fn an() -> Self {
        Self::simple(PolicyKind::An)
    }

    pub fn fixed_rr(quantum: impl Into<Time>) -> Result<Self, PolicyError> {
        Self::new(PolicyKind::FixedRr, Some(quantum.into()), None)
    }

    pub fn median_rr(floor: impl Into<Time>) -> Result<Self, PolicyError> {
        Self::new(PolicyKind::MedianRr, None, Some(floor.into()))
    }

    pub fn fcfs() -> Self {
        Self::simple(PolicyKind::Fcfs)
    }

    pub fn sjf() -> Self {
        Self::simple(PolicyKind::Sjf)
    }

    pub fn srtf() -> Self {
        Self::simple(PolicyKind::Srtf)
    }

    fn simple(kind: PolicyKind) -> Self {
        PolicyDescriptor {
            kind,
            fixed_quantum: None,
            median_floor: Time::from_ms(DEFAULT_MEDIAN_FLOOR_MS),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn fixed_quantum(&self) -> Option<&Time> {
        self.fixed_quantum.as_ref()
    }

    pub fn median_floor(&self) -> &Time {
        &self.median_floor
    }

    pub(crate) fn selection(&self) -> Selection {
        match self.kind {
            PolicyKind::An => Selection::Fifo(Box::new(MeanRule)),
            PolicyKind::FixedRr => Selection::Fifo(Box::new(FixedRule(
                self.fixed_quantum.clone().expect("checked at construction"),
            ))),
            PolicyKind::MedianRr => {
                Selection::Fifo(Box::new(MedianRoundRule::new(self.median_floor.clone())))
            }
            PolicyKind::Fcfs => Selection::ArrivalOrder,
            PolicyKind::Sjf => Selection::Shortest { preemptive: false },
            PolicyKind::Srtf => Selection::Shortest { preemptive: true },
        }
    }
}

impl fmt::Display for PolicyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PolicyKind::FixedRr => write!(
                f,
                "rr(q={})",
                self.fixed_quantum.as_ref().expect("checked at construction")
            ),
            PolicyKind::MedianRr => write!(f, "median-rr(floor={})", self.median_floor),
            k => f.write_str(k.name()),
        }
    }
}

/// How the engine chooses among ready processes.
pub(crate) enum Selection {
    Fifo(Box<dyn QuantumRule>),
    ArrivalOrder,
    Shortest { preemptive: bool },
}

/// Quantum granted at a dispatch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicyDecision {
    /// Run for at most this long; always positive.
    Quantum(Time),
    RunToCompletion,
}

impl PolicyDecision {
    /// CPU time actually granted to a process with `remaining` work left.
    pub fn grant(&self, remaining: &Time) -> Time {
        match self {
            PolicyDecision::Quantum(q) if q < remaining => q.clone(),
            _ => remaining.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadyEntry {
    pub pid: Pid,
    pub remaining: Time,
}

/// Processes waiting in the ready queue at a dispatch instant, in queue order.
/// Excludes the process being dispatched.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReadyQueueSnapshot {
    pub entries: Vec<ReadyEntry>,
}

impl ReadyQueueSnapshot {
    pub fn new(entries: Vec<ReadyEntry>) -> Self {
        ReadyQueueSnapshot { entries }
    }

    pub fn from_remaining<I: IntoIterator<Item = u64>>(values: I) -> Self {
        ReadyQueueSnapshot::new(
            values
                .into_iter()
                .enumerate()
                .map(|(i, ms)| ReadyEntry {
                    pid: Pid::new(format!("Q{i}")),
                    remaining: Time::from_ms(ms),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of remaining bursts in the queue.
    pub fn sum(&self) -> Time {
        self.entries.iter().map(|e| &e.remaining).sum()
    }

    /// Mean remaining burst; `None` for an empty queue.
    pub fn mean(&self) -> Option<Time> {
        Time::mean(self.entries.iter().map(|e| &e.remaining))
    }
}

/// Mean-of-ready-queue quantum. A process alone on the CPU runs to completion.
pub fn an_quantum(remaining: &Time, ready: &ReadyQueueSnapshot) -> PolicyDecision {
    debug_assert!(!remaining.is_zero());
    match ready.mean() {
        Some(mean) => PolicyDecision::Quantum(mean),
        None => PolicyDecision::RunToCompletion,
    }
}

pub fn fixed_quantum(q: &Time) -> Result<PolicyDecision, PolicyError> {
    if q.is_zero() {
        return Err(PolicyError::NonPositiveQuantum);
    }
    Ok(PolicyDecision::Quantum(q.clone()))
}

/// `max(floor, median(round_remaining))`; an even-sized round takes the mean
/// of its two middle values.
pub fn median_round_quantum(round_remaining: &[Time], floor: &Time) -> Result<Time, PolicyError> {
    if round_remaining.is_empty() {
        return Err(PolicyError::EmptyRound);
    }
    if floor.is_zero() {
        return Err(PolicyError::NonPositiveFloor);
    }
    let mut sorted: Vec<&Time> = round_remaining.iter().collect();
    sorted.sort();
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2].clone()
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2
    };
    Ok(std::cmp::max(median, floor.clone()))
}

/// A ready process offered to a pick rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub pid: Pid,
    pub remaining: Time,
    pub arrival: Time,
    pub input_index: usize,
}

fn shortest_key(a: &Candidate, b: &Candidate) -> Ordering {
    a.remaining
        .cmp(&b.remaining)
        .then_with(|| a.arrival.cmp(&b.arrival))
        .then_with(|| a.input_index.cmp(&b.input_index))
}

fn arrival_key(a: &Candidate, b: &Candidate) -> Ordering {
    a.arrival
        .cmp(&b.arrival)
        .then_with(|| a.input_index.cmp(&b.input_index))
}

pub(crate) fn shortest_position(candidates: &[Candidate]) -> Option<usize> {
    position_by(candidates, shortest_key)
}

pub(crate) fn arrival_position(candidates: &[Candidate]) -> Option<usize> {
    position_by(candidates, arrival_key)
}

fn position_by(
    candidates: &[Candidate],
    key: fn(&Candidate, &Candidate) -> Ordering,
) -> Option<usize> {
    candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| key(a, b))
        .map(|(i, _)| i)
}

/// Least remaining time; ties go to the earlier arrival, then input order.
pub fn sjf_pick(candidates: &[Candidate]) -> Result<&Pid, PolicyError> {
    shortest_position(candidates)
        .map(|i| &candidates[i].pid)
        .ok_or(PolicyError::EmptyCandidates)
}

/// Earliest arrival; ties go to input order.
pub fn fcfs_pick(candidates: &[Candidate]) -> Result<&Pid, PolicyError> {
    arrival_position(candidates)
        .map(|i| &candidates[i].pid)
        .ok_or(PolicyError::EmptyCandidates)
}

/// Quantum selection for FIFO round-robin policies.
///
/// The engine reports admissions and slice completions so that stateful
/// rules can follow the system; `decide` is called once per dispatch.
pub trait QuantumRule {
    fn on_admit(&mut self, _pid: &Pid, _burst: &Time) {}

    fn on_slice_end(&mut self, _pid: &Pid, _consumed: &Time, _completed: bool) {}

    fn decide(&mut self, pid: &Pid, remaining: &Time, ready: &ReadyQueueSnapshot) -> PolicyDecision;
}

/// Mean rule computed from the snapshot at each dispatch.
#[derive(Debug, Default, Clone, Copy)]
pub struct MeanRule;

impl QuantumRule for MeanRule {
    fn decide(&mut self, _pid: &Pid, remaining: &Time, ready: &ReadyQueueSnapshot) -> PolicyDecision {
        an_quantum(remaining, ready)
    }
}

#[derive(Debug, Clone)]
pub struct FixedRule(pub Time);

impl QuantumRule for FixedRule {
    fn decide(&mut self, _pid: &Pid, _remaining: &Time, _ready: &ReadyQueueSnapshot) -> PolicyDecision {
        PolicyDecision::Quantum(self.0.clone())
    }
}

/// Median quantum held for a whole round.
///
/// A new round starts at the first dispatch after every unfinished admitted
/// process has been dispatched at least once under the current quantum.
#[derive(Debug, Clone)]
pub struct MedianRoundRule {
    floor: Time,
    current: Option<Time>,
    dispatched: HashSet<Pid>,
}

impl MedianRoundRule {
    pub fn new(floor: Time) -> Self {
        MedianRoundRule {
            floor,
            current: None,
            dispatched: HashSet::new(),
        }
    }
}

impl QuantumRule for MedianRoundRule {
    fn decide(&mut self, pid: &Pid, remaining: &Time, ready: &ReadyQueueSnapshot) -> PolicyDecision {
        let round_over = self.dispatched.contains(pid)
            && ready.entries.iter().all(|e| self.dispatched.contains(&e.pid));
        if self.current.is_none() || round_over {
            let round: Vec<Time> = std::iter::once(remaining.clone())
                .chain(ready.entries.iter().map(|e| e.remaining.clone()))
                .collect();
            self.current =
                Some(median_round_quantum(&round, &self.floor).expect("round is non-empty"));
            self.dispatched.clear();
        }
        self.dispatched.insert(pid.clone());
        PolicyDecision::Quantum(self.current.clone().expect("set above"))
    }
}

/// Incrementally maintained sum (SR) and average (AR) registers.
///
/// The registers cover every admitted, unfinished process, including the one
/// on the CPU. They are updated on arrival, on slice end (subtracting the
/// consumed time) and on completion (dropping the process from the count).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MeanRegisters {
    sum: Time,
    count: u64,
}

impl MeanRegisters {
    pub fn admit(&mut self, burst: &Time) {
        self.sum += burst;
        self.count += 1;
    }

    pub fn consume(&mut self, consumed: &Time, completed: bool) {
        self.sum -= consumed;
        if completed {
            self.count -= 1;
        }
    }

    pub fn sum(&self) -> &Time {
        &self.sum
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn average(&self) -> Option<Time> {
        (self.count > 0).then(|| &self.sum / self.count)
    }

    /// Sum and count of the queue once the process with `remaining` work has
    /// been loaded onto the CPU.
    pub fn excluding(&self, remaining: &Time) -> (Time, u64) {
        (&self.sum - remaining, self.count - 1)
    }
}

/// Mean rule driven purely by [`MeanRegisters`], never looking at the
/// snapshot contents. Records the register view at every dispatch.
#[derive(Debug, Clone, Default)]
pub struct RegisterMeanRule {
    registers: MeanRegisters,
    pub observed: Vec<(Time, u64)>,
}

impl QuantumRule for RegisterMeanRule {
    fn on_admit(&mut self, _pid: &Pid, burst: &Time) {
        self.registers.admit(burst);
    }

    fn on_slice_end(&mut self, _pid: &Pid, consumed: &Time, completed: bool) {
        self.registers.consume(consumed, completed);
    }

    fn decide(&mut self, _pid: &Pid, remaining: &Time, _ready: &ReadyQueueSnapshot) -> PolicyDecision {
        let (sum, count) = self.registers.excluding(remaining);
        self.observed.push((sum.clone(), count));
        if count == 0 {
            PolicyDecision::RunToCompletion
        } else {
            PolicyDecision::Quantum(sum / count)
        }
    }
}
