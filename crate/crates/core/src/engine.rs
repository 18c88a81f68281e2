//! Single-CPU scheduling loop.
//!
//! The clock starts at 0. Whenever the CPU is free, every process that has
//! arrived by the current instant joins the ready queue (ordered by arrival,
//! then input order), a process is dispatched, and it runs uninterrupted for
//! the granted time. Arrivals during a slice are admitted at its end, ahead
//! of the process being re-queued. An empty queue with processes still to
//! come advances the clock to the next arrival without emitting a slice.

use std::collections::VecDeque;

use thiserror::Error;

use crate::policy::{
    arrival_position, shortest_position, Candidate, PolicyDescriptor, PolicyError, QuantumRule,
    ReadyEntry, ReadyQueueSnapshot, Selection,
};
use crate::process::{validate_workload, ValidationError, Workload};
use crate::time::Time;
use crate::trace::{Slice, SliceEnd, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid workload: {0}")]
    InvalidWorkload(#[from] ValidationError),
    #[error("invalid policy parameters: {0}")]
    PolicyParameter(#[from] PolicyError),
}

enum Dispatcher<'r> {
    Fifo(&'r mut dyn QuantumRule),
    ArrivalOrder,
    Shortest { preemptive: bool },
}

pub fn simulate(workload: &Workload, policy: &PolicyDescriptor) -> Result<Trace, SimError> {
    validate_workload(workload)?;
    let slices = match policy.selection() {
        Selection::Fifo(mut rule) => run(workload, Dispatcher::Fifo(rule.as_mut())),
        Selection::ArrivalOrder => run(workload, Dispatcher::ArrivalOrder),
        Selection::Shortest { preemptive } => run(workload, Dispatcher::Shortest { preemptive }),
    };
    Ok(Trace {
        workload: workload.clone(),
        policy: policy.clone(),
        slices,
    })
}

/// Runs the FIFO round-robin loop with a caller-supplied quantum rule.
/// `label` is recorded in the trace and otherwise unused.
pub fn simulate_with_rule(
    workload: &Workload,
    label: &PolicyDescriptor,
    rule: &mut dyn QuantumRule,
) -> Result<Trace, SimError> {
    validate_workload(workload)?;
    let slices = run(workload, Dispatcher::Fifo(rule));
    Ok(Trace {
        workload: workload.clone(),
        policy: label.clone(),
        slices,
    })
}

struct State<'w> {
    workload: &'w Workload,
    /// Process indices by (arrival, input index).
    arrival_order: Vec<usize>,
    next_arrival: usize,
    remaining: Vec<Time>,
    ready: VecDeque<usize>,
    clock: Time,
}

impl<'w> State<'w> {
    fn new(workload: &'w Workload) -> Self {
        let mut arrival_order: Vec<usize> = (0..workload.len()).collect();
        arrival_order.sort_by(|&a, &b| workload.processes[a].arrival.cmp(&workload.processes[b].arrival));
        State {
            workload,
            arrival_order,
            next_arrival: 0,
            remaining: workload.processes.iter().map(|p| p.burst.clone()).collect(),
            ready: VecDeque::with_capacity(workload.len()),
            clock: Time::zero(),
        }
    }

    fn upcoming(&self) -> Option<usize> {
        self.arrival_order.get(self.next_arrival).copied()
    }

    fn admit(&mut self, dispatcher: &mut Dispatcher<'_>) {
        while let Some(p) = self.upcoming() {
            let spec = &self.workload.processes[p];
            if spec.arrival > self.clock {
                break;
            }
            if let Dispatcher::Fifo(rule) = dispatcher {
                rule.on_admit(&spec.id, &spec.burst);
            }
            self.ready.push_back(p);
            self.next_arrival += 1;
        }
    }

    fn candidates(&self) -> Vec<Candidate> {
        self.ready
            .iter()
            .map(|&p| {
                let spec = &self.workload.processes[p];
                Candidate {
                    pid: spec.id.clone(),
                    remaining: self.remaining[p].clone(),
                    arrival: spec.arrival.clone(),
                    input_index: p,
                }
            })
            .collect()
    }

    fn snapshot(&self) -> ReadyQueueSnapshot {
        ReadyQueueSnapshot::new(
            self.ready
                .iter()
                .map(|&p| ReadyEntry {
                    pid: self.workload.processes[p].id.clone(),
                    remaining: self.remaining[p].clone(),
                })
                .collect(),
        )
    }

    /// Time until a not-yet-admitted process with a strictly shorter burst
    /// than `p`'s remaining work arrives, capped at that remaining work.
    fn until_preempted(&self, p: usize) -> Time {
        let remaining = &self.remaining[p];
        let finish = &self.clock + remaining;
        for &q in &self.arrival_order[self.next_arrival..] {
            let spec = &self.workload.processes[q];
            if spec.arrival >= finish {
                break;
            }
            let elapsed = &spec.arrival - &self.clock;
            if spec.burst < remaining - &elapsed {
                return elapsed;
            }
        }
        remaining.clone()
    }
}

fn run(workload: &Workload, mut dispatcher: Dispatcher<'_>) -> Vec<Slice> {
    let mut st = State::new(workload);
    let mut slices = Vec::new();

    loop {
        st.admit(&mut dispatcher);
        if st.ready.is_empty() {
            match st.upcoming() {
                Some(p) => {
                    st.clock = workload.processes[p].arrival.clone();
                    continue;
                }
                None => break,
            }
        }

        let position = match dispatcher {
            Dispatcher::Fifo(_) => 0,
            Dispatcher::ArrivalOrder => arrival_position(&st.candidates()).expect("queue non-empty"),
            Dispatcher::Shortest { .. } => {
                shortest_position(&st.candidates()).expect("queue non-empty")
            }
        };
        let p = st.ready.remove(position).expect("position in range");
        let pid = &workload.processes[p].id;

        let grant = match &mut dispatcher {
            Dispatcher::Fifo(rule) => {
                let snapshot = st.snapshot();
                rule.decide(pid, &st.remaining[p], &snapshot)
                    .grant(&st.remaining[p])
            }
            Dispatcher::Shortest { preemptive: true } => st.until_preempted(p),
            Dispatcher::ArrivalOrder | Dispatcher::Shortest { preemptive: false } => {
                st.remaining[p].clone()
            }
        };
        assert!(!grant.is_zero(), "policy granted an empty slice to {pid}");

        let start = st.clock.clone();
        st.clock += &grant;
        st.remaining[p] -= &grant;
        let completed = st.remaining[p].is_zero();
        slices.push(Slice {
            pid: pid.clone(),
            start,
            end: st.clock.clone(),
            reason: if completed {
                SliceEnd::Completed
            } else {
                SliceEnd::QuantumExpired
            },
        });
        if let Dispatcher::Fifo(rule) = &mut dispatcher {
            rule.on_slice_end(pid, &grant, completed);
        }

        st.admit(&mut dispatcher);
        if !completed {
            st.ready.push_back(p);
        }
    }
    slices
}
