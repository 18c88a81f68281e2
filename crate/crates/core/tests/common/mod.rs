#![allow(dead_code)]

use std::path::PathBuf;

use itertools::Itertools;
use meanrr_core::{
    an_quantum, compute_metrics, read_workloads, simulate, simulate_with_rule, Pid,
    PolicyDecision, PolicyDescriptor, QuantumRule, ReadyQueueSnapshot, RegisterMeanRule,
    SliceEnd, Time, Trace, Workload,
};
use rand::Rng;

pub fn fixture(name: &str) -> Workload {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.jsonl"));
    let mut ws = read_workloads(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(ws.len(), 1);
    ws.remove(0)
}

pub fn ms(n: u64) -> Time {
    Time::from_ms(n)
}

pub fn frac(n: u64, d: u64) -> Time {
    Time::from_fraction(n, d).unwrap()
}

/// Best non-preemptive schedule by enumerating every completion order.
/// Each process starts at max(previous end, its arrival). Returns the
/// minimum total turnaround and the order achieving it (first in
/// lexicographic order of input indices).
pub fn brute_force_min_turnaround(pairs: &[(u64, u64)]) -> (u64, Vec<usize>) {
    (0..pairs.len())
        .permutations(pairs.len())
        .map(|order| {
            let mut clock = 0u64;
            let mut total = 0u64;
            for &i in &order {
                let (arrival, burst) = pairs[i];
                clock = clock.max(arrival) + burst;
                total += clock - arrival;
            }
            (total, order)
        })
        .min_by_key(|(total, _)| *total)
        .expect("at least one process")
}

pub fn integer_pairs(w: &Workload) -> Vec<(u64, u64)> {
    w.processes
        .iter()
        .map(|p| (p.arrival.to_ms().unwrap(), p.burst.to_ms().unwrap()))
        .collect()
}

pub fn random_workload<R: Rng>(rng: &mut R, name: String, n: usize, arrival_max: u64, burst_max: u64) -> Workload {
    let pairs: Vec<(u64, u64)> = (0..n)
        .map(|_| (rng.random_range(0..=arrival_max), rng.random_range(1..=burst_max)))
        .collect();
    Workload::from_pairs(name, &pairs)
}

/// Mean rule that also records what it saw at each dispatch.
#[derive(Default)]
pub struct RecordingMean {
    /// (sum of ready remaining, ready length) per dispatch.
    pub seen: Vec<(Time, u64)>,
}

impl QuantumRule for RecordingMean {
    fn decide(&mut self, _pid: &Pid, remaining: &Time, ready: &ReadyQueueSnapshot) -> PolicyDecision {
        self.seen.push((ready.sum(), ready.len() as u64));
        an_quantum(remaining, ready)
    }
}

pub fn render_trace(trace: &Trace) -> String {
    trace
        .slices
        .iter()
        .map(|s| format!("{} {} {} {}\n", s.pid, s.start, s.end, s.reason))
        .collect()
}

fn all_policies(quantum: u64) -> Vec<PolicyDescriptor> {
    vec![
        PolicyDescriptor::an(),
        PolicyDescriptor::fixed_rr(quantum).unwrap(),
        PolicyDescriptor::median_rr(25u64).unwrap(),
        PolicyDescriptor::fcfs(),
        PolicyDescriptor::sjf(),
        PolicyDescriptor::srtf(),
    ]
}

/// Checks every schedule-level property on one workload. `quantum` is used
/// for the fixed-RR run; `scale` for the AN homogeneity check.
pub fn check_properties(w: &Workload, quantum: u64, scale: u64) -> Result<(), String> {
    let fail = |what: &str, p: &PolicyDescriptor| format!("{}: {what} under {p}", w.name);

    for policy in all_policies(quantum) {
        let trace = simulate(w, &policy).map_err(|e| e.to_string())?;
        trace.check_invariants().map_err(|e| fail(&e.to_string(), &policy))?;

        // Conservation, counted directly from the slices.
        for p in &w.processes {
            let got: Time = trace.slices_of(&p.id).map(|s| s.duration()).sum();
            if got != p.burst {
                return Err(fail("slice sum differs from burst", &policy));
            }
        }

        let m = compute_metrics(&trace).map_err(|e| e.to_string())?;
        for (pm, spec) in m.per_process.iter().zip(&w.processes) {
            if &pm.turnaround - &pm.waiting != spec.burst {
                return Err(fail("TAT - WT != burst", &policy));
            }
        }
        if &m.avg_turnaround - &m.avg_waiting != w.mean_burst().unwrap() {
            return Err(fail("avg TAT - avg WT != mean burst", &policy));
        }
        let rounds_total: usize = (1..)
            .map(|r| w.processes.iter().filter(|p| trace.slices_of(&p.id).count() >= r).count())
            .take_while(|&k| k > 0)
            .sum();
        if m.q_t != rounds_total - 1 || m.q_t != m.switches_slice_boundary {
            return Err(fail("Q_T identity broken", &policy));
        }
        if m.switches_process_change > m.switches_slice_boundary {
            return Err(fail("process-change exceeds slice-boundary", &policy));
        }

        let again = simulate(w, &policy).map_err(|e| e.to_string())?;
        if render_trace(&again) != render_trace(&trace) || again != trace {
            return Err(fail("nondeterministic", &policy));
        }

        if matches!(policy.kind(), meanrr_core::PolicyKind::An | meanrr_core::PolicyKind::FixedRr) {
            check_fifo_fairness(&trace).map_err(|e| fail(&e, &policy))?;
        }
    }

    // RR with a quantum covering every burst behaves as FCFS.
    let max_burst = w.processes.iter().map(|p| p.burst.to_ms().unwrap()).max().unwrap();
    let big = simulate(w, &PolicyDescriptor::fixed_rr(max_burst + quantum % 7).unwrap()).unwrap();
    let fcfs = simulate(w, &PolicyDescriptor::fcfs()).unwrap();
    if big.slices != fcfs.slices {
        return Err(format!("{}: RR(Q >= max burst) differs from FCFS", w.name));
    }

    // A dispatch with an empty ready queue always completes under AN.
    let mut rec = RecordingMean::default();
    let traced = simulate_with_rule(w, &PolicyDescriptor::an(), &mut rec).unwrap();
    for ((_, len), s) in rec.seen.iter().zip(&traced.slices) {
        if *len == 0 && s.reason != SliceEnd::Completed {
            return Err(format!("{}: AN expired with an empty queue", w.name));
        }
    }
    if traced != simulate(w, &PolicyDescriptor::an()).unwrap() {
        return Err(format!("{}: recording rule changed the schedule", w.name));
    }

    // Incrementally maintained registers agree with recomputation.
    let mut regs = RegisterMeanRule::default();
    let via_registers = simulate_with_rule(w, &PolicyDescriptor::an(), &mut regs).unwrap();
    if via_registers.slices != traced.slices || regs.observed != rec.seen {
        return Err(format!("{}: register view differs from snapshot", w.name));
    }

    // Homogeneity of the mean rule under integer scaling.
    let scaled = simulate(&w.scaled(scale), &PolicyDescriptor::an()).unwrap();
    let expected: Vec<_> = traced
        .slices
        .iter()
        .map(|s| (s.pid.clone(), &s.start * scale, &s.end * scale, s.reason))
        .collect();
    let got: Vec<_> = scaled
        .slices
        .iter()
        .map(|s| (s.pid.clone(), s.start.clone(), s.end.clone(), s.reason))
        .collect();
    if got != expected {
        return Err(format!("{}: AN not homogeneous under x{scale}", w.name));
    }
    Ok(())
}

/// Between two consecutive slices of the same process, no other process
/// runs twice.
pub fn check_fifo_fairness(trace: &Trace) -> Result<(), String> {
    for (i, s) in trace.slices.iter().enumerate() {
        let Some(j) = trace.slices[i + 1..].iter().position(|t| t.pid == s.pid) else {
            continue;
        };
        let between = &trace.slices[i + 1..i + 1 + j];
        if between.iter().map(|t| &t.pid).duplicates().next().is_some() {
            return Err(format!("FIFO order violated after slice {i}"));
        }
    }
    Ok(())
}
