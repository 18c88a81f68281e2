//! A deterministic single-CPU scheduling simulator.
//!
//! The centerpiece is a round-robin variant whose time quantum is the mean
//! remaining burst of the processes waiting in the ready queue at each
//! dispatch (policy `an`). It is compared against fixed-quantum round robin,
//! a median-quantum round robin, FCFS, SJF and SRTF.
//!
//! All times are exact rationals ([`Time`]) so schedules and averages are
//! reproduced without rounding.
//!
//! ```
//! use meanrr_core::{compute_metrics, simulate, PolicyDescriptor, Time, Workload};
//!
//! let w = Workload::from_pairs("case2", &[(0, 10), (0, 14), (0, 70), (0, 120)]);
//! let trace = simulate(&w, &PolicyDescriptor::an()).unwrap();
//! let m = compute_metrics(&trace).unwrap();
//! assert_eq!(m.avg_turnaround, Time::from_fraction(171, 2).unwrap());
//! ```

pub mod decimal;
pub mod engine;
pub mod experiments;
pub mod metrics;
pub mod policy;
pub mod process;
pub mod time;
pub mod trace;
pub mod workload;

pub use engine::{simulate, simulate_with_rule, SimError};
pub use experiments::{
    emit_report, improvement_percent, mean_difference, run_comparison, success_percent,
    write_report, ComparisonConfig, ComparisonReport, ExperimentError, ImprovementRule,
    QuantumSummary, Ratio, ReportError, ReportFiles, ReportFormat, SeriesRow,
};
pub use metrics::{compute_metrics, CsConvention, MetricsError, ProcessMetrics, RunMetrics};
pub use policy::{
    an_quantum, fcfs_pick, fixed_quantum, median_round_quantum, sjf_pick, Candidate,
    MeanRegisters, PolicyDecision, PolicyDescriptor, PolicyError, PolicyKind, QuantumRule,
    ReadyEntry, ReadyQueueSnapshot, RegisterMeanRule,
};
pub use process::{validate_workload, Pid, ProcessSpec, ValidationError, Workload};
pub use time::Time;
pub use trace::{Slice, SliceEnd, Trace, TraceViolation};
pub use workload::{
    format_workloads, generate_samples, parse_workloads, read_workloads, write_workloads,
    GeneratorConfig, GeneratorError, WorkloadIoError,
};
