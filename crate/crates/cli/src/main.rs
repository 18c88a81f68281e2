//! `meanrr`: generate workloads, simulate one schedule, or run a comparison.
//!
//! Exit codes: 0 success, 2 usage error, 3 input validation error, 4 I/O error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meanrr_core::{
    compute_metrics, generate_samples, read_workloads, run_comparison, simulate, write_report,
    write_workloads, ComparisonConfig, CsConvention, ExperimentError, GeneratorConfig,
    ImprovementRule, PolicyDescriptor, PolicyKind, ReportError, ReportFormat, Time,
    WorkloadIoError,
};

#[derive(Parser)]
#[command(name = "meanrr", version, about = "Round-robin scheduling simulator with a mean-based dynamic quantum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write randomly generated workloads to a file.
    Generate(GenerateArgs),
    /// Simulate one workload and print per-process metrics.
    Simulate(SimulateArgs),
    /// Compare the mean-quantum policy against fixed-quantum RR.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 4)]
    procs: usize,
    #[arg(long, default_value_t = 10)]
    at_min: u64,
    #[arg(long, default_value_t = 100)]
    at_max: u64,
    #[arg(long, default_value_t = 10)]
    bt_min: u64,
    #[arg(long, default_value_t = 100)]
    bt_max: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// an, rr, median-rr, fcfs, sjf or srtf.
    #[arg(long)]
    policy: String,
    /// Fixed quantum in ms (rr only).
    #[arg(long)]
    quantum: Option<u64>,
    /// Lower bound on the median quantum in ms (median-rr only).
    #[arg(long)]
    median_floor: Option<u64>,
    #[arg(long)]
    input: PathBuf,
    /// Zero-based index of the workload within the input file.
    #[arg(long, default_value_t = 0)]
    sample: usize,
    /// Also print every slice as `pid start end reason`.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value = "slice-boundary", value_parser = parse_convention)]
    cs_convention: CsConvention,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated fixed quanta in ms.
    #[arg(long, value_delimiter = ',', required = true)]
    quanta: Vec<u64>,
    /// Comma-separated policies; must include an and rr.
    #[arg(long, value_delimiter = ',', default_value = "an,rr")]
    policies: Vec<String>,
    #[arg(long)]
    median_floor: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value = "csv")]
    format: String,
    /// relative: mean per-sample relative reduction (%); literal: mean signed difference (ms).
    #[arg(long, default_value = "relative", value_parser = parse_improvement)]
    improvement: ImprovementRule,
    /// Simulate samples on one thread.
    #[arg(long)]
    serial: bool,
}

fn parse_convention(s: &str) -> Result<CsConvention, String> {
    s.parse()
}

fn parse_improvement(s: &str) -> Result<ImprovementRule, String> {
    match s {
        "relative" => Ok(ImprovementRule::Relative),
        "literal" => Ok(ImprovementRule::Literal),
        other => Err(format!("unknown improvement rule `{other}` (expected relative or literal)")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

impl From<WorkloadIoError> for Failure {
    fn from(e: WorkloadIoError) -> Self {
        match e {
            WorkloadIoError::Io(_) => Failure::io(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::UnknownFormat(_) => Failure::usage(e.to_string()),
            ReportError::Io(_) | ReportError::Csv(_) => Failure::io(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::EmptyPolicies
            | ExperimentError::EmptyQuanta
            | ExperimentError::MissingPolicy(_)
            | ExperimentError::DuplicatePolicy(_)
            | ExperimentError::Policy(_) => Failure::usage(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

fn generate(args: GenerateArgs) -> Result<String, Failure> {
    let cfg = GeneratorConfig {
        n_samples: args.samples,
        n_procs: args.procs,
        at_min: args.at_min,
        at_max: args.at_max,
        bt_min: args.bt_min,
        bt_max: args.bt_max,
        seed: args.seed,
    };
    let samples = generate_samples(&cfg).map_err(|e| Failure::usage(e.to_string()))?;
    write_workloads(&samples, &args.out)?;
    Ok(format!("wrote {} workloads to {}\n", samples.len(), args.out.display()))
}

fn table(rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn simulate_cmd(args: SimulateArgs) -> Result<String, Failure> {
    let kind: PolicyKind = args.policy.parse().map_err(|e: meanrr_core::PolicyError| Failure::usage(e.to_string()))?;
    if kind != PolicyKind::FixedRr && args.quantum.is_some() {
        return Err(Failure::usage("--quantum only applies to --policy rr"));
    }
    if kind == PolicyKind::FixedRr && args.quantum.is_none() {
        return Err(Failure::usage("--policy rr requires --quantum"));
    }
    if kind != PolicyKind::MedianRr && args.median_floor.is_some() {
        return Err(Failure::usage("--median-floor only applies to --policy median-rr"));
    }
    let policy = PolicyDescriptor::new(kind, args.quantum.map(Time::from), args.median_floor.map(Time::from))
        .map_err(|e| Failure::usage(e.to_string()))?;

    let workloads = read_workloads(&args.input)?;
    let count = workloads.len();
    let workload = workloads.into_iter().nth(args.sample).ok_or_else(|| {
        Failure::invalid(format!(
            "sample {} out of range: {} holds {count} workloads",
            args.sample,
            args.input.display()
        ))
    })?;
    let trace = simulate(&workload, &policy).map_err(|e| Failure::invalid(e.to_string()))?;
    let m = compute_metrics(&trace).map_err(|e| Failure::invalid(e.to_string()))?;

    let mut out = String::new();
    writeln!(out, "workload: {} ({} processes)", workload.name, workload.len()).unwrap();
    writeln!(out, "policy: {policy}").unwrap();
    let mut rows = vec![["pid", "arrival", "burst", "completion", "turnaround", "waiting", "response"]
        .map(String::from)
        .to_vec()];
    for p in &m.per_process {
        rows.push(vec![
            p.pid.to_string(),
            p.arrival.to_string(),
            p.burst.to_string(),
            p.completion.to_string(),
            p.turnaround.to_string(),
            p.waiting.to_string(),
            p.response.to_string(),
        ]);
    }
    out.push_str(&table(&rows));
    writeln!(out, "avg turnaround: {}", m.avg_turnaround).unwrap();
    writeln!(out, "avg waiting: {}", m.avg_waiting).unwrap();
    writeln!(out, "context switches ({}): {}", args.cs_convention, m.switches(args.cs_convention)).unwrap();
    let rounds: Vec<String> = m.rounds.iter().map(usize::to_string).collect();
    writeln!(out, "rounds: {} (q_t {})", rounds.join(","), m.q_t).unwrap();
    if args.trace {
        out.push_str("trace:\n");
        for s in &trace.slices {
            writeln!(out, "{} {} {} {}", s.pid, s.start, s.end, s.reason).unwrap();
        }
    }
    Ok(out)
}

fn compare(args: CompareArgs) -> Result<String, Failure> {
    let format: ReportFormat = args.format.parse()?;
    let policies = args
        .policies
        .iter()
        .map(|p| p.parse::<PolicyKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let samples = read_workloads(&args.input)?;
    let mut cfg = ComparisonConfig::new(args.quanta.iter().copied().map(Time::from).collect());
    cfg.policies = policies;
    if let Some(floor) = args.median_floor {
        cfg.median_floor = Time::from_ms(floor);
    }
    cfg.improvement = args.improvement;
    cfg.parallel = !args.serial;

    let report = run_comparison(&samples, &cfg)?;
    let (series, summary) = write_report(&report, format, &args.out_dir)?;

    let mut rows = vec![["quantum", "improvement_tat", "improvement_wt", "success_tat", "success_wt"]
        .map(String::from)
        .to_vec()];
    for s in &report.summary {
        let (tat, wt) = match report.improvement_rule {
            ImprovementRule::Relative => (&s.improvement_tat, &s.improvement_wt),
            ImprovementRule::Literal => (&s.mean_difference_tat, &s.mean_difference_wt),
        };
        rows.push(vec![
            s.quantum.to_string(),
            tat.to_string(),
            wt.to_string(),
            s.success_tat.to_string(),
            s.success_wt.to_string(),
        ]);
    }
    let mut out = format!("{} samples\n", report.sample_count);
    out.push_str(&table(&rows));
    writeln!(out, "series: {}", series.display()).unwrap();
    writeln!(out, "summary: {}", summary.display()).unwrap();
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Simulate(args) => simulate_cmd(args),
        Command::Compare(args) => compare(args),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
