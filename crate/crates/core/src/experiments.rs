//! Batch comparison of the mean-quantum policy against fixed-quantum RR.
//!
//! Every sample is simulated once per policy (once per quantum for `rr`).
//! For each quantum the per-sample averages of AN and RR are reduced to an
//! improvement percentage and a success percentage, on both turnaround and
//! waiting time.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::decimal;
use crate::engine::{simulate, SimError};
use crate::metrics::{compute_metrics, MetricsError};
use crate::policy::{PolicyDescriptor, PolicyError, PolicyKind, DEFAULT_MEDIAN_FLOOR_MS};
use crate::process::Workload;
use crate::time::Time;

/// Exact signed rational used for percentages and signed differences.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(pub BigRational);

impl Ratio {
    pub fn zero() -> Self {
        Ratio(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Ratio(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&decimal::render(&self.0))
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ratio({self})")
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("no samples to compare")]
    EmptySamples,
    #[error("no fixed quanta given")]
    EmptyQuanta,
    #[error("no policies given")]
    EmptyPolicies,
    #[error("comparison requires policy `{0}`")]
    MissingPolicy(&'static str),
    #[error("policy `{0}` listed more than once")]
    DuplicatePolicy(PolicyKind),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("sample {index} ({name}): {source}")]
    Simulation {
        index: usize,
        name: String,
        #[source]
        source: SimError,
    },
    #[error("sample {index} ({name}): {source}")]
    Metrics {
        index: usize,
        name: String,
        #[source]
        source: MetricsError,
    },
    #[error("series lengths differ ({base} vs {alt})")]
    LengthMismatch { base: usize, alt: usize },
    #[error("empty series")]
    EmptySeries,
    #[error("baseline value at index {0} is not positive")]
    NonPositiveBase(usize),
}

/// How the improvement columns of the summary are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ImprovementRule {
    /// `100 * mean((rr - an) / rr)`: dimensionless, positive when AN is lower.
    #[default]
    Relative,
    /// `sum(an - rr) / samples`: a signed mean difference in milliseconds.
    Literal,
}

/// `100 * mean_i((base_i - alt_i) / base_i)`. Positive means `alt` is lower.
///
/// A sample where both values are zero contributes zero; any other
/// non-positive baseline is an error.
pub fn improvement_percent(base: &[Time], alt: &[Time]) -> Result<Ratio, ExperimentError> {
    check_lengths(base, alt)?;
    let mut total = BigRational::zero();
    for (i, (b, a)) in base.iter().zip(alt).enumerate() {
        if b.is_zero() {
            if a.is_zero() {
                continue;
            }
            return Err(ExperimentError::NonPositiveBase(i));
        }
        let b = b.as_rational();
        total += (b - a.as_rational()) / b;
    }
    let n = BigRational::from_integer(BigInt::from(base.len()));
    Ok(Ratio(total * BigRational::from_integer(100.into()) / n))
}

/// `100 * |{i : alt_i < base_i}| / n`; ties are not successes.
pub fn success_percent(base: &[Time], alt: &[Time]) -> Result<Ratio, ExperimentError> {
    check_lengths(base, alt)?;
    let wins = base.iter().zip(alt).filter(|(b, a)| a < b).count();
    Ok(Ratio(BigRational::new(
        BigInt::from(100 * wins),
        BigInt::from(base.len()),
    )))
}

/// `sum_i(alt_i - base_i) / n`, in the units of the inputs.
pub fn mean_difference(base: &[Time], alt: &[Time]) -> Result<Ratio, ExperimentError> {
    check_lengths(base, alt)?;
    let total: BigRational = base
        .iter()
        .zip(alt)
        .map(|(b, a)| a.as_rational() - b.as_rational())
        .sum();
    Ok(Ratio(total / BigRational::from_integer(BigInt::from(base.len()))))
}

fn check_lengths(base: &[Time], alt: &[Time]) -> Result<(), ExperimentError> {
    if base.len() != alt.len() {
        return Err(ExperimentError::LengthMismatch {
            base: base.len(),
            alt: alt.len(),
        });
    }
    if base.is_empty() {
        return Err(ExperimentError::EmptySeries);
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ComparisonConfig {
    pub quanta: Vec<Time>,
    /// `rr` is expanded over `quanta`; every other policy runs once.
    pub policies: Vec<PolicyKind>,
    pub median_floor: Time,
    pub improvement: ImprovementRule,
    pub parallel: bool,
}

impl ComparisonConfig {
    pub fn new(quanta: Vec<Time>) -> Self {
        ComparisonConfig {
            quanta,
            policies: vec![PolicyKind::An, PolicyKind::FixedRr],
            median_floor: Time::from_ms(DEFAULT_MEDIAN_FLOOR_MS),
            improvement: ImprovementRule::Relative,
            parallel: true,
        }
    }

    fn descriptors(&self) -> Result<Vec<PolicyDescriptor>, ExperimentError> {
        let mut out = Vec::new();
        for &kind in &self.policies {
            if kind == PolicyKind::FixedRr {
                for q in &self.quanta {
                    out.push(PolicyDescriptor::fixed_rr(q.clone())?);
                }
            } else {
                out.push(PolicyDescriptor::new(kind, None, Some(self.median_floor.clone()))?);
            }
        }
        Ok(out)
    }
}

/// One vertex of a per-sample series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRow {
    pub sample_index: usize,
    pub sample_name: String,
    pub policy: PolicyDescriptor,
    pub avg_turnaround: Time,
    pub avg_waiting: Time,
    /// Slice-boundary convention.
    pub switches: usize,
}

impl SeriesRow {
    pub fn quantum(&self) -> Option<&Time> {
        self.policy.fixed_quantum()
    }
}

/// AN against RR at one fixed quantum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumSummary {
    pub quantum: Time,
    pub improvement_tat: Ratio,
    pub improvement_wt: Ratio,
    pub success_tat: Ratio,
    pub success_wt: Ratio,
    /// Mean of `an - rr` per sample, in milliseconds.
    pub mean_difference_tat: Ratio,
    pub mean_difference_wt: Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub quanta: Vec<Time>,
    pub sample_count: usize,
    /// Sample-major, then in policy order.
    pub rows: Vec<SeriesRow>,
    pub summary: Vec<QuantumSummary>,
    pub improvement_rule: ImprovementRule,
}

impl ComparisonReport {
    /// Rows for one policy, in sample order.
    pub fn series<'a>(&'a self, policy: &PolicyDescriptor) -> impl Iterator<Item = &'a SeriesRow> + 'a {
        let policy = policy.clone();
        self.rows.iter().filter(move |r| r.policy == policy)
    }

    pub fn summary_for(&self, quantum: &Time) -> Option<&QuantumSummary> {
        self.summary.iter().find(|s| &s.quantum == quantum)
    }
}

fn sample_rows(
    index: usize,
    workload: &Workload,
    descriptors: &[PolicyDescriptor],
) -> Result<Vec<SeriesRow>, ExperimentError> {
    descriptors
        .iter()
        .map(|policy| {
            let trace = simulate(workload, policy).map_err(|source| ExperimentError::Simulation {
                index,
                name: workload.name.clone(),
                source,
            })?;
            let m = compute_metrics(&trace).map_err(|source| ExperimentError::Metrics {
                index,
                name: workload.name.clone(),
                source,
            })?;
            Ok(SeriesRow {
                sample_index: index,
                sample_name: workload.name.clone(),
                policy: policy.clone(),
                avg_turnaround: m.avg_turnaround,
                avg_waiting: m.avg_waiting,
                switches: m.switches_slice_boundary,
            })
        })
        .collect()
}

pub fn run_comparison(
    samples: &[Workload],
    config: &ComparisonConfig,
) -> Result<ComparisonReport, ExperimentError> {
    if samples.is_empty() {
        return Err(ExperimentError::EmptySamples);
    }
    if config.quanta.is_empty() {
        return Err(ExperimentError::EmptyQuanta);
    }
    if config.policies.is_empty() {
        return Err(ExperimentError::EmptyPolicies);
    }
    for (i, kind) in config.policies.iter().enumerate() {
        if config.policies[..i].contains(kind) {
            return Err(ExperimentError::DuplicatePolicy(*kind));
        }
    }
    for (kind, name) in [(PolicyKind::An, "an"), (PolicyKind::FixedRr, "rr")] {
        if !config.policies.contains(&kind) {
            return Err(ExperimentError::MissingPolicy(name));
        }
    }
    let descriptors = config.descriptors()?;

    let per_sample: Vec<Vec<SeriesRow>> = if config.parallel {
        samples
            .par_iter()
            .enumerate()
            .map(|(i, w)| sample_rows(i, w, &descriptors))
            .collect::<Result<_, _>>()?
    } else {
        samples
            .iter()
            .enumerate()
            .map(|(i, w)| sample_rows(i, w, &descriptors))
            .collect::<Result<_, _>>()?
    };
    let rows: Vec<SeriesRow> = per_sample.into_iter().flatten().collect();

    let an = PolicyDescriptor::an();
    let an_tat: Vec<Time> = rows.iter().filter(|r| r.policy == an).map(|r| r.avg_turnaround.clone()).collect();
    let an_wt: Vec<Time> = rows.iter().filter(|r| r.policy == an).map(|r| r.avg_waiting.clone()).collect();

    let mut summary = Vec::with_capacity(config.quanta.len());
    for q in &config.quanta {
        let rr = PolicyDescriptor::fixed_rr(q.clone())?;
        let rr_tat: Vec<Time> = rows.iter().filter(|r| r.policy == rr).map(|r| r.avg_turnaround.clone()).collect();
        let rr_wt: Vec<Time> = rows.iter().filter(|r| r.policy == rr).map(|r| r.avg_waiting.clone()).collect();
        summary.push(QuantumSummary {
            quantum: q.clone(),
            improvement_tat: improvement_percent(&rr_tat, &an_tat)?,
            improvement_wt: improvement_percent(&rr_wt, &an_wt)?,
            success_tat: success_percent(&rr_tat, &an_tat)?,
            success_wt: success_percent(&rr_wt, &an_wt)?,
            mean_difference_tat: mean_difference(&rr_tat, &an_tat)?,
            mean_difference_wt: mean_difference(&rr_wt, &an_wt)?,
        });
    }

    Ok(ComparisonReport {
        quanta: config.quanta.clone(),
        sample_count: samples.len(),
        rows,
        summary,
        improvement_rule: config.improvement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Tsv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Tsv => "tsv",
        }
    }

    fn delimiter(self) -> u8 {
        match self {
            ReportFormat::Csv => b',',
            ReportFormat::Tsv => b'\t',
        }
    }
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(ReportError::UnknownFormat(other.to_owned())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown report format `{0}` (expected csv or tsv)")]
    UnknownFormat(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Rendered report files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFiles {
    /// Columns: sample_index, policy, quantum, avg_tat, avg_wt, switches.
    pub series: String,
    /// Columns: quantum, improvement_tat, improvement_wt, success_tat, success_wt.
    pub summary: String,
}

pub const SERIES_HEADER: [&str; 6] = ["sample_index", "policy", "quantum", "avg_tat", "avg_wt", "switches"];
pub const SUMMARY_HEADER: [&str; 5] = ["quantum", "improvement_tat", "improvement_wt", "success_tat", "success_wt"];

fn render_table<I>(format: ReportFormat, header: &[&str], records: I) -> Result<String, ReportError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .delimiter(format.delimiter())
        .from_writer(Vec::new());
    w.write_record(header)?;
    for record in records {
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("report is UTF-8"))
}

pub fn emit_report(report: &ComparisonReport, format: ReportFormat) -> Result<ReportFiles, ReportError> {
    let series = render_table(
        format,
        &SERIES_HEADER,
        report.rows.iter().map(|r| {
            vec![
                r.sample_index.to_string(),
                r.policy.kind().name().to_owned(),
                r.quantum().map(Time::to_string).unwrap_or_default(),
                r.avg_turnaround.to_string(),
                r.avg_waiting.to_string(),
                r.switches.to_string(),
            ]
        }),
    )?;
    let summary = render_table(
        format,
        &SUMMARY_HEADER,
        report.summary.iter().map(|s| {
            let (tat, wt) = match report.improvement_rule {
                ImprovementRule::Relative => (&s.improvement_tat, &s.improvement_wt),
                ImprovementRule::Literal => (&s.mean_difference_tat, &s.mean_difference_wt),
            };
            vec![
                s.quantum.to_string(),
                tat.to_string(),
                wt.to_string(),
                s.success_tat.to_string(),
                s.success_wt.to_string(),
            ]
        }),
    )?;
    Ok(ReportFiles { series, summary })
}

/// Writes `series.<ext>` and `summary.<ext>` into `dir`, creating it if needed.
pub fn write_report(
    report: &ComparisonReport,
    format: ReportFormat,
    dir: impl AsRef<Path>,
) -> Result<(PathBuf, PathBuf), ReportError> {
    let files = emit_report(report, format)?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let series = dir.join(format!("series.{}", format.extension()));
    let summary = dir.join(format!("summary.{}", format.extension()));
    fs::write(&series, files.series)?;
    fs::write(&summary, files.summary)?;
    Ok((series, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(xs: &[u64]) -> Vec<Time> {
        xs.iter().map(|&x| Time::from_ms(x)).collect()
    }

    fn pct(n: i64, d: i64) -> Ratio {
        Ratio(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn improvement_examples() {
        assert_eq!(improvement_percent(&ts(&[100]), &ts(&[80])).unwrap(), pct(20, 1));
        assert_eq!(improvement_percent(&ts(&[5, 7]), &ts(&[5, 7])).unwrap(), Ratio::zero());
        assert_eq!(
            improvement_percent(&ts(&[100, 200]), &ts(&[90, 150])).unwrap(),
            pct(35, 2)
        );
    }

    #[test]
    fn improvement_errors() {
        assert!(matches!(
            improvement_percent(&ts(&[1, 2]), &ts(&[1])),
            Err(ExperimentError::LengthMismatch { base: 2, alt: 1 })
        ));
        assert!(matches!(
            improvement_percent(&[], &[]),
            Err(ExperimentError::EmptySeries)
        ));
        assert!(matches!(
            improvement_percent(&ts(&[10, 0]), &ts(&[5, 3])),
            Err(ExperimentError::NonPositiveBase(1))
        ));
        // Both zero: no difference, counted as zero improvement.
        assert_eq!(improvement_percent(&ts(&[10, 0]), &ts(&[5, 0])).unwrap(), pct(25, 1));
    }

    #[test]
    fn success_examples() {
        assert_eq!(success_percent(&ts(&[100, 100]), &ts(&[90, 100])).unwrap(), pct(50, 1));
        assert_eq!(success_percent(&ts(&[9, 9, 9]), &ts(&[1, 2, 3])).unwrap(), pct(100, 1));
        assert_eq!(success_percent(&ts(&[4, 4]), &ts(&[4, 4])).unwrap(), Ratio::zero());
        assert!(matches!(
            success_percent(&ts(&[1]), &ts(&[])),
            Err(ExperimentError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn literal_difference_is_signed_mean() {
        assert_eq!(
            mean_difference(&ts(&[100, 200]), &ts(&[90, 150])).unwrap(),
            pct(-30, 1)
        );
    }

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert_eq!("tsv".parse::<ReportFormat>().unwrap(), ReportFormat::Tsv);
        assert!(matches!(
            "json".parse::<ReportFormat>(),
            Err(ReportError::UnknownFormat(_))
        ));
    }

    #[test]
    fn single_sample_success() {
        let w = Workload::from_pairs("case1", &[(0, 20), (0, 40), (0, 60), (0, 80)]);
        let report = run_comparison(&[w], &ComparisonConfig::new(ts(&[20]))).unwrap();
        let s = report.summary_for(&Time::from_ms(20)).unwrap();
        assert_eq!(s.success_tat, pct(100, 1));
        assert_eq!(s.improvement_tat, pct(50, 3));
        assert_eq!(s.mean_difference_tat, pct(-20, 1));
    }

    #[test]
    fn precondition_errors() {
        let w = Workload::from_pairs("w", &[(0, 5)]);
        let mut cfg = ComparisonConfig::new(ts(&[10]));
        assert!(matches!(run_comparison(&[], &cfg), Err(ExperimentError::EmptySamples)));
        cfg.policies.clear();
        assert!(matches!(
            run_comparison(std::slice::from_ref(&w), &cfg),
            Err(ExperimentError::EmptyPolicies)
        ));
        cfg.policies = vec![PolicyKind::An];
        assert!(matches!(
            run_comparison(std::slice::from_ref(&w), &cfg),
            Err(ExperimentError::MissingPolicy("rr"))
        ));
        cfg.policies = vec![PolicyKind::An, PolicyKind::FixedRr, PolicyKind::An];
        assert!(matches!(
            run_comparison(std::slice::from_ref(&w), &cfg),
            Err(ExperimentError::DuplicatePolicy(PolicyKind::An))
        ));
        let cfg = ComparisonConfig::new(vec![Time::zero()]);
        assert!(matches!(
            run_comparison(std::slice::from_ref(&w), &cfg),
            Err(ExperimentError::Policy(PolicyError::NonPositiveQuantum))
        ));
        assert!(matches!(
            run_comparison(&[w], &ComparisonConfig::new(vec![])),
            Err(ExperimentError::EmptyQuanta)
        ));
    }

    #[test]
    fn invalid_sample_is_named() {
        let good = Workload::from_pairs("good", &[(0, 5)]);
        let bad = Workload::from_pairs("bad", &[(0, 0)]);
        match run_comparison(&[good, bad], &ComparisonConfig::new(ts(&[10]))) {
            Err(ExperimentError::Simulation { index: 1, name, .. }) => assert_eq!(name, "bad"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
