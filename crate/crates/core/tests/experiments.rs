mod common;

use common::{fixture, ms};
use meanrr_core::{
    compute_metrics, emit_report, generate_samples, run_comparison, simulate, success_percent,
    write_report, ComparisonConfig, GeneratorConfig, ImprovementRule, PolicyDescriptor,
    PolicyKind, ReportFormat, Time, Workload,
};

fn cases() -> Vec<Workload> {
    ["case1", "case2", "case3", "case4"].into_iter().map(fixture).collect()
}

#[test]
fn golden_cases_fill_the_matrix() {
    let report = run_comparison(&cases(), &ComparisonConfig::new(vec![ms(20)])).unwrap();
    let an: Vec<_> = report.series(&PolicyDescriptor::an()).collect();
    let rr20 = PolicyDescriptor::fixed_rr(20u64).unwrap();
    let rr: Vec<_> = report.series(&rr20).collect();
    assert_eq!((an.len(), rr.len()), (4, 4));
    assert_eq!((an[0].avg_turnaround.clone(), an[0].avg_waiting.clone()), (ms(100), ms(50)));
    assert_eq!((rr[0].avg_turnaround.clone(), rr[0].avg_waiting.clone()), (ms(120), ms(70)));
    assert_eq!(rr[1].switches, 11);
}

#[test]
fn summary_and_series_files() {
    let report = run_comparison(&cases(), &ComparisonConfig::new(vec![ms(20)])).unwrap();
    let files = emit_report(&report, ReportFormat::Csv).unwrap();
    let summary: Vec<&str> = files.summary.lines().collect();
    assert_eq!(summary[0], "quantum,improvement_tat,improvement_wt,success_tat,success_wt");
    assert_eq!(summary.len(), 2);
    assert!(summary[1].starts_with("20,"));
    let series: Vec<&str> = files.series.lines().collect();
    assert_eq!(series[0], "sample_index,policy,quantum,avg_tat,avg_wt,switches");
    assert_eq!(series[1], "0,an,,100,50,3");
    assert_eq!(series[2], "0,rr,20,120,70,9");
    assert_eq!(series[4], "1,rr,20,100.5,47,11");

    let tsv = emit_report(&report, ReportFormat::Tsv).unwrap();
    assert!(tsv.series.starts_with("sample_index\tpolicy\tquantum\t"));
}

#[test]
fn row_count_for_a_generated_study() {
    let samples = generate_samples(&GeneratorConfig { seed: 11, ..Default::default() }).unwrap();
    let quanta = vec![ms(10), ms(15), ms(20), ms(25), ms(30)];
    let report = run_comparison(&samples, &ComparisonConfig::new(quanta)).unwrap();
    let files = emit_report(&report, ReportFormat::Csv).unwrap();
    assert_eq!(files.series.lines().count() - 1, 50 * (1 + 5));
    assert_eq!(files.summary.lines().count() - 1, 5);
}

#[test]
fn extra_policies_appear_in_the_series() {
    let mut cfg = ComparisonConfig::new(vec![ms(20), ms(30)]);
    cfg.policies = vec![PolicyKind::An, PolicyKind::FixedRr, PolicyKind::MedianRr, PolicyKind::Sjf];
    let report = run_comparison(&cases(), &cfg).unwrap();
    assert_eq!(report.rows.len(), 4 * 5);
    let median: Vec<_> = report
        .series(&PolicyDescriptor::median_rr(25u64).unwrap())
        .collect();
    assert_eq!(median[0].avg_turnaround, Time::from_fraction(225, 2).unwrap());
}

#[test]
fn parallel_and_serial_runs_agree() {
    let samples = generate_samples(&GeneratorConfig { seed: 5, n_samples: 80, ..Default::default() }).unwrap();
    let mut cfg = ComparisonConfig::new(vec![ms(10), ms(25)]);
    let parallel = run_comparison(&samples, &cfg).unwrap();
    cfg.parallel = false;
    let serial = run_comparison(&samples, &cfg).unwrap();
    assert_eq!(parallel, serial);
    assert_eq!(
        emit_report(&parallel, ReportFormat::Csv).unwrap(),
        emit_report(&serial, ReportFormat::Csv).unwrap()
    );
}

#[test]
fn aggregates_are_permutation_invariant() {
    let samples = generate_samples(&GeneratorConfig { seed: 9, ..Default::default() }).unwrap();
    let mut reversed = samples.clone();
    reversed.reverse();
    let cfg = ComparisonConfig::new(vec![ms(10), ms(30)]);
    let a = run_comparison(&samples, &cfg).unwrap();
    let b = run_comparison(&reversed, &cfg).unwrap();
    assert_eq!(a.summary, b.summary);
}

#[test]
fn success_matches_recomputation_from_traces() {
    let samples = generate_samples(&GeneratorConfig { seed: 21, ..Default::default() }).unwrap();
    let report = run_comparison(&samples, &ComparisonConfig::new(vec![ms(15)])).unwrap();
    let avg_tat = |w: &Workload, p: &PolicyDescriptor| {
        compute_metrics(&simulate(w, p).unwrap()).unwrap().avg_turnaround
    };
    let rr = PolicyDescriptor::fixed_rr(15u64).unwrap();
    let base: Vec<Time> = samples.iter().map(|w| avg_tat(w, &rr)).collect();
    let alt: Vec<Time> = samples.iter().map(|w| avg_tat(w, &PolicyDescriptor::an())).collect();
    assert_eq!(
        report.summary_for(&ms(15)).unwrap().success_tat,
        success_percent(&base, &alt).unwrap()
    );
}

#[test]
fn identical_policies_show_no_improvement() {
    // With a quantum covering every burst and all-zero arrivals, RR and the
    // mean rule both run each job to completion in input order.
    let w = Workload::from_pairs("flat", &[(0, 30), (0, 30), (0, 30)]);
    let report = run_comparison(&[w], &ComparisonConfig::new(vec![ms(100)])).unwrap();
    let s = &report.summary[0];
    assert_eq!(s.improvement_tat.to_string(), "0");
    assert_eq!(s.success_tat.to_string(), "0");
}

#[test]
fn literal_rule_changes_improvement_columns() {
    let mut cfg = ComparisonConfig::new(vec![ms(20)]);
    cfg.improvement = ImprovementRule::Literal;
    let report = run_comparison(&cases()[..1], &cfg).unwrap();
    let files = emit_report(&report, ReportFormat::Csv).unwrap();
    assert_eq!(files.summary.lines().nth(1), Some("20,-20,-20,100,100"));
}

#[test]
fn report_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out");
    let report = run_comparison(&cases(), &ComparisonConfig::new(vec![ms(20)])).unwrap();
    let (series, summary) = write_report(&report, ReportFormat::Tsv, &out).unwrap();
    assert!(series.ends_with("series.tsv") && summary.ends_with("summary.tsv"));
    assert_eq!(
        std::fs::read_to_string(summary).unwrap(),
        emit_report(&report, ReportFormat::Tsv).unwrap().summary
    );
}
