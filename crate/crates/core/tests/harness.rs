mod common;

use actime::generators::{SeriesKind, SeriesSpec};
use actime::harness::{emit_csv, emit_plot, read_csv, run_ci_sweep, run_sweep, SweepConfig, CSV_HEADER};
use actime::Method;

fn config(kinds: &[SeriesKind], lengths: Vec<usize>, methods: &[Method], seeds: std::ops::Range<u64>) -> SweepConfig {
    let n = *lengths.last().unwrap();
    SweepConfig {
        series: kinds.iter().map(|&k| SeriesSpec::new(k, n, 0)).collect(),
        lengths,
        methods: methods.to_vec(),
        seeds: seeds.collect(),
        ..SweepConfig::default()
    }
}

const NON_AR2: [SeriesKind; 6] = [
    SeriesKind::Ar1,
    SeriesKind::Ar1Arch1,
    SeriesKind::MetGauss,
    SeriesKind::BimodalMet,
    SeriesKind::StepoutLogVar,
    SeriesKind::StepoutVar,
];

#[test]
fn small_samples_underestimate_except_ar2() {
    let cfg = config(&SeriesKind::ALL, vec![1000], &Method::COMPARED, 1..11);
    let result = run_sweep(&cfg).unwrap();
    for kind in NON_AR2 {
        let truth = result.truth[&kind].tau_true;
        for m in Method::COMPARED {
            let med = common::median(&result.taus(kind, m, 1000));
            assert!(med < truth, "{kind} {m}: median {med} vs {truth}");
        }
    }
    let ics = common::median(&result.taus(SeriesKind::Ar2, Method::Ics, 1000));
    assert!(ics > 1.99, "{ics}");
}

#[test]
fn ar1_estimates_improve_with_length() {
    let cfg = config(&[SeriesKind::Ar1], vec![1000, 500_000], &Method::COMPARED, 1..11);
    let result = run_sweep(&cfg).unwrap();
    for m in Method::COMPARED {
        let short = result.taus(SeriesKind::Ar1, m, 1000);
        let long = result.taus(SeriesKind::Ar1, m, 500_000);
        if short.len() < 10 || long.len() < 10 {
            continue;
        }
        let err = |v: &[f64]| (common::median(v) - 99.0).abs();
        assert!(err(&long) <= err(&short), "{m}: {} vs {}", err(&long), err(&short));
    }
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let mut cfg = config(
        &[SeriesKind::Ar2, SeriesKind::MetGauss],
        vec![10, 100, 1000, 5000],
        &Method::ALL,
        1..4,
    );
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, workers) in [None, Some(1), Some(3)].into_iter().enumerate() {
        cfg.workers = workers;
        let p = dir.path().join(format!("r{i}.csv"));
        emit_csv(&run_sweep(&cfg).unwrap(), &p).unwrap();
        files.push(std::fs::read(&p).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(files.remove(0)).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert_eq!(text.lines().count(), 1 + 2 * 6 * 4 * 3);
    // the length-10 spectrum fit is a failure row with an empty tau
    assert!(text.lines().any(|l| l.starts_with("ar2,spectrum-fit,10,") && l.contains(",,,failed_estimate,")));
}

#[test]
fn ci_sweep_rows_and_csv() {
    let cfg = config(&[SeriesKind::Ar1], vec![200, 10_000], &[Method::BatchMeans], 1..4);
    let result = run_ci_sweep(&cfg).unwrap();
    assert!(result.has_intervals);
    assert_eq!(result.rows.len(), 6);
    for r in &result.rows {
        assert_eq!(r.method, Method::ArProcess);
        if let actime::harness::Outcome::Ok { tau, interval: Some((lo, hi)), .. } = r.outcome {
            assert!(lo <= hi && tau > 0.0);
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ci.csv");
    emit_csv(&result, &p).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    assert_eq!(text.lines().next().unwrap(), format!("{CSV_HEADER},n_rejected"));
    let back = read_csv(&p).unwrap();
    assert_eq!(back.rows, result.rows);
}

#[test]
fn plot_has_one_panel_per_series() {
    let cfg = config(
        &[SeriesKind::Ar1, SeriesKind::Ar2, SeriesKind::MetGauss],
        vec![10, 100, 1000],
        &Method::COMPARED,
        1..3,
    );
    let result = run_sweep(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("fig.svg");
    emit_plot(&result, &p).unwrap();
    let svg = std::fs::read_to_string(&p).unwrap();
    assert_eq!(svg.matches(r#"class="panel""#).count(), 3);
    assert_eq!(svg.matches(r#"class="truth""#).count(), 3);
    let ok = result.rows.iter().filter(|r| r.outcome.tau().is_some()).count();
    assert_eq!(svg.matches(r#"class="estimate""#).count(), ok);
}

#[test]
fn toml_config_drives_a_sweep() {
    let cfg = SweepConfig::from_toml_str(
        r#"
        seeds = [1, 2]
        methods = ["ics", "ar"]
        lengths = [50, 500]

        [[series]]
        kind = "ar1"
        params = { phi = 0.5 }
        "#,
    )
    .unwrap();
    let result = run_sweep(&cfg).unwrap();
    assert_eq!(result.rows.len(), 2 * 2 * 2);
    assert!((result.truth[&SeriesKind::Ar1].tau_true - 3.0).abs() < 1e-12);
}

#[test]
fn readme_config_example_parses() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let block = readme.split("```toml\n").nth(1).unwrap().split("```").next().unwrap();
    let cfg = SweepConfig::from_toml_str(block).unwrap();
    assert_eq!(cfg.lengths, vec![10, 100, 1000, 10000]);
    assert_eq!(cfg.series.len(), 2);
    assert!(cfg.ci.is_some());
}
