use taubnut::config_file::ConfigFile;
use taubnut::manifest::RunManifest;
use taubnut::plot::{emit_plot_data, plot_rows, PlotQuantity};
use taubnut::report::VerificationReport;
use taubnut::sampling::random_config;
use taubnut::suite::{run_suite, CheckName, IDENTITY_CHECKLIST};

fn with_workers<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .unwrap()
        .install(f)
}

fn fast(mut m: RunManifest) -> RunManifest {
    m.samples.points = 60;
    m.samples.harmonic_points = 30;
    m.samples.oracle_points = 20;
    m.samples.sphere_nodes = 300;
    m
}

#[test]
fn reports_are_identical_across_worker_counts() {
    let m = fast(RunManifest::new(ConfigFile::from_config(&random_config(
        3, 0.3, 11,
    ))));
    let one = with_workers(1, || run_suite(&m)).unwrap().report.to_json();
    let four = with_workers(4, || run_suite(&m)).unwrap().report.to_json();
    let again = with_workers(3, || run_suite(&m)).unwrap().report.to_json();
    assert_eq!(one, four);
    assert_eq!(one, again);
    let parsed: VerificationReport = serde_json::from_str(&one).unwrap();
    assert_eq!(parsed.to_json(), one);
}

#[test]
fn every_selected_check_appears_once_in_order() {
    let mut m = fast(RunManifest::preset("two-center").unwrap());
    m.suite = vec![
        CheckName::FluxQuantization,
        CheckName::Harmonicity,
        CheckName::Mass,
    ];
    let r = run_suite(&m).unwrap().report;
    let names: Vec<_> = r.checks.iter().map(|c| c.name).collect();
    assert_eq!(names, m.suite);
    assert!(r.passed());
    assert_eq!(r.summary.total, 3);
    assert_eq!(r.provenance.manifest_sha256, m.digest());
    assert!(r.checks.iter().all(|c| c.wall_time_ms.is_none()));
}

#[test]
fn seed_changes_points_but_not_verdict() {
    let mut a = fast(RunManifest::preset("ak").unwrap());
    a.suite = vec![CheckName::RicciFlatness];
    let mut b = a.clone();
    b.seed = 99;
    let (ra, rb) = (run_suite(&a).unwrap().report, run_suite(&b).unwrap().report);
    assert!(ra.passed() && rb.passed());
    assert_ne!(ra.checks[0].worst_point, rb.checks[0].worst_point);
}

#[test]
fn flat_preset_is_exactly_flat() {
    let r = run_suite(&fast(RunManifest::preset("flat").unwrap()))
        .unwrap()
        .report;
    assert!(r.passed());
    for c in [
        CheckName::Mass,
        CheckName::RiemDecay,
        CheckName::MetricDeviationDecay,
        CheckName::FiberLength,
    ] {
        assert_eq!(r.check(c).unwrap().value, 0.0, "{c}");
    }
}

#[test]
fn perturbed_connection_is_caught() {
    let r = run_suite(&fast(RunManifest::preset("perturbed-connection").unwrap()))
        .unwrap()
        .report;
    for c in [
        CheckName::ConnectionCurvature,
        CheckName::KahlerClosedness,
        CheckName::RicciFlatness,
        CheckName::FluxQuantization,
    ] {
        let rec = r.check(c).unwrap();
        assert!(!rec.passed, "{c} passed with value {}", rec.value);
    }
    // failing pointwise checks say where
    assert!(r
        .check(CheckName::RicciFlatness)
        .unwrap()
        .worst_point
        .is_some());
    assert!(!r.passed());
    // the perturbation leaves V alone
    assert!(r.check(CheckName::Harmonicity).unwrap().passed);
}

#[test]
fn unequal_masses_give_fractional_chern_numbers() {
    let mut m = RunManifest::preset("unequal-masses").unwrap();
    m.suite = vec![CheckName::FluxQuantization];
    let r = run_suite(&m).unwrap().report;
    let rec = &r.checks[0];
    assert!(!rec.passed);
    let small: Vec<f64> = serde_json::from_value(rec.details["small"].clone()).unwrap();
    assert!((small[0] + 1.0).abs() < 1e-8);
    assert!((small[1] + 1.6).abs() < 1e-8, "{small:?}");
}

#[test]
fn tolerance_scale_moves_the_verdict() {
    let mut m = RunManifest::preset("taub-nut").unwrap();
    m.suite = vec![CheckName::VolumeGrowth];
    assert!(run_suite(&m).unwrap().report.passed());
    m.tol_scale = 1e-3;
    assert!(!run_suite(&m).unwrap().report.passed());
}

#[test]
fn checklist_maps_to_default_suite() {
    let default = RunManifest::preset("flat").unwrap().checks();
    assert_eq!(default, CheckName::ALL.to_vec());
    for (identity, check) in IDENTITY_CHECKLIST {
        assert!(default.contains(check), "{identity}");
    }
}

#[test]
fn riem_decay_rows_decrease() {
    let m = RunManifest::preset("taub-nut").unwrap();
    let rows = plot_rows(&m, PlotQuantity::RiemDecay).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
}

#[test]
fn flat_plot_data_vanishes() {
    let m = RunManifest::preset("flat").unwrap();
    let dir = tempfile::tempdir().unwrap();
    for q in PlotQuantity::ALL {
        let path = dir.path().join(format!("{}.csv", q.as_str()));
        let rows = emit_plot_data(&m, q, &path).unwrap();
        assert!(
            rows.iter().all(|(_, v)| *v == 0.0),
            "{}: {rows:?}",
            q.as_str()
        );
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), rows.len() + 1);
        assert_eq!(text.lines().next(), Some("radius,value"));
    }
}

#[test]
fn mass_convergence_ends_near_total_mass() {
    for (name, total) in [("taub-nut", 0.5), ("two-center", 0.5), ("ak", 0.75)] {
        let rows = plot_rows(
            &RunManifest::preset(name).unwrap(),
            PlotQuantity::MassConvergence,
        )
        .unwrap();
        let last = rows.last().unwrap().1;
        assert!((last / total - 1.0).abs() < 0.01, "{name}: {last}");
    }
}
