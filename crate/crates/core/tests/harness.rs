use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use fklab::eigsolve::principal_eigenpair;
use fklab::gridcore::{build_grid_domain, ScalarField, ShapeSpec};
use fklab::harness::*;
use fklab::mixedop::MixedOperator;
use fklab::Error;

fn cfg(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).unwrap()
}

#[test]
fn config_defaults_and_rejections() {
    let c = ExperimentConfig::default();
    assert_eq!(c.s, 0.25);
    assert_eq!(c.spacings(), vec![DEFAULT_H]);
    assert_eq!(c.slack, 0.02);
    assert_eq!(cfg(r#"{"h": 0.1, "h_list": [0.2, 0.05]}"#).spacings(), vec![0.2, 0.05]);

    for bad in [
        r#"{"unknown": 1}"#,
        r#"{"superlevel": {"levels": 3, "typo": 1}}"#,
        r#"{"solver": {"tolerance": 1e-8}}"#,
        r#"{"domains": [{"kind": "disk", "radius": 1, "colour": 2}]}"#,
        r#"{"s": 1.0}"#,
        r#"{"s": 0}"#,
        r#"{"h": -0.1}"#,
        r#"{"local_scale": 0}"#,
        r#"{"domains": [{"kind": "disk", "radius": -1}]}"#,
        r#"{"level_profile": {"levels": 1}}"#,
        r#"{"scaling": {"ts": [1.5]}}"#,
        r#"{"counterexample": {"hull_deltas": [0.5]}}"#,
        "not json",
    ] {
        assert!(matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))), "{bad}");
    }
}

#[test]
fn config_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let mut c = ExperimentConfig::default();
    c.name = Some("round trip".into());
    c.domains = vec![ShapeSpec::Ellipse { a: 1.2, b: 0.4, center: [0.1, 0.0] }];
    fs::write(&path, serde_json::to_string_pretty(&c).unwrap()).unwrap();
    assert_eq!(ExperimentConfig::from_path(&path).unwrap(), c);
    assert!(ExperimentConfig::from_path(&dir.path().join("missing.json")).is_err());
}

#[test]
fn unwritable_output_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let out = file.join("sub");
    assert!(matches!(ExperimentConfig::prepare_output(&out), Err(Error::Config(_))));
    let r = run_experiment(Experiment::Hopf, &ExperimentConfig::default(), &out, false);
    assert_eq!(exit_code(&r), EXIT_CONFIG);
}

#[test]
fn bound_factor_example() {
    let f = superlevel_bound_factor(2, 0.25, 0.01, PI, 0.02);
    assert!((f - 0.68).abs() < 1e-12);
    let f = superlevel_bound_factor(2, 0.25, 0.02, PI, 0.001);
    assert!((f - (1.0 - 16.0 * 0.02 * PI.sqrt())).abs() < 1e-12);
    assert_eq!(superlevel_bound_factor(2, 0.25, 0.0, PI, 0.0), 1.0);
}

#[test]
fn ball_perimeter_examples() {
    assert!((ball_perimeter(2, PI) - 2.0 * PI).abs() < 1e-14);
    assert!((ball_perimeter(2, 4.0 * PI) - 4.0 * PI).abs() < 1e-13);
    assert_eq!(ball_perimeter(1, 0.7), 2.0);
}

#[test]
fn tent_has_constant_psi() {
    let d = Arc::new(build_grid_domain(&ShapeSpec::Interval { a: -1.0, b: 1.0 }, 1.0 / 2048.0).unwrap());
    let u = ScalarField::from_fn(d, |p| 1.0 - p[0].abs()).unwrap();
    let prof = level_profile(&u, 32).unwrap();
    assert!(prof.volume_monotone());
    for r in &prof.rows {
        assert!((r.psi - 2.0).abs() <= 0.05, "t = {}: {}", r.t, r.psi);
        assert!((r.volume - 2.0 * (1.0 - r.t)).abs() <= 2.0 / 2048.0 + 1e-12);
        assert!(!r.skipped);
    }
    assert!(level_profile(&u, 1).is_err());
}

#[test]
fn disk_profile_has_small_step_one_value() {
    let spec = ShapeSpec::Disk { center: [0.0; 2], radius: 1.0 };
    let d = Arc::new(build_grid_domain(&spec, 1.0 / 64.0).unwrap());
    let pair = principal_eigenpair(&MixedOperator::mixed(d, 0.25).unwrap(), 1e-9, 300).unwrap();
    let prof = level_profile(&pair.u0, 64).unwrap();
    assert!(prof.volume_monotone());
    assert!(prof.rows.iter().all(|r| r.psi >= 0.0));
    let b = ball_reference(&ExperimentConfig::default(), 2, PI, 1.0 / 64.0).unwrap();
    assert!(prof.step1_value().abs() <= b.noise, "{} vs {}", prof.step1_value(), b.noise);
}

#[test]
fn verdicts_and_status() {
    assert_eq!(margin_verdict(1.0, 0.1), "pass");
    assert_eq!(margin_verdict(0.1, 0.1), "inconclusive");
    assert_eq!(margin_verdict(-1.0, 0.1), "fail");
    assert_eq!(Status::Pass.and(Status::Inconclusive), Status::Inconclusive);
    assert_eq!(Status::Inconclusive.and(Status::Fail), Status::Fail);
    assert_eq!(Status::Fail.and(Status::SolverFailure), Status::SolverFailure);
    assert_eq!(Status::from_ok(false), Status::Fail);
}

#[test]
fn loglog_fit_recovers_power_laws() {
    let pts: Vec<(f64, f64)> = [1e-4f64, 1e-3, 1e-2, 0.1].iter().map(|&x| (x, 3.0 * x.powf(0.4))).collect();
    let (slope, icpt) = loglog_fit(&pts).unwrap();
    assert!((slope - 0.4).abs() < 1e-12);
    assert!((icpt.exp() - 3.0).abs() < 1e-10);
    assert!(loglog_fit(&[(1.0, 1.0)]).is_none());
    assert!(loglog_fit(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
}

#[test]
fn experiment_names_round_trip() {
    for e in Experiment::ALL {
        assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        assert_eq!(e.to_string(), e.name());
    }
    assert!("nope".parse::<Experiment>().is_err());
}

fn strip_stamp(p: &Path) -> String {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("# generated_unix="))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reruns_are_byte_identical() {
    let c = cfg(r#"{
        "name": "determinism",
        "h": 0.0625,
        "domains": [
            {"kind": "disk", "radius": 1},
            {"kind": "ellipse", "a": 1.3, "b": 0.7}
        ],
        "counterexample": {"random_polygons": 20, "bump_samples": 256}
    }"#);
    for exp in [Experiment::Eig, Experiment::FkSweep, Experiment::Superlevel, Experiment::Counterexample] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ra = run_experiment(exp, &c, a.path(), true).unwrap();
        let rb = run_experiment(exp, &c, b.path(), true).unwrap();
        assert_eq!(ra.files.len(), rb.files.len());
        for (fa, fb) in ra.files.iter().zip(&rb.files) {
            assert_eq!(fa.file_name(), fb.file_name());
            assert_eq!(strip_stamp(fa), strip_stamp(fb), "{exp}");
        }
        let main = fs::read_to_string(&ra.files[0]).unwrap();
        let mut lines = main.lines();
        assert_eq!(lines.next().unwrap(), format!("# schema={}/1", exp.name()));
        assert!(lines.next().unwrap().starts_with("# generated_unix="));
        assert_eq!(lines.next().unwrap(), "# name=determinism");
        assert!(main.trim_end().ends_with(&format!("# status={}", ra.status.as_str())));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let base = r#"{"h": 0.0625, "domains": [{"kind": "stadium", "len": 0.6, "radius": 0.5}]"#;
    let one = cfg(&format!("{base}, \"threads\": 1}}"));
    let many = cfg(&format!("{base}, \"threads\": 4}}"));
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_experiment(Experiment::Eig, &one, a.path(), false).unwrap();
    let rb = run_experiment(Experiment::Eig, &many, b.path(), false).unwrap();
    assert_eq!(strip_stamp(&ra.files[0]), strip_stamp(&rb.files[0]));
}

#[test]
fn exit_codes_follow_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = cfg(r#"{"h": 0.0625, "hopf": {"samples": 16}}"#);
    let r = run_experiment(Experiment::Hopf, &ok, dir.path(), false);
    assert_eq!(r.as_ref().unwrap().status, Status::Pass);
    assert_eq!(exit_code(&r), EXIT_OK);

    let stuck = cfg(r#"{"h": 0.0625, "solver": {"tol": 1e-14, "max_iter": 1}}"#);
    let r = run_experiment(Experiment::Eig, &stuck, dir.path(), false);
    assert_eq!(r.as_ref().unwrap().status, Status::SolverFailure);
    assert_eq!(exit_code(&r), EXIT_SOLVER);
    let csv = fs::read_to_string(&r.unwrap().files[0]).unwrap();
    assert!(csv.contains("# failed[0]="));

    let wrong_target = cfg(r#"{"counterexample": {"slope_target": 0.2, "slope_tol": 0.01, "random_polygons": 0}}"#);
    let r = run_experiment(Experiment::Counterexample, &wrong_target, dir.path(), false);
    assert_eq!(exit_code(&r), EXIT_HARD_FAIL);

    let mut bad = ExperimentConfig::default();
    bad.s = 2.0;
    assert_eq!(exit_code(&run_experiment(Experiment::Eig, &bad, dir.path(), false)), EXIT_CONFIG);
}

#[test]
fn scaling_at_unit_factor_is_an_equality() {
    let c = cfg(r#"{"h": 0.0625, "scaling": {"ts": [1.0]}}"#);
    let r = run_scaling(&c).unwrap();
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    assert_eq!(row.lambda_scaled, row.lambda);
    assert_eq!(row.lower, row.lambda);
    assert_eq!(row.upper, row.lambda);
    assert_eq!(r.status, Status::Pass);
}

#[test]
fn fk_sweep_disk_is_within_noise_and_intervals_order() {
    let c = cfg(r#"{"h": 0.03125, "fk_sweep": {"aspects": [1.0], "polya_szego": false}}"#);
    let r = run_fk_sweep(&c).unwrap();
    let row = &r.rows[0];
    assert!(row.margin.abs() <= 2.0 * row.noise_floor, "{row:?}");
    assert_eq!(row.verdict, "inconclusive");

    let c = cfg(r#"{
        "h": 0.0078125, "local_scale": 1, "nonlocal_scale": 0,
        "fk_sweep": {"aspects": [], "polya_szego": false},
        "domains": [{"kind": "intervals", "parts": [[0, 1], [2, 3]]}]
    }"#);
    let r = run_fk_sweep(&c).unwrap();
    let row = &r.rows[0];
    assert!((row.lambda - PI * PI).abs() / (PI * PI) < 1e-3);
    assert!((row.ball_lambda - PI * PI / 4.0).abs() / (PI * PI / 4.0) < 1e-3);
    assert_eq!(row.verdict, "pass");
}
