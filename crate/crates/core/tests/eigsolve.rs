mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::J0_ZERO;
use fklab::eigsolve::*;
use fklab::gridcore::{build_grid_domain, GridDomain, ScalarField, ShapeSpec};
use fklab::mixedop::{rayleigh_quotient, MixedOperator, NonlocalPath};
use fklab::Error;

fn dom(spec: &ShapeSpec, h: f64) -> Arc<GridDomain> {
    Arc::new(build_grid_domain(spec, h).unwrap())
}

fn disk() -> ShapeSpec {
    ShapeSpec::Disk {
        center: [0.0; 2],
        radius: 1.0,
    }
}

fn check_invariants(pair: &EigenPair, tol: f64) {
    let d = pair.u0.domain();
    let norm2: f64 = pair.u0.values().iter().map(|v| v * v).sum::<f64>() * d.cell_measure();
    assert!((norm2 - 1.0).abs() <= 1e-12);
    assert!(pair.u0.values().iter().all(|&v| v >= 0.0));
    assert!(pair.residual <= tol);
    assert!(pair.lambda > 0.0);
}

#[test]
fn interval_laplacian_matches_pi_squared() {
    let d = dom(&ShapeSpec::Interval { a: 0.0, b: 1.0 }, 1.0 / 1024.0);
    let op = MixedOperator::laplacian(d).unwrap();
    let pair = principal_eigenpair(&op, 1e-10, 500).unwrap();
    check_invariants(&pair, 1e-10);
    assert!((pair.lambda - PI * PI).abs() / (PI * PI) <= 1e-3);
}

#[test]
fn disk_laplacian_matches_bessel_zero() {
    let d = dom(&disk(), 1.0 / 128.0);
    let op = MixedOperator::laplacian(d).unwrap();
    let pair = principal_eigenpair(&op, 1e-8, 200).unwrap();
    check_invariants(&pair, 1e-8);
    let want = J0_ZERO * J0_ZERO;
    assert!((pair.lambda - want).abs() / want <= 2e-2, "{}", pair.lambda);
}

#[test]
fn mixed_eigenvalue_dominates_local() {
    for spec in [disk(), ShapeSpec::Ellipse { a: 1.4, b: 0.6, center: [0.0; 2] }] {
        let d = dom(&spec, 1.0 / 32.0);
        let local = principal_eigenpair(&MixedOperator::laplacian(d.clone()).unwrap(), 1e-9, 300).unwrap();
        for s in [0.1, 0.5, 0.9] {
            let op = MixedOperator::mixed(d.clone(), s).unwrap();
            let mixed = principal_eigenpair(&op, 1e-9, 300).unwrap();
            check_invariants(&mixed, 1e-9);
            assert!(mixed.lambda >= local.lambda * (1.0 - 1e-8));
        }
    }
}

#[test]
fn eigenvalue_is_its_rayleigh_quotient() {
    let d = dom(&ShapeSpec::Stadium { len: 0.6, radius: 0.5, center: [0.0; 2] }, 1.0 / 32.0);
    let op = MixedOperator::mixed(d.clone(), 0.25).unwrap();
    let pair = principal_eigenpair(&op, 1e-10, 300).unwrap();
    let q = rayleigh_upper_bound(&op, &pair.u0).unwrap();
    assert!((q - pair.lambda).abs() <= 1e-9 * pair.lambda);

    let bump = ScalarField::from_fn(d.clone(), |p| (1.0 - 2.0 * (p[0] * p[0] + p[1] * p[1])).max(0.0)).unwrap();
    assert!(rayleigh_upper_bound(&op, &bump).unwrap() >= pair.lambda);
    assert!(rayleigh_upper_bound(&op, &ScalarField::zeros(d)).is_err());
}

#[test]
fn sine_trial_bounds_the_mixed_eigenvalue() {
    let d = dom(&ShapeSpec::Interval { a: 0.0, b: 1.0 }, 1.0 / 256.0);
    let op = MixedOperator::mixed(d.clone(), 0.25).unwrap();
    let sine = ScalarField::from_fn(d.clone(), |p| (PI * p[0]).sin()).unwrap();
    let bound = rayleigh_upper_bound(&op, &sine).unwrap();
    let local = rayleigh_quotient(&MixedOperator::laplacian(d).unwrap(), &sine).unwrap();
    let pair = principal_eigenpair(&op, 1e-10, 300).unwrap();
    assert!(bound > local);
    assert!(pair.lambda <= bound);
    assert!(pair.lambda > local * 0.99);
}

#[test]
fn residuals_decrease_and_eigenfunction_is_positive() {
    for (spec, s) in [
        (disk(), 0.25),
        (ShapeSpec::Ellipse { a: 1.3, b: 0.7, center: [0.0; 2] }, 0.6),
        (ShapeSpec::Interval { a: 0.0, b: 2.0 }, 0.4),
    ] {
        let h = if spec.dim() == 1 { 1.0 / 128.0 } else { 1.0 / 32.0 };
        let d = dom(&spec, h);
        let op = MixedOperator::mixed(d.clone(), s).unwrap();
        let pair = principal_eigenpair(&op, 1e-10, 300).unwrap();
        assert_eq!(pair.residual_history.len(), pair.iterations + 1);
        for w in pair.residual_history[1..].windows(2) {
            assert!(w[1] <= w[0], "{:?}", pair.residual_history);
        }
        assert!(!pair.sign_flagged());
        assert!(d.interior().iter().all(|&i| pair.u0.values()[i] > 0.0));
    }
}

#[test]
fn shifted_mask_gives_identical_eigenvalue() {
    let h = 1.0 / 24.0;
    let base = build_grid_domain(&ShapeSpec::Ellipse { a: 0.9, b: 0.5, center: [0.0; 2] }, h).unwrap();
    let (bx, by) = base.shape();
    let (nx, ny) = (bx + 11, by + 7);
    let place = |dx: usize, dy: usize| {
        let mut mask = vec![false; nx * ny];
        for &i in base.interior() {
            let (ix, iy) = base.coords(i);
            mask[(iy + dy) * nx + ix + dx] = true;
        }
        Arc::new(GridDomain::from_mask(2, h, (nx, ny), [0.0; 2], mask).unwrap())
    };
    for path in [NonlocalPath::Direct, NonlocalPath::Fft] {
        let lambdas: Vec<f64> = [(0, 0), (3, 5), (11, 2)]
            .into_iter()
            .map(|(dx, dy)| {
                let op = MixedOperator::mixed(place(dx, dy), 0.3).unwrap().with_path(path);
                principal_eigenpair(&op, 1e-10, 300).unwrap().lambda
            })
            .collect();
        assert!(lambdas.iter().all(|l| l.to_bits() == lambdas[0].to_bits()), "{lambdas:?}");
    }
}

#[test]
fn solver_errors() {
    let d = dom(&disk(), 1.0 / 16.0);
    let frac_only = MixedOperator::mixed(d.clone(), 0.25).unwrap().with_scales(0.0, 1.0).unwrap();
    assert!(matches!(principal_eigenpair(&frac_only, 1e-8, 100), Err(Error::Indefinite(_))));
    let op = MixedOperator::mixed(d, 0.25).unwrap();
    match principal_eigenpair(&op, 1e-14, 1) {
        Err(Error::NoConvergence { iterations, residual }) => {
            assert_eq!(iterations, 1);
            assert!(residual > 1e-14);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
    assert!(principal_eigenpair(&op, 0.0, 10).is_err());
}

#[test]
fn interval_trace_matches_analytic_derivative() {
    let h = 1.0 / 1024.0;
    let spec = ShapeSpec::Interval { a: 0.0, b: 1.0 };
    let d = dom(&spec, h);
    let pair = principal_eigenpair(&MixedOperator::laplacian(d).unwrap(), 1e-10, 500).unwrap();
    let trace = normal_derivative_trace(&pair, &spec, 2);
    assert_eq!(trace.valid_count(), 2);
    let want = -PI * 2f64.sqrt();
    for v in trace.valid() {
        assert!((v - want).abs() / want.abs() <= 1e-2, "{v}");
    }
    assert_eq!(trace.negative_fraction(), 1.0);
}

#[test]
fn disk_trace_is_negative_and_zero_field_degenerate() {
    let spec = disk();
    let d = dom(&spec, 1.0 / 48.0);
    let pair = principal_eigenpair(&MixedOperator::mixed(d.clone(), 0.25).unwrap(), 1e-9, 300).unwrap();
    let trace = normal_derivative_trace(&pair, &spec, 64);
    assert!(trace.valid_count() > 0);
    assert_eq!(trace.negative_fraction(), 1.0);
    for s in &trace.samples {
        if s.outer_derivative.is_some() {
            assert!(s.stencil.iter().all(|&p| spec.contains(p)));
        }
    }
    let zero = field_normal_derivative_trace(&ScalarField::zeros(d), &spec, 64);
    assert!(zero.degenerate());
    assert_eq!(zero.negative_fraction(), 0.0);
}
