use std::f64::consts::PI;
use std::sync::Arc;

use crate::eigsolve::{principal_eigenpair_with, EigenPair};
use crate::gridcore::{build_grid_domain, build_grid_domain_offset, volume, GridDomain, ShapeSpec};
use crate::harness::ExperimentConfig;
use crate::mixedop::MixedOperator;
use crate::{Error, Result};

/// Operator of the configured scales on a rasterized shape.
pub fn operator_for(cfg: &ExperimentConfig, shape: &ShapeSpec, h: f64) -> Result<MixedOperator> {
    operator_on(cfg, Arc::new(build_grid_domain(shape, h)?))
}

pub fn operator_on(cfg: &ExperimentConfig, domain: Arc<GridDomain>) -> Result<MixedOperator> {
    let op = if cfg.nonlocal_scale == 0.0 {
        MixedOperator::laplacian(domain)?.with_scales(cfg.local_scale, 0.0)?
    } else {
        MixedOperator::new(domain, cfg.s, cfg.local_scale, cfg.nonlocal_scale)?
    };
    Ok(op.with_path(cfg.nonlocal_path))
}

pub struct Solved {
    pub op: MixedOperator,
    pub pair: EigenPair,
}

pub fn solve(cfg: &ExperimentConfig, shape: &ShapeSpec, h: f64) -> Result<Solved> {
    let op = operator_for(cfg, shape, h)?;
    let pair = principal_eigenpair_with(&op, &cfg.solver)?;
    log::info!(
        "{} h={h}: lambda {:.10} after {} iterations",
        shape_label(shape),
        pair.lambda,
        pair.iterations
    );
    Ok(Solved { op, pair })
}

pub fn is_solver_failure(e: &Error) -> bool {
    matches!(e, Error::NoConvergence { .. } | Error::Indefinite(_))
}

/// Measure used for the comparison ball: the closed form when known, else
/// the raster volume.
pub fn shape_measure(shape: &ShapeSpec, h: f64) -> Result<f64> {
    match shape.analytic_area() {
        Some(a) => Ok(a),
        None => Ok(volume(&build_grid_domain(shape, h)?)),
    }
}

/// Origin-centered ball (interval in 1D) of measure `m`.
pub fn equal_volume_ball(dim: usize, m: f64) -> ShapeSpec {
    if dim == 1 {
        ShapeSpec::Interval {
            a: -0.5 * m,
            b: 0.5 * m,
        }
    } else {
        ShapeSpec::Disk {
            center: [0.0; 2],
            radius: (m / PI).sqrt(),
        }
    }
}

/// Sub-cell lattice offsets used to probe rasterization noise.
const SHIFTS: [[f64; 2]; 2] = [[0.29, 0.17], [0.5, 0.5]];

/// Ball eigenvalue and its noise floor: the largest change of the ball
/// eigenvalue when the lattice is moved by a fraction of a cell.
#[derive(Debug, Clone, Copy)]
pub struct BallReference {
    pub lambda: f64,
    pub noise: f64,
}

pub fn ball_reference(cfg: &ExperimentConfig, dim: usize, m: f64, h: f64) -> Result<BallReference> {
    let ball = equal_volume_ball(dim, m);
    let lambda = solve(cfg, &ball, h)?.pair.lambda;
    let mut noise = 10.0 * cfg.solver.tol * lambda;
    for [sx, sy] in SHIFTS {
        let offset = [sx, if dim == 1 { 0.0 } else { sy }];
        let op = operator_on(cfg, Arc::new(build_grid_domain_offset(&ball, h, offset)?))?;
        let l = principal_eigenpair_with(&op, &cfg.solver)?.lambda;
        noise = noise.max((l - lambda).abs());
    }
    Ok(BallReference { lambda, noise })
}

pub fn shape_label(s: &ShapeSpec) -> String {
    let c = |c: &[f64; 2]| {
        if c == &[0.0, 0.0] {
            String::new()
        } else {
            format!(",c=({},{})", c[0], c[1])
        }
    };
    match s {
        ShapeSpec::Interval { a, b } => format!("interval({a},{b})"),
        ShapeSpec::Intervals { parts } => {
            let p: Vec<String> = parts.iter().map(|p| format!("({},{})", p[0], p[1])).collect();
            format!("intervals{}", p.join(""))
        }
        ShapeSpec::Disk { center, radius } => format!("disk(r={radius}{})", c(center)),
        ShapeSpec::Ellipse { a, b, center } => format!("ellipse(a={a},b={b}{})", c(center)),
        ShapeSpec::Rectangle { w, ht, center } => format!("rectangle(w={w},h={ht}{})", c(center)),
        ShapeSpec::Stadium { len, radius, center } => {
            format!("stadium(len={len},r={radius}{})", c(center))
        }
        ShapeSpec::Polygon { vertices } => format!("polygon(n={})", vertices.len()),
        ShapeSpec::Radial { radii, center } => format!("radial(n={}{})", radii.len(), c(center)),
        ShapeSpec::PerturbedDisk {
            radius,
            amplitude,
            mode,
            center,
        } => format!("perturbed-disk(r={radius},a={amplitude},k={mode}{})", c(center)),
    }
}

/// Eigenvalue-difference verdict under the matched-grid noise policy.
pub fn margin_verdict(margin: f64, noise: f64) -> &'static str {
    if margin.abs() < 2.0 * noise {
        "inconclusive"
    } else if margin > 0.0 {
        "pass"
    } else {
        "fail"
    }
}
