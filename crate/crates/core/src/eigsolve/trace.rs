use serde::Serialize;

use crate::eigsolve::EigenPair;
use crate::gridcore::{ScalarField, ShapeSpec};

/// One boundary sample of the inward one-sided difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub point: [f64; 2],
    pub inward_normal: [f64; 2],
    /// Points at depth `h` and `2h` along the inward normal.
    pub stencil: [[f64; 2]; 2],
    /// Estimate of `∂_ν u` along the outer normal; `None` if the stencil
    /// left the domain.
    pub outer_derivative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryTrace {
    pub samples: Vec<TraceSample>,
}

impl BoundaryTrace {
    pub fn valid(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().filter_map(|s| s.outer_derivative)
    }

    pub fn valid_count(&self) -> usize {
        self.valid().count()
    }

    pub fn skipped(&self) -> usize {
        self.samples.len() - self.valid_count()
    }

    /// Fraction of valid samples with `∂_ν u < 0`.
    pub fn negative_fraction(&self) -> f64 {
        let n = self.valid_count();
        if n == 0 {
            return 0.0;
        }
        self.valid().filter(|&d| d < 0.0).count() as f64 / n as f64
    }

    /// All valid derivatives vanish (for instance the zero field).
    pub fn degenerate(&self) -> bool {
        self.valid().all(|d| d == 0.0)
    }
}

/// Boundary trace of the eigenfunction of `pair` on the shape `spec`.
pub fn normal_derivative_trace(pair: &EigenPair, spec: &ShapeSpec, n_samples: usize) -> BoundaryTrace {
    field_normal_derivative_trace(&pair.u0, spec, n_samples)
}

/// `∂_ν u(ξ) ≈ -(u(ξ + 2hν) - u(ξ + hν)) / h` at boundary samples of `spec`,
/// with `ν` the inward normal and `u` interpolated between cell centers.
///
/// A sample is kept only if both stencil points lie in the shape and fall in
/// interior cells.
pub fn field_normal_derivative_trace(
    u: &ScalarField,
    spec: &ShapeSpec,
    n_samples: usize,
) -> BoundaryTrace {
    let d = u.domain();
    let h = d.spacing();
    let (nx, ny) = d.shape();
    let o = d.origin();
    let cell_of = |p: [f64; 2]| -> Option<usize> {
        let ix = ((p[0] - o[0]) / h).floor();
        let iy = if d.dim() == 1 {
            0.0
        } else {
            ((p[1] - o[1]) / h).floor()
        };
        if ix < 0.0 || iy < 0.0 || ix >= nx as f64 || iy >= ny as f64 {
            None
        } else {
            Some(d.index(ix as usize, iy as usize))
        }
    };
    let samples = spec
        .boundary_points(n_samples)
        .into_iter()
        .map(|bp| {
            let at = |depth: f64| {
                [
                    bp.point[0] + depth * bp.inward_normal[0],
                    bp.point[1] + depth * bp.inward_normal[1],
                ]
            };
            let stencil = [at(h), at(2.0 * h)];
            let ok = stencil
                .iter()
                .all(|&p| spec.contains(p) && cell_of(p).is_some_and(|c| d.is_interior(c)));
            let outer_derivative =
                ok.then(|| -(u.interpolate(stencil[1]) - u.interpolate(stencil[0])) / h);
            TraceSample {
                point: bp.point,
                inward_normal: bp.inward_normal,
                stencil,
                outer_derivative,
            }
        })
        .collect();
    BoundaryTrace { samples }
}
