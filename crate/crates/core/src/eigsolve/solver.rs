use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eigsolve::IncompleteCholesky;
use crate::gridcore::{distance_transform, ScalarField};
use crate::mixedop::{rayleigh_quotient, MixedOperator};
use crate::{Error, Result};

/// Knobs of the inverse power iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Target for the relative max-norm eigen-residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Inner solves stop once the residual is below
    /// `max(cg_floor · tol · ‖b‖, cg_adapt · ‖r₀‖)`, where `r₀` is the
    /// residual of the warm start `x / θ` (so of the order of the current
    /// eigen-residual). `cg_adapt = 0` gives a fixed inner tolerance.
    pub cg_floor: f64,
    pub cg_adapt: f64,
    pub max_cg_iter: usize,
    /// Fraction of dropped fill moved to the preconditioner diagonal.
    pub ic_relaxation: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            cg_floor: 0.1,
            cg_adapt: 0.1,
            max_cg_iter: 5000,
            ic_relaxation: 0.95,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Principal eigenpair with convergence diagnostics.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    /// Nonnegative, `Σ u₀² hⁿ = 1`.
    pub u0: ScalarField,
    /// `‖L u₀ − λ u₀‖∞ / (λ ‖u₀‖∞)` over interior cells.
    pub residual: f64,
    pub iterations: usize,
    pub cg_iterations: usize,
    pub residual_history: Vec<f64>,
    /// Interior cells that were strictly negative before taking `|u₀|`.
    pub negative_cells: usize,
}

impl EigenPair {
    /// True if the iterate had to be sign-corrected cellwise.
    pub fn sign_flagged(&self) -> bool {
        self.negative_cells > 0
    }
}

/// Smallest eigenpair of `op` via inverse power iteration with
/// preconditioned conjugate gradients.
pub fn principal_eigenpair(op: &MixedOperator, tol: f64, max_iter: usize) -> Result<EigenPair> {
    principal_eigenpair_with(
        op,
        &SolverOptions {
            tol,
            max_iter,
            ..SolverOptions::default()
        },
    )
}

pub fn principal_eigenpair_with(op: &MixedOperator, opts: &SolverOptions) -> Result<EigenPair> {
    if op.local_scale() <= 0.0 {
        return Err(Error::Indefinite(
            "local scale must be positive for the inverse iteration".into(),
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!("tolerance {} must be positive", opts.tol)));
    }
    let domain = op.domain_arc().clone();
    let n = op.size();
    let precond = IncompleteCholesky::new(op, opts.ic_relaxation);
    let start = distance_transform(&domain);
    let mut x = op.to_compact(&start)?;
    scale_unit(&mut x);

    let mut ax = vec![0.0; n];
    let mut history = Vec::new();
    let mut cg_total = 0usize;
    let mut theta;
    let mut residual;
    let mut iterations = 0usize;
    loop {
        op.apply_compact(&x, &mut ax)?;
        theta = dot(&x, &ax) / dot(&x, &x);
        residual = eigen_residual(&x, &ax, theta);
        history.push(residual);
        log::debug!("inverse iteration {iterations}: theta {theta:.12e} residual {residual:.3e}");
        if residual <= opts.tol {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual,
            });
        }
        let mut y: Vec<f64> = x.iter().map(|v| v / theta).collect();
        cg_total += pcg(
            op,
            &precond,
            &x,
            &mut y,
            (opts.cg_floor * opts.tol, opts.cg_adapt),
            opts.max_cg_iter,
        )?;
        scale_unit(&mut y);
        x = y;
        iterations += 1;
    }

    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let negative_cells = x.iter().filter(|&&v| v < 0.0).count();
    if negative_cells > 0 {
        log::warn!("{negative_cells} cells negative in the converged iterate");
    }
    let cell = domain.cell_measure();
    let norm = (x.iter().map(|v| v * v).sum::<f64>() * cell).sqrt();
    let values: Vec<f64> = x.iter().map(|v| v.abs() / norm).collect();
    let u0 = op.from_compact(&values)?;
    let u0 = ScalarField::new(Arc::clone(&domain), u0.into_values())?;
    Ok(EigenPair {
        lambda: theta,
        u0,
        residual,
        iterations,
        cg_iterations: cg_total,
        residual_history: history,
        negative_cells,
    })
}

/// Upper bound for the principal eigenvalue from any nonzero trial field.
pub fn rayleigh_upper_bound(op: &MixedOperator, trial: &ScalarField) -> Result<f64> {
    rayleigh_quotient(op, trial)
}

fn eigen_residual(x: &[f64], ax: &[f64], theta: f64) -> f64 {
    let mut rmax = 0.0f64;
    let mut xmax = 0.0f64;
    for (a, b) in x.iter().zip(ax) {
        rmax = rmax.max((b - theta * a).abs());
        xmax = xmax.max(a.abs());
    }
    rmax / (theta * xmax)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::mixedop::dot(a, b)
}

fn scale_unit(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

/// Solve `A y = b` from the initial guess in `y`; returns the iteration count.
/// `(rel_b, rel_r0)` are the stopping tolerances relative to `‖b‖` and to the
/// initial residual; the looser one applies.
fn pcg(
    op: &MixedOperator,
    m: &IncompleteCholesky,
    b: &[f64],
    y: &mut [f64],
    (rel_b, rel_r0): (f64, f64),
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let mut r = vec![0.0; n];
    op.apply_compact(y, &mut r)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let bnorm = dot(b, b).sqrt();
    let target = (rel_b * bnorm).max(rel_r0 * dot(&r, &r).sqrt());
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= target {
            return Ok(it);
        }
        op.apply_compact(&p, &mut ap)?;
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            y[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = dot(&r, &r).sqrt();
    if res <= 10.0 * target {
        log::warn!("inner solve stopped at {max_iter} iterations, residual {res:.3e}");
        return Ok(max_iter);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: res / bnorm,
    })
}
