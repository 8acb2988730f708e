//! Discrete decreasing Schwarz symmetrization and energy comparisons.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use crate::gridcore::{GridDomain, ScalarField};
use crate::mixedop::{energy_forms, MixedOperator};
use crate::{Error, Result};

/// Radially decreasing rearrangement of a nonnegative field.
#[derive(Debug, Clone)]
pub struct RearrangedField {
    /// Ball (or interval) with as many cells as the source support.
    pub ball_domain: Arc<GridDomain>,
    pub values: ScalarField,
    /// Hash of the sorted bit patterns of the positive source values.
    pub value_multiset_checksum: u64,
}

/// Positive values sorted in decreasing order.
pub fn sorted_positive_values(u: &ScalarField) -> Vec<f64> {
    let mut v: Vec<f64> = u.values().iter().copied().filter(|&x| x > 0.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Order-independent checksum of the positive values of `u`.
pub fn multiset_checksum(u: &ScalarField) -> u64 {
    let mut hasher = DefaultHasher::new();
    for v in sorted_positive_values(u) {
        v.to_bits().hash(&mut hasher);
    }
    hasher.finish()
}

/// `(Σ u² hⁿ)^{1/2}` summed over the values in decreasing order, so two
/// equimeasurable fields give bit-identical results.
pub fn sorted_l2_norm(u: &ScalarField) -> f64 {
    let s: f64 = sorted_positive_values(u).iter().map(|v| v * v).sum();
    (s * u.domain().cell_measure()).sqrt()
}

/// Decreasing Schwarz rearrangement of `u` (which must be nonnegative).
///
/// The target ball is centered at the center of the source box and made of
/// the `K` cells closest to it, `K` being the number of positive source
/// cells; ties in distance are broken by cell order. In 1D the center sits
/// on a cell center when `K` is odd and on a cell corner otherwise, so the
/// target is always a single run of cells.
pub fn schwarz_rearrange(u: &ScalarField) -> Result<RearrangedField> {
    if let Some(v) = u.values().iter().find(|&&v| v < 0.0) {
        return Err(Error::InvalidField(format!(
            "rearrangement needs a nonnegative field, found {v}"
        )));
    }
    let values = sorted_positive_values(u);
    let k = values.len();
    if k == 0 {
        return Err(Error::EmptyDomain("field has no positive values".into()));
    }
    let src = u.domain();
    let h = src.spacing();
    let (snx, sny) = src.shape();
    let so = src.origin();
    let center = [so[0] + 0.5 * snx as f64 * h, so[1] + 0.5 * sny as f64 * h];

    let (shape, origin, cells) = if src.dim() == 1 {
        let margin = (k / 10).max(1);
        let nx = k + 2 * margin;
        let origin = [center[0] - 0.5 * nx as f64 * h, 0.0];
        let c = margin as f64 + 0.5 * k as f64;
        let mut order: Vec<usize> = (0..nx).collect();
        order.sort_by(|&a, &b| {
            let da = (a as f64 + 0.5 - c).abs();
            let db = (b as f64 + 0.5 - c).abs();
            da.total_cmp(&db).then(a.cmp(&b))
        });
        ((nx, 1), origin, order)
    } else {
        let radius = (k as f64 / std::f64::consts::PI).sqrt().ceil() as usize + 2;
        let margin = ((0.2 * radius as f64).ceil() as usize).max(1);
        let half = radius + margin;
        let n = 2 * half;
        let origin = [center[0] - half as f64 * h, center[1] - half as f64 * h];
        let mut order: Vec<(i64, usize)> = (0..n * n)
            .map(|i| {
                // Squared distance in half-cell units is an exact integer.
                let dx = 2 * (i % n) as i64 + 1 - n as i64;
                let dy = 2 * (i / n) as i64 + 1 - n as i64;
                (dx * dx + dy * dy, i)
            })
            .collect();
        order.sort_unstable();
        ((n, n), origin, order.into_iter().map(|(_, i)| i).collect())
    };
    let mut mask = vec![false; shape.0 * shape.1];
    let mut vals = vec![0.0; mask.len()];
    for (&cell, &v) in cells.iter().zip(&values) {
        mask[cell] = true;
        vals[cell] = v;
    }
    let ball = Arc::new(GridDomain::from_mask(src.dim(), h, shape, origin, mask)?);
    let field = ScalarField::new(ball.clone(), vals)?;
    Ok(RearrangedField {
        ball_domain: ball,
        values: field,
        value_multiset_checksum: multiset_checksum(u),
    })
}

impl RearrangedField {
    /// Exact equimeasurability against the source: identical sorted values.
    pub fn equimeasurable_with(&self, src: &ScalarField) -> bool {
        let a = sorted_positive_values(src);
        let b = sorted_positive_values(&self.values);
        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits())
    }
}

/// Energy comparison between a field and its rearrangement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyaSzegoReport {
    /// `Σ |∇_h u|² hⁿ` on the source domain.
    pub local_src: f64,
    pub local_ast: f64,
    /// Unscaled nonlocal form `D_s(u)`; zero when the source operator has no
    /// kernel.
    pub nonlocal_src: f64,
    pub nonlocal_ast: f64,
    /// Rayleigh quotients with the source operator's scales.
    pub rayleigh_src: f64,
    pub rayleigh_ast: f64,
    pub slack: f64,
    pub local_ok: bool,
    pub nonlocal_ok: bool,
    /// Single-cell support: comparisons skipped (ok flags false).
    pub degenerate: bool,
    pub equimeasurable: bool,
}

pub const DEFAULT_SLACK: f64 = 0.02;

/// Compare the energies of `u` and of its rearrangement, the latter on an
/// operator rebuilt on the ball with the same `s`, `h` and scales.
pub fn polya_szego_report(op_src: &MixedOperator, u: &ScalarField, slack: f64) -> Result<PolyaSzegoReport> {
    let rearranged = schwarz_rearrange(u)?;
    let k = rearranged.ball_domain.interior_count();
    let unit_src = op_src.with_scales(1.0, op_src.kernel().map_or(0.0, |_| 1.0))?;
    let unit_ball = match op_src.kernel() {
        Some(kern) => MixedOperator::new(rearranged.ball_domain.clone(), kern.s(), 1.0, 1.0)?,
        None => MixedOperator::laplacian(rearranged.ball_domain.clone())?,
    };
    let e_src = energy_forms(&unit_src, u, u)?;
    let e_ast = energy_forms(&unit_ball, &rearranged.values, &rearranged.values)?;
    let (ls, ns) = (op_src.local_scale(), op_src.nonlocal_scale());
    let norm2 = sorted_l2_norm(u).powi(2);
    let rayleigh_src = (ls * e_src.local + ns * e_src.nonlocal) / norm2;
    let rayleigh_ast = (ls * e_ast.local + ns * e_ast.nonlocal) / norm2;
    let degenerate = k <= 1;
    Ok(PolyaSzegoReport {
        local_src: e_src.local,
        local_ast: e_ast.local,
        nonlocal_src: e_src.nonlocal,
        nonlocal_ast: e_ast.nonlocal,
        rayleigh_src,
        rayleigh_ast,
        slack,
        local_ok: !degenerate && e_ast.local <= e_src.local * (1.0 + slack),
        nonlocal_ok: !degenerate && e_ast.nonlocal <= e_src.nonlocal * (1.0 + slack),
        degenerate,
        equimeasurable: rearranged.equimeasurable_with(u),
    })
}
