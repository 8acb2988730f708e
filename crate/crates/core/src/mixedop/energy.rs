use crate::gridcore::ScalarField;
use crate::mixedop::MixedOperator;
use crate::{par, Error, Result};

/// Scaled energy contributions of a pair of fields.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct EnergyForms {
    pub local: f64,
    pub nonlocal: f64,
    pub total: f64,
}

/// Bilinear forms `(local, nonlocal, total)` of `u` and `v`.
///
/// The local form sums forward differences across interior faces and
/// half-cell differences across boundary faces; the
/// nonlocal one sums weighted difference products over interior pairs plus
/// the interaction with the exterior and the analytic tail. Both are scaled
/// by the operator's scales, so `total = ⟨apply_mixed(u), v⟩ hⁿ`.
/// Per-cell partials are reduced sequentially in cell order.
pub fn energy_forms(op: &MixedOperator, u: &ScalarField, v: &ScalarField) -> Result<EnergyForms> {
    let x = op.to_compact(u)?;
    let y = op.to_compact(v)?;
    let d = op.domain();
    let cell = d.cell_measure();
    let h2 = d.spacing().powi(2);
    let nb = op.neighbours();
    let dim = d.dim();
    let local_parts = par::map_indexed(x.len(), |k| {
        let mut acc = 0.0;
        for (slot, &j) in nb[k][..2 * dim].iter().enumerate() {
            if j == u32::MAX {
                // Half-cell difference to the zero value on the face.
                acc += 2.0 * x[k] * y[k];
            } else if slot % 2 == 1 {
                let j = j as usize;
                acc += (x[j] - x[k]) * (y[j] - y[k]);
            }
        }
        acc
    });
    let local: f64 = local_parts.iter().sum::<f64>() * cell / h2;

    let nonlocal = match op.kernel() {
        Some(k) if op.nonlocal_scale() > 0.0 => {
            let m = k.half_width() as i64;
            let total_w = k.weight_sum();
            let tau = k.tail_coeff();
            let coords = op.cell_coords();
            let runs = op.runs();
            let parts = par::map_indexed(x.len(), |i| {
                let (ix, iy) = coords[i];
                let (ix, iy) = (ix as i64, iy as i64);
                let (ux, vx) = (x[i], y[i]);
                let mut pair = 0.0;
                let mut inside = 0.0;
                for r in runs {
                    let row = k.row(r.iy as i64 - iy);
                    let start = (r.ix0 as i64 - ix + m) as usize;
                    let w = &row[start..start + r.len];
                    let us = &x[r.offset..r.offset + r.len];
                    let vs = &y[r.offset..r.offset + r.len];
                    for t in 0..r.len {
                        pair += w[t] * (ux - us[t]) * (vx - vs[t]);
                        inside += w[t];
                    }
                }
                0.5 * pair + ux * vx * ((total_w - inside) + tau)
            });
            parts.iter().sum::<f64>() * cell
        }
        _ => 0.0,
    };
    let local = op.local_scale() * local;
    let nonlocal = op.nonlocal_scale() * nonlocal;
    Ok(EnergyForms {
        local,
        nonlocal,
        total: local + nonlocal,
    })
}

/// `⟨L u, u⟩ / Σ u² hⁿ`, evaluated through the operator application.
pub fn rayleigh_quotient(op: &MixedOperator, u: &ScalarField) -> Result<f64> {
    let x = op.to_compact(u)?;
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(Error::InvalidField("Rayleigh quotient of the zero field".into()));
    }
    let mut y = vec![0.0; x.len()];
    op.apply_compact(&x, &mut y)?;
    let num: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    Ok(num / norm2)
}
