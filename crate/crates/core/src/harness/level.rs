use std::f64::consts::PI;

use serde::Serialize;

use crate::gridcore::{contour_length, perimeter_estimate, superlevel_set, ScalarField};
use crate::{Error, Result};

/// One level of a [`LevelProfile`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub t: f64,
    /// `|{u > t}|`.
    pub volume: f64,
    /// `perimeter_estimate` of the superlevel domain.
    pub perimeter: f64,
    /// Length of the `{u = t}` contour of the field itself.
    pub contour: f64,
    /// `-d|Ω_t|/dt` by central differences over `t ± Δt/2`.
    pub psi: f64,
    /// Perimeter of the ball with volume `|Ω_t|`.
    pub gamma_star: f64,
    /// `ψ̂` too small to divide by; row left out of `step1_value`.
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfile {
    pub rows: Vec<LevelRow>,
    /// `sup u`.
    pub t_max: f64,
    pub dt: f64,
}

/// Perimeter of the `n`-ball of volume `v`: `n |B₁|^{1/n} v^{1-1/n}`.
pub fn ball_perimeter(dim: usize, v: f64) -> f64 {
    match dim {
        1 => 2.0,
        _ => 2.0 * PI.sqrt() * v.max(0.0).sqrt(),
    }
}

/// Level-set profile of a nonnegative field on the `levels` midpoint levels
/// `t_k = (k + 1/2) T / levels` of `[0, T)`, `T = sup u`.
pub fn level_profile(u: &ScalarField, levels: usize) -> Result<LevelProfile> {
    if levels < 2 {
        return Err(Error::InvalidField("at least two levels are required".into()));
    }
    let t_max = u.max();
    if !(t_max > 0.0) {
        return Err(Error::InvalidField("field has no positive values".into()));
    }
    let d = u.domain();
    let cell = d.cell_measure();
    let dt = t_max / levels as f64;
    let vol = |t: f64| -> f64 {
        let count = d
            .mask()
            .iter()
            .zip(u.values())
            .filter(|&(&m, &v)| m && v > t)
            .count();
        count as f64 * cell
    };
    // Volumes at the level edges k·Δt; the last edge is T, where the set is empty.
    let edges: Vec<f64> = (0..=levels).map(|k| vol(k as f64 * dt)).collect();
    let floor = 1e-9 * edges[0] / t_max;
    let mut rows = Vec::with_capacity(levels);
    for k in 0..levels {
        let t = (k as f64 + 0.5) * dt;
        let psi = (edges[k] - edges[k + 1]) / dt;
        let v = vol(t);
        let perimeter = match superlevel_set(u, t)? {
            Some(sub) => perimeter_estimate(&sub),
            None => 0.0,
        };
        rows.push(LevelRow {
            t,
            volume: v,
            perimeter,
            contour: contour_length(u, t),
            psi,
            gamma_star: ball_perimeter(d.dim(), v),
            skipped: !(psi > floor),
        });
    }
    Ok(LevelProfile { rows, t_max, dt })
}

impl LevelProfile {
    /// `Σ [P(Γ(t))² - P(Γ*(t))²] Δt / ψ̂(t)` over the rows that are not
    /// skipped, with `P(Γ(t))` the field contour length.
    pub fn step1_value(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| !r.skipped)
            .map(|r| (r.contour * r.contour - r.gamma_star * r.gamma_star) * self.dt / r.psi)
            .sum()
    }

    pub fn skipped(&self) -> usize {
        self.rows.iter().filter(|r| r.skipped).count()
    }

    pub fn volume_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].volume <= w[0].volume)
    }
}
