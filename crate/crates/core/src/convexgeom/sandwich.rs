use serde::Serialize;

use crate::convexgeom::{Ball, ConvexPolygon};
use crate::{Error, Result};

/// Concentric inner/outer balls around a convex polygon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichCertificate {
    pub inner: Ball,
    pub outer: Ball,
    /// Farthest vertex distance minus the inner radius.
    pub delta: f64,
    /// `1 - |inner| / |Ω|`.
    pub eps_in: f64,
    /// `1 - |Ω| / |outer|`.
    pub outer_defect: f64,
    /// Base radius of the cone over the farthest point,
    /// `r = δR / √((R+δ)² - R²)`.
    pub cone_r: f64,
    /// Area of that cone (a triangle of base `2r` and height `δ`), a lower
    /// bound for `|Ω \ inner|`.
    pub cone_volume_bound: f64,
    /// `|Ω \ inner| = |Ω| - |inner|`.
    pub excess_area: f64,
    pub cone_ok: bool,
}

/// Build the sandwich certificate for `inner ⊆ p`.
pub fn ball_sandwich(p: &ConvexPolygon, inner: &Ball) -> Result<SandwichCertificate> {
    let scale = p.max_vertex_distance(inner.center).max(inner.radius);
    let tol = 1e-12 * scale;
    if !p.contains_ball(inner, tol) {
        return Err(Error::Geometry(format!(
            "inner ball (radius {}) is not contained in the polygon (depth {})",
            inner.radius,
            p.depth(inner.center)
        )));
    }
    let far = p.max_vertex_distance(inner.center);
    let delta = (far - inner.radius).max(0.0);
    let big_r = inner.radius;
    let outer = Ball {
        center: inner.center,
        radius: big_r + delta,
    };
    let area = p.area();
    let cone_r = if delta == 0.0 {
        0.0
    } else {
        delta * big_r / (2.0 * big_r * delta + delta * delta).sqrt()
    };
    let cone_volume_bound = cone_r * delta;
    let excess_area = area - inner.area();
    Ok(SandwichCertificate {
        inner: *inner,
        outer,
        delta,
        eps_in: 1.0 - inner.area() / area,
        outer_defect: 1.0 - area / outer.area(),
        cone_r,
        cone_volume_bound,
        excess_area,
        cone_ok: excess_area >= cone_volume_bound - tol * scale,
    })
}

/// Both sides of the planar Bonnesen-type inequality,
/// `(L/2πρ)² - A/πρ² ≥ (L/2πρ - 1)²`.
pub fn bonnesen_deficit(p: &ConvexPolygon, inball: &Ball) -> (f64, f64) {
    let q = p.perimeter() / inball.perimeter();
    let lhs = q * q - p.area() / inball.area();
    let rhs = (q - 1.0) * (q - 1.0);
    (lhs, rhs)
}

/// Worst ratio `outer_defect / eps_in^{2/3}` over certificates with
/// `eps_in ≤ eps_hat`, for each threshold; `None` when no certificate
/// qualifies. Returns `(eps_hat, count, ratio)`.
pub fn sandwich_constant_scan(
    certs: &[SandwichCertificate],
    eps_hats: &[f64],
) -> Vec<(f64, usize, Option<f64>)> {
    eps_hats
        .iter()
        .map(|&e| {
            let sel: Vec<f64> = certs
                .iter()
                .filter(|c| c.eps_in > 0.0 && c.eps_in <= e)
                .map(|c| c.outer_defect / c.eps_in.powf(2.0 / 3.0))
                .collect();
            let worst = sel.iter().copied().fold(None, |m: Option<f64>, v| {
                Some(m.map_or(v, |m| m.max(v)))
            });
            (e, sel.len(), worst)
        })
        .collect()
}
