use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::convexgeom::ConvexPolygon;
use crate::gridcore::ShapeSpec;
use crate::quadrature::integrate;
use crate::{Error, Result};

/// Default number of vertices on the polygonized arc.
pub const DEFAULT_ARC_VERTICES: usize = 2048;

/// Hull of the unit disk and the point `(0, 1 + δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullCounterexample {
    /// Circumscribed polygonization: every arc edge is tangent to the unit
    /// circle, so the unit disk stays inside.
    pub polygon: ConvexPolygon,
    pub delta: f64,
    /// Tangent length `√(2δ + δ²)`.
    pub pt: f64,
    /// Exact `|H \ B₁| = PT - arccos(1/(1+δ))`.
    pub added_area: f64,
    /// `polygon.area() - π - added_area`.
    pub polygonization_error: f64,
}

pub fn hull_counterexample(delta: f64) -> Result<HullCounterexample> {
    hull_counterexample_with(delta, DEFAULT_ARC_VERTICES)
}

pub fn hull_counterexample_with(delta: f64, arc_vertices: usize) -> Result<HullCounterexample> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Geometry(format!("delta {delta} must lie in (0, 1)")));
    }
    let alpha = (1.0 / (1.0 + delta)).acos();
    let pt = (2.0 * delta + delta * delta).sqrt();
    let added_area = pt - alpha;
    // Tangent directions from φ₀ = π/2 + α to φ_k = 5π/2 - α, CCW.
    let k = arc_vertices.max(2);
    let span = 2.0 * PI - 2.0 * alpha;
    let step = span / k as f64;
    let rv = 1.0 / (0.5 * step).cos();
    if rv >= 1.0 + delta {
        return Err(Error::Geometry(format!(
            "arc resolution {arc_vertices} too coarse for delta {delta}"
        )));
    }
    let mut vertices = Vec::with_capacity(k + 1);
    vertices.push([0.0, 1.0 + delta]);
    for j in 0..k {
        let phi = 0.5 * PI + alpha + (j as f64 + 0.5) * step;
        vertices.push([rv * phi.cos(), rv * phi.sin()]);
    }
    let polygon = ConvexPolygon::new(vertices)?;
    let polygonization_error = polygon.area() - PI - added_area;
    Ok(HullCounterexample {
        polygon,
        delta,
        pt,
        added_area,
        polygonization_error,
    })
}

/// Reference bump `f(x) = exp(1 - 1/(1 - x²))` on `(-1, 1)`, zero outside;
/// `f(0) = 1`, values in `[0, 1]`.
pub fn bump(x: f64) -> f64 {
    let q = 1.0 - x * x;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// `f'(x) = -2x f / q²` with `q = 1 - x²`.
pub fn bump_d1(x: f64) -> f64 {
    let q = 1.0 - x * x;
    if q <= 0.0 {
        0.0
    } else {
        -2.0 * x * bump(x) / (q * q)
    }
}

/// `f''(x) = f (4x²/q⁴ - 2/q² - 8x²/q³)`.
pub fn bump_d2(x: f64) -> f64 {
    let q = 1.0 - x * x;
    if q <= 0.0 {
        0.0
    } else {
        let x2 = x * x;
        bump(x) * (4.0 * x2 / q.powi(4) - 2.0 / (q * q) - 8.0 * x2 / q.powi(3))
    }
}

/// `‖f‖_{C²} = sup|f| + sup|f'| + sup|f''|`, sampled on a fine grid.
pub fn bump_c2_norm() -> f64 {
    let n = 200_000;
    let (mut s0, mut s1, mut s2) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..=n {
        let x = -1.0 + 2.0 * i as f64 / n as f64;
        s0 = s0.max(bump(x).abs());
        s1 = s1.max(bump_d1(x).abs());
        s2 = s2.max(bump_d2(x).abs());
    }
    s0 + s1 + s2
}

/// Star-shaped body `ρ < g(θ) = 1 + cδ f(θ/√δ)`, `θ ∈ (-π, π]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialBody {
    pub delta: f64,
    /// `1 / (4 (1 + ‖f‖_{C²}))`.
    pub c: f64,
    pub f_c2_norm: f64,
    /// Dense samples `(θ, g(θ))` at `θ_k = -π + 2πk/K`.
    pub samples: Vec<(f64, f64)>,
}

pub fn bump_counterexample(delta: f64, samples: usize) -> Result<RadialBody> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::Geometry(format!("delta {delta} must lie in (0, 1/4)")));
    }
    if samples < 8 {
        return Err(Error::Geometry("need at least 8 samples".into()));
    }
    let norm = bump_c2_norm();
    let mut body = RadialBody {
        delta,
        c: 1.0 / (4.0 * (1.0 + norm)),
        f_c2_norm: norm,
        samples: Vec::new(),
    };
    body.samples = (0..samples)
        .map(|k| {
            let t = -PI + 2.0 * PI * k as f64 / samples as f64;
            (t, body.g(t))
        })
        .collect();
    Ok(body)
}

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

impl RadialBody {
    /// A plain radial body `g ≡ 1 + cδ f` with explicit `c`, for tests.
    pub fn with_constant(delta: f64, c: f64) -> Self {
        Self {
            delta,
            c,
            f_c2_norm: f64::NAN,
            samples: Vec::new(),
        }
    }

    pub fn g(&self, theta: f64) -> f64 {
        let sd = self.delta.sqrt();
        1.0 + self.c * self.delta * bump(wrap(theta) / sd)
    }

    pub fn dg(&self, theta: f64) -> f64 {
        let sd = self.delta.sqrt();
        self.c * sd * bump_d1(wrap(theta) / sd)
    }

    pub fn ddg(&self, theta: f64) -> f64 {
        let sd = self.delta.sqrt();
        self.c * bump_d2(wrap(theta) / sd)
    }

    /// Curvature of the boundary with analytic derivatives.
    pub fn curvature(&self, theta: f64) -> f64 {
        polar_curvature(self.g(theta), self.dg(theta), self.ddg(theta))
    }

    /// `|Ω \ B₁| = ∫ (g² - 1)/2 dθ` over the bump support.
    pub fn area_excess(&self) -> f64 {
        let sd = self.delta.sqrt();
        integrate(|t| 0.5 * (self.g(t).powi(2) - 1.0), -sd, sd, 64, 10)
    }

    /// Raster description using the dense samples, reordered to start at 0.
    pub fn to_shape(&self) -> ShapeSpec {
        let k = self.samples.len();
        let radii = (0..k)
            .map(|i| self.g(2.0 * PI * i as f64 / k as f64))
            .collect();
        ShapeSpec::Radial {
            radii,
            center: [0.0; 2],
        }
    }

    pub fn polygon(&self) -> Result<ConvexPolygon> {
        let v = self
            .samples
            .iter()
            .map(|&(t, g)| [g * t.cos(), g * t.sin()])
            .collect();
        ConvexPolygon::new(v)
    }

    /// `theta,g` CSV of the samples.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["theta", "g"])?;
        for s in &self.samples {
            wr.serialize(s)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Curvature of `ρ = g(θ)`: `(2ġ² - g g̈ + g²) / (ġ² + g²)^{3/2}`.
pub fn polar_curvature(g: f64, dg: f64, ddg: f64) -> f64 {
    (2.0 * dg * dg - g * ddg + g * g) / (dg * dg + g * g).powf(1.5)
}
