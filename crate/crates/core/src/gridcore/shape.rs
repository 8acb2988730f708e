use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Analytic description of a bounded open set in one or two dimensions.
///
/// Every variant answers a strict membership test for points; grid domains
/// are rasterized by testing cell centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeSpec {
    /// Open interval (a, b) of the real line.
    Interval { a: f64, b: f64 },
    /// Finite union of open intervals.
    Intervals { parts: Vec<[f64; 2]> },
    Disk {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    /// Axis-aligned ellipse with semi-axes `a` (x) and `b` (y).
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Axis-aligned rectangle of width `w` and height `ht`.
    Rectangle {
        w: f64,
        ht: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Points within `radius` of a horizontal segment of length `len`.
    Stadium {
        len: f64,
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Simple polygon (any orientation), even-odd membership.
    Polygon { vertices: Vec<[f64; 2]> },
    /// Star-shaped body `ρ < g(θ)` with `g` sampled at `θ_k = 2πk/K`,
    /// linearly interpolated and periodic.
    Radial {
        radii: Vec<f64>,
        #[serde(default)]
        center: [f64; 2],
    },
    /// `ρ < radius · (1 + amplitude · cos(mode · θ))`.
    PerturbedDisk {
        radius: f64,
        amplitude: f64,
        mode: u32,
        #[serde(default)]
        center: [f64; 2],
    },
}

/// A point on the boundary of a shape with its inward unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub point: [f64; 2],
    pub inward_normal: [f64; 2],
}

impl ShapeSpec {
    pub fn dim(&self) -> usize {
        match self {
            ShapeSpec::Interval { .. } | ShapeSpec::Intervals { .. } => 1,
            _ => 2,
        }
    }

    /// Check that the parameters describe a bounded open set of positive measure.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidShape(msg));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ShapeSpec::Interval { a, b } => {
                if !finite(&[*a, *b]) || b <= a {
                    return bad(format!("interval ({a}, {b}) is empty"));
                }
            }
            ShapeSpec::Intervals { parts } => {
                if parts.is_empty() {
                    return bad("union of intervals has no parts".into());
                }
                let mut sorted = parts.clone();
                sorted.sort_by(|p, q| p[0].total_cmp(&q[0]));
                for p in &sorted {
                    if !finite(p) || p[1] <= p[0] {
                        return bad(format!("interval ({}, {}) is empty", p[0], p[1]));
                    }
                }
                for w in sorted.windows(2) {
                    if w[1][0] < w[0][1] {
                        return bad("intervals overlap".into());
                    }
                }
            }
            ShapeSpec::Disk { center, radius } => {
                if !finite(center) || !(radius.is_finite() && *radius > 0.0) {
                    return bad(format!("disk radius {radius} must be positive"));
                }
            }
            ShapeSpec::Ellipse { a, b, center } => {
                if !finite(center) || !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) {
                    return bad(format!("ellipse semi-axes ({a}, {b}) must be positive"));
                }
            }
            ShapeSpec::Rectangle { w, ht, center } => {
                if !finite(center) || !(*w > 0.0 && *ht > 0.0 && w.is_finite() && ht.is_finite())
                {
                    return bad(format!("rectangle {w} x {ht} must have positive sides"));
                }
            }
            ShapeSpec::Stadium {
                len,
                radius,
                center,
            } => {
                if !finite(center) || !(*len >= 0.0 && *radius > 0.0) || !len.is_finite() {
                    return bad(format!("stadium len {len} radius {radius} invalid"));
                }
            }
            ShapeSpec::Polygon { vertices } => {
                if vertices.len() < 3 || vertices.iter().any(|v| !finite(v)) {
                    return bad("polygon needs at least 3 finite vertices".into());
                }
                if signed_area(vertices).abs() <= f64::EPSILON {
                    return bad("polygon has zero area".into());
                }
                if !is_simple(vertices) {
                    return bad("polygon is not simple".into());
                }
            }
            ShapeSpec::Radial { radii, center } => {
                if radii.len() < 3 || !finite(center) {
                    return bad("radial body needs at least 3 samples".into());
                }
                if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return bad("radial samples must be positive".into());
                }
            }
            ShapeSpec::PerturbedDisk {
                radius,
                amplitude,
                center,
                ..
            } => {
                if !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                    return bad(format!("perturbed disk radius {radius} must be positive"));
                }
                if !(amplitude.abs() < 1.0) {
                    return bad(format!("perturbation amplitude {amplitude} must be < 1"));
                }
            }
        }
        Ok(())
    }

    /// Strict membership test. 1D shapes read only `p[0]`.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            ShapeSpec::Interval { a, b } => *a < p[0] && p[0] < *b,
            ShapeSpec::Intervals { parts } => parts.iter().any(|q| q[0] < p[0] && p[0] < q[1]),
            ShapeSpec::Disk { center, radius } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                dx * dx + dy * dy < radius * radius
            }
            ShapeSpec::Ellipse { a, b, center } => {
                let (x, y) = ((p[0] - center[0]) / a, (p[1] - center[1]) / b);
                x * x + y * y < 1.0
            }
            ShapeSpec::Rectangle { w, ht, center } => {
                (p[0] - center[0]).abs() < 0.5 * w && (p[1] - center[1]).abs() < 0.5 * ht
            }
            ShapeSpec::Stadium {
                len,
                radius,
                center,
            } => {
                let x = (p[0] - center[0]).abs() - 0.5 * len;
                let dx = x.max(0.0);
                let dy = p[1] - center[1];
                dx * dx + dy * dy < radius * radius
            }
            ShapeSpec::Polygon { vertices } => point_in_polygon(vertices, p),
            ShapeSpec::Radial { radii, center } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let rho = dx.hypot(dy);
                rho < interpolate_periodic(radii, dy.atan2(dx))
            }
            ShapeSpec::PerturbedDisk {
                radius,
                amplitude,
                mode,
                center,
            } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let theta = dy.atan2(dx);
                dx.hypot(dy) < radius * (1.0 + amplitude * (*mode as f64 * theta).cos())
            }
        }
    }

    /// Axis-aligned bounds `(lo, hi)`; the second axis is zero for 1D shapes.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            ShapeSpec::Interval { a, b } => ([*a, 0.0], [*b, 0.0]),
            ShapeSpec::Intervals { parts } => {
                let lo = parts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = parts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
                ([lo, 0.0], [hi, 0.0])
            }
            ShapeSpec::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            ShapeSpec::Ellipse { a, b, center } => (
                [center[0] - a, center[1] - b],
                [center[0] + a, center[1] + b],
            ),
            ShapeSpec::Rectangle { w, ht, center } => (
                [center[0] - 0.5 * w, center[1] - 0.5 * ht],
                [center[0] + 0.5 * w, center[1] + 0.5 * ht],
            ),
            ShapeSpec::Stadium {
                len,
                radius,
                center,
            } => (
                [center[0] - 0.5 * len - radius, center[1] - radius],
                [center[0] + 0.5 * len + radius, center[1] + radius],
            ),
            ShapeSpec::Polygon { vertices } => bounds_of(vertices),
            ShapeSpec::Radial { .. } | ShapeSpec::PerturbedDisk { .. } => {
                bounds_of(&self.boundary_curve(4096))
            }
        }
    }

    /// Diameter of the shape (exact for the elementary shapes, vertex-based
    /// for polygons and sampled curves).
    pub fn diameter(&self) -> f64 {
        match self {
            ShapeSpec::Interval { a, b } => b - a,
            ShapeSpec::Intervals { .. } => {
                let (lo, hi) = self.bounds();
                hi[0] - lo[0]
            }
            ShapeSpec::Disk { radius, .. } => 2.0 * radius,
            ShapeSpec::Ellipse { a, b, .. } => 2.0 * a.max(*b),
            ShapeSpec::Rectangle { w, ht, .. } => w.hypot(*ht),
            ShapeSpec::Stadium { len, radius, .. } => len + 2.0 * radius,
            ShapeSpec::Polygon { vertices } => max_pairwise_distance(vertices),
            ShapeSpec::Radial { .. } | ShapeSpec::PerturbedDisk { .. } => {
                max_pairwise_distance(&self.boundary_curve(720))
            }
        }
    }

    /// Closed-form measure when available.
    pub fn analytic_area(&self) -> Option<f64> {
        match self {
            ShapeSpec::Interval { a, b } => Some(b - a),
            ShapeSpec::Intervals { parts } => Some(parts.iter().map(|p| p[1] - p[0]).sum()),
            ShapeSpec::Disk { radius, .. } => Some(PI * radius * radius),
            ShapeSpec::Ellipse { a, b, .. } => Some(PI * a * b),
            ShapeSpec::Rectangle { w, ht, .. } => Some(w * ht),
            ShapeSpec::Stadium { len, radius, .. } => Some(2.0 * len * radius + PI * radius * radius),
            ShapeSpec::Polygon { vertices } => Some(signed_area(vertices).abs()),
            ShapeSpec::PerturbedDisk {
                radius, amplitude, ..
            } => Some(PI * radius * radius * (1.0 + 0.5 * amplitude * amplitude)),
            ShapeSpec::Radial { .. } => None,
        }
    }

    /// The image of the shape under `x ↦ t·x` (centers scale too).
    pub fn scaled(&self, t: f64) -> ShapeSpec {
        let sc = |c: &[f64; 2]| [c[0] * t, c[1] * t];
        match self {
            ShapeSpec::Interval { a, b } => ShapeSpec::Interval { a: a * t, b: b * t },
            ShapeSpec::Intervals { parts } => ShapeSpec::Intervals {
                parts: parts.iter().map(|p| [p[0] * t, p[1] * t]).collect(),
            },
            ShapeSpec::Disk { center, radius } => ShapeSpec::Disk {
                center: sc(center),
                radius: radius * t,
            },
            ShapeSpec::Ellipse { a, b, center } => ShapeSpec::Ellipse {
                a: a * t,
                b: b * t,
                center: sc(center),
            },
            ShapeSpec::Rectangle { w, ht, center } => ShapeSpec::Rectangle {
                w: w * t,
                ht: ht * t,
                center: sc(center),
            },
            ShapeSpec::Stadium {
                len,
                radius,
                center,
            } => ShapeSpec::Stadium {
                len: len * t,
                radius: radius * t,
                center: sc(center),
            },
            ShapeSpec::Polygon { vertices } => ShapeSpec::Polygon {
                vertices: vertices.iter().map(sc).collect(),
            },
            ShapeSpec::Radial { radii, center } => ShapeSpec::Radial {
                radii: radii.iter().map(|r| r * t).collect(),
                center: sc(center),
            },
            ShapeSpec::PerturbedDisk {
                radius,
                amplitude,
                mode,
                center,
            } => ShapeSpec::PerturbedDisk {
                radius: radius * t,
                amplitude: *amplitude,
                mode: *mode,
                center: sc(center),
            },
        }
    }

    /// Counter-clockwise samples of the boundary curve (2D shapes).
    ///
    /// Polygons return their vertices; 1D shapes return the endpoints.
    pub fn boundary_curve(&self, n: usize) -> Vec<[f64; 2]> {
        let n = n.max(3);
        let angle = |k: usize| 2.0 * PI * k as f64 / n as f64;
        match self {
            ShapeSpec::Interval { a, b } => vec![[*a, 0.0], [*b, 0.0]],
            ShapeSpec::Intervals { parts } => {
                parts.iter().flat_map(|p| [[p[0], 0.0], [p[1], 0.0]]).collect()
            }
            ShapeSpec::Disk { center, radius } => (0..n)
                .map(|k| {
                    let t = angle(k);
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect(),
            ShapeSpec::Ellipse { a, b, center } => (0..n)
                .map(|k| {
                    let t = angle(k);
                    [center[0] + a * t.cos(), center[1] + b * t.sin()]
                })
                .collect(),
            ShapeSpec::Rectangle { w, ht, center } => {
                let (hx, hy) = (0.5 * w, 0.5 * ht);
                vec![
                    [center[0] - hx, center[1] - hy],
                    [center[0] + hx, center[1] - hy],
                    [center[0] + hx, center[1] + hy],
                    [center[0] - hx, center[1] + hy],
                ]
            }
            ShapeSpec::Stadium {
                len,
                radius,
                center,
            } => {
                let half = n / 2;
                let mut pts = Vec::with_capacity(2 * half + 2);
                for k in 0..=half {
                    let t = -0.5 * PI + PI * k as f64 / half as f64;
                    pts.push([
                        center[0] + 0.5 * len + radius * t.cos(),
                        center[1] + radius * t.sin(),
                    ]);
                }
                for k in 0..=half {
                    let t = 0.5 * PI + PI * k as f64 / half as f64;
                    pts.push([
                        center[0] - 0.5 * len + radius * t.cos(),
                        center[1] + radius * t.sin(),
                    ]);
                }
                pts
            }
            ShapeSpec::Polygon { vertices } => {
                if signed_area(vertices) >= 0.0 {
                    vertices.clone()
                } else {
                    vertices.iter().rev().copied().collect()
                }
            }
            ShapeSpec::Radial { radii, center } => (0..n)
                .map(|k| {
                    let t = angle(k);
                    let r = interpolate_periodic(radii, t);
                    [center[0] + r * t.cos(), center[1] + r * t.sin()]
                })
                .collect(),
            ShapeSpec::PerturbedDisk {
                radius,
                amplitude,
                mode,
                center,
            } => (0..n)
                .map(|k| {
                    let t = angle(k);
                    let r = radius * (1.0 + amplitude * (*mode as f64 * t).cos());
                    [center[0] + r * t.cos(), center[1] + r * t.sin()]
                })
                .collect(),
        }
    }

    /// `n` boundary points with inward unit normals, avoiding corners.
    pub fn boundary_points(&self, n: usize) -> Vec<BoundaryPoint> {
        let n = n.max(1);
        match self {
            ShapeSpec::Interval { a, b } => vec![
                BoundaryPoint {
                    point: [*a, 0.0],
                    inward_normal: [1.0, 0.0],
                },
                BoundaryPoint {
                    point: [*b, 0.0],
                    inward_normal: [-1.0, 0.0],
                },
            ],
            ShapeSpec::Intervals { parts } => parts
                .iter()
                .flat_map(|p| {
                    [
                        BoundaryPoint {
                            point: [p[0], 0.0],
                            inward_normal: [1.0, 0.0],
                        },
                        BoundaryPoint {
                            point: [p[1], 0.0],
                            inward_normal: [-1.0, 0.0],
                        },
                    ]
                })
                .collect(),
            ShapeSpec::Disk { center, radius } => (0..n)
                .map(|k| {
                    let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                    BoundaryPoint {
                        point: [center[0] + radius * t.cos(), center[1] + radius * t.sin()],
                        inward_normal: [-t.cos(), -t.sin()],
                    }
                })
                .collect(),
            ShapeSpec::Ellipse { a, b, center } => (0..n)
                .map(|k| {
                    let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                    let (nx, ny) = (-t.cos() / a, -t.sin() / b);
                    let norm = nx.hypot(ny);
                    BoundaryPoint {
                        point: [center[0] + a * t.cos(), center[1] + b * t.sin()],
                        inward_normal: [nx / norm, ny / norm],
                    }
                })
                .collect(),
            _ => {
                // Generic path: walk the closed boundary polyline by arclength
                // and place samples at the middles of equal-length pieces.
                let curve = self.boundary_curve(4096);
                polyline_samples(&curve, n)
            }
        }
    }
}

fn polyline_samples(curve: &[[f64; 2]], n: usize) -> Vec<BoundaryPoint> {
    let m = curve.len();
    let seg_len: Vec<f64> = (0..m)
        .map(|i| {
            let (p, q) = (curve[i], curve[(i + 1) % m]);
            (q[0] - p[0]).hypot(q[1] - p[1])
        })
        .collect();
    let total: f64 = seg_len.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    let mut acc = 0.0;
    for k in 0..n {
        let target = total * (k as f64 + 0.5) / n as f64;
        while acc + seg_len[seg] < target && seg + 1 < m {
            acc += seg_len[seg];
            seg += 1;
        }
        let (p, q) = (curve[seg], curve[(seg + 1) % m]);
        let s = ((target - acc) / seg_len[seg]).clamp(0.0, 1.0);
        let (tx, ty) = ((q[0] - p[0]) / seg_len[seg], (q[1] - p[1]) / seg_len[seg]);
        out.push(BoundaryPoint {
            point: [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])],
            // CCW curve: interior on the left.
            inward_normal: [-ty, tx],
        });
    }
    out
}

fn interpolate_periodic(samples: &[f64], theta: f64) -> f64 {
    let k = samples.len();
    let mut u = theta.rem_euclid(2.0 * PI) / (2.0 * PI) * k as f64;
    if u >= k as f64 {
        u -= k as f64;
    }
    let i = u.floor() as usize % k;
    let frac = u - u.floor();
    samples[i] * (1.0 - frac) + samples[(i + 1) % k] * frac
}

pub(crate) fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    let mut a = 0.0;
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

fn point_in_polygon(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn is_simple(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let proper = |a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]| {
        let d1 = cross(c, d, a);
        let d2 = cross(c, d, b);
        let d3 = cross(a, b, c);
        let d4 = cross(a, b, d);
        (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0
    };
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if proper(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn bounds_of(v: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in v {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

fn max_pairwise_distance(v: &[[f64; 2]]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in v.iter().enumerate() {
        for q in &v[i + 1..] {
            best = best.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
    }
    best
}
