use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Closed ball in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::Geometry(format!("ball radius {radius} must be positive")));
        }
        Ok(Self { center, radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.radius
    }

    /// Whether `p` lies in the ball up to an absolute slack `tol`.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        dist(self.center, p) <= self.radius + tol
    }
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<Vec<[f64; 2]>> for ConvexPolygon {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        ConvexPolygon::new(v)
    }
}

impl From<ConvexPolygon> for Vec<[f64; 2]> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl ConvexPolygon {
    /// Validate a CCW strictly convex vertex list.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices, need at least 3")));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if a == b {
                return Err(Error::InvalidPolygon(format!("repeated vertex {i}")));
            }
            if cross(a, b, c) <= 0.0 {
                return Err(Error::InvalidPolygon(format!(
                    "turn at vertex {} is not strictly counter-clockwise",
                    (i + 1) % n
                )));
            }
        }
        // Local convexity plus total turning of 2π rules out winding twice.
        let mut turning = 0.0;
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - b[0], c[1] - b[1]];
            turning += (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidPolygon("vertices wind more than once".into()));
        }
        Ok(Self { vertices })
    }

    /// Convex hull of a point cloud (collinear points dropped).
    pub fn hull(points: &[[f64; 2]]) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidPolygon("hull of fewer than 3 points".into()));
        }
        let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let seq: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
                Box::new(pts.iter())
            } else {
                Box::new(pts.iter().rev())
            };
            for &p in seq {
                while hull.len() >= start + 2
                    && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
                {
                    hull.pop();
                }
                hull.push(p);
            }
            hull.pop();
        }
        Self::new(hull)
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about `center`.
    pub fn regular(n: usize, r: f64, center: [f64; 2], phase: f64) -> Result<Self> {
        let v = (0..n)
            .map(|k| {
                let t = phase + 2.0 * PI * k as f64 / n as f64;
                [center[0] + r * t.cos(), center[1] + r * t.sin()]
            })
            .collect();
        Self::new(v)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut a = 0.0;
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| dist(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum()
    }

    /// Outward unit normals `a_i` and offsets `b_i` with `p ∈ P ⇔ a_i·p ≤ b_i`.
    pub fn half_planes(&self) -> Vec<([f64; 2], f64)> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let (ex, ey) = (q[0] - p[0], q[1] - p[1]);
                let len = ex.hypot(ey);
                let a = [ey / len, -ex / len];
                (a, a[0] * p[0] + a[1] * p[1])
            })
            .collect()
    }

    /// Signed slack `min_i (b_i - a_i·p)`: the distance to the boundary for
    /// interior points, negative outside.
    pub fn depth(&self, p: [f64; 2]) -> f64 {
        self.half_planes()
            .iter()
            .map(|(a, b)| b - a[0] * p[0] - a[1] * p[1])
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the ball lies in the polygon up to an absolute slack `tol`.
    pub fn contains_ball(&self, ball: &Ball, tol: f64) -> bool {
        self.depth(ball.center) >= ball.radius - tol
    }

    /// Largest distance from `p` to a vertex.
    pub fn max_vertex_distance(&self, p: [f64; 2]) -> f64 {
        self.vertices
            .iter()
            .map(|&v| dist(v, p))
            .fold(0.0, f64::max)
    }

    /// Vertex list as CSV with an `x,y` header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y"])?;
        for v in &self.vertices {
            wr.serialize((v[0], v[1]))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Random convex polygon: hull of `points` samples with radius in
/// `[1 - roughness, 1]` at uniform angles, stretched by a random aspect in
/// `[1, max_aspect]` and rotated.
pub fn random_convex_polygon<R: Rng>(
    rng: &mut R,
    points: usize,
    roughness: f64,
    max_aspect: f64,
) -> ConvexPolygon {
    loop {
        let aspect = rng.gen_range(1.0..=max_aspect.max(1.0));
        let rot = rng.gen_range(0.0..2.0 * PI);
        let (cs, sn) = (rot.cos(), rot.sin());
        let pts: Vec<[f64; 2]> = (0..points.max(3))
            .map(|_| {
                let t = rng.gen_range(0.0..2.0 * PI);
                let r = 1.0 - roughness * rng.gen::<f64>();
                let (x, y) = (aspect * r * t.cos(), r * t.sin());
                [cs * x - sn * y, sn * x + cs * y]
            })
            .collect();
        if let Ok(p) = ConvexPolygon::hull(&pts) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_hexagon() {
        let sq = ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(sq.area(), 1.0);
        assert_eq!(sq.perimeter(), 4.0);
        let hex = ConvexPolygon::regular(6, 1.0, [0.0; 2], 0.0).unwrap();
        assert!((hex.area() - 1.5 * 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inscribed_perimeter_from_below() {
        let p = ConvexPolygon::regular(64, 1.0, [0.0; 2], 0.0).unwrap();
        let exact = 128.0 * (PI / 64.0).sin();
        assert!((p.perimeter() - exact).abs() < 1e-13);
        assert!(p.perimeter() < 2.0 * PI);
    }

    #[test]
    fn rejects_clockwise_and_reflex() {
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [1.0, 1.0]]).is_err());
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn hull_drops_interior_points() {
        let h = ConvexPolygon::hull(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.2], [1.0, 1.0], [0.0, 1.0], [0.5, 0.0]])
            .unwrap();
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn csv_export() {
        let sq = ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let mut buf = Vec::new();
        sq.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x,y\n0.0,0.0\n"));
        assert_eq!(s.lines().count(), 5);
    }
}
