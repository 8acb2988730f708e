use crate::gridcore::{GridDomain, ScalarField};
use crate::{Error, Result};

/// `(#interior cells) · h^n`.
pub fn volume(d: &GridDomain) -> f64 {
    d.interior_count() as f64 * d.cell_measure()
}

/// Boundary measure of the domain.
///
/// In 2D the indicator is passed once through the separable 3×3 filter
/// `[1, 3, 1] / 5` and the 0.5 level is traced with marching squares; in 1D the number of interface
/// points is returned.
pub fn perimeter_estimate(d: &GridDomain) -> f64 {
    let (nx, ny) = d.shape();
    let mask = d.mask();
    if d.dim() == 1 {
        let mut count = 0usize;
        let mut prev = false;
        for &m in mask.iter().chain(std::iter::once(&false)) {
            if m != prev {
                count += 1;
            }
            prev = m;
        }
        return count as f64;
    }
    let ind = |ix: i64, iy: i64| -> f64 {
        if ix < 0 || iy < 0 || ix >= nx as i64 || iy >= ny as i64 {
            0.0
        } else if mask[iy as usize * nx + ix as usize] {
            1.0
        } else {
            0.0
        }
    };
    const W: [f64; 3] = [1.0, 3.0, 1.0];
    let mut smooth = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let mut acc = 0.0;
            for (dy, wy) in W.iter().enumerate() {
                for (dx, wx) in W.iter().enumerate() {
                    acc += wx * wy * ind(ix as i64 + dx as i64 - 1, iy as i64 + dy as i64 - 1);
                }
            }
            smooth[iy * nx + ix] = acc / 25.0;
        }
    }
    contour_length_raw(&smooth, nx, ny, d.spacing(), 0.5)
}

/// Length of the `{u = t}` contour of a 2D field, traced by marching squares
/// on cell-center values with linear interpolation. Values beyond the box
/// are taken as zero. For 1D fields the number of crossings is returned.
pub fn contour_length(u: &ScalarField, t: f64) -> f64 {
    let d = u.domain();
    let (nx, ny) = d.shape();
    if d.dim() == 1 {
        let mut count = 0usize;
        let mut prev = false;
        for &v in u.values().iter().chain(std::iter::once(&0.0)) {
            let inside = v > t;
            if inside != prev {
                count += 1;
            }
            prev = inside;
        }
        return count as f64;
    }
    contour_length_raw(u.values(), nx, ny, d.spacing(), t)
}

fn contour_length_raw(values: &[f64], nx: usize, ny: usize, h: f64, t: f64) -> f64 {
    let get = |ix: i64, iy: i64| -> f64 {
        if ix < 0 || iy < 0 || ix >= nx as i64 || iy >= ny as i64 {
            0.0
        } else {
            values[iy as usize * nx + ix as usize]
        }
    };
    // Corners in counter-clockwise order with unit-square offsets.
    const OFF: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut total = 0.0;
    for iy in -1..ny as i64 {
        for ix in -1..nx as i64 {
            let c = [
                get(ix, iy),
                get(ix + 1, iy),
                get(ix + 1, iy + 1),
                get(ix, iy + 1),
            ];
            let inside = c.map(|v| v > t);
            if inside.iter().all(|&b| b) || inside.iter().all(|&b| !b) {
                continue;
            }
            // Crossing on edge k between corner k and corner k+1.
            let mut pts: [Option<(f64, f64)>; 4] = [None; 4];
            for k in 0..4 {
                let k1 = (k + 1) % 4;
                if inside[k] != inside[k1] {
                    let s = (t - c[k]) / (c[k1] - c[k]);
                    let (a, b) = (OFF[k], OFF[k1]);
                    pts[k] = Some((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)));
                }
            }
            let seg = |p: Option<(f64, f64)>, q: Option<(f64, f64)>| -> f64 {
                match (p, q) {
                    (Some(p), Some(q)) => (p.0 - q.0).hypot(p.1 - q.1),
                    _ => 0.0,
                }
            };
            let crossings = pts.iter().filter(|p| p.is_some()).count();
            if crossings == 2 {
                let found: Vec<_> = pts.iter().flatten().copied().collect();
                total += seg(Some(found[0]), Some(found[1]));
            } else {
                let center = 0.25 * (c[0] + c[1] + c[2] + c[3]) > t;
                if center == inside[0] {
                    total += seg(pts[0], pts[1]) + seg(pts[2], pts[3]);
                } else {
                    total += seg(pts[3], pts[0]) + seg(pts[1], pts[2]);
                }
            }
        }
    }
    total * h
}

/// `{u > t}` as a domain on the same box; `None` when the set is empty.
pub fn superlevel_set(u: &ScalarField, t: f64) -> Result<Option<GridDomain>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidField(format!("level {t} must be nonnegative")));
    }
    let d = u.domain();
    let mask: Vec<bool> = d
        .mask()
        .iter()
        .zip(u.values())
        .map(|(&m, &v)| m && v > t)
        .collect();
    if !mask.iter().any(|&m| m) {
        return Ok(None);
    }
    d.with_mask(mask).map(Some)
}

/// Euclidean distance from each interior cell center to the nearest exterior
/// cell center (exact, separable squared-distance transform).
pub fn distance_transform(d: &GridDomain) -> ScalarField {
    let (nx, ny) = d.shape();
    const BIG: f64 = 1e20;
    let mut g: Vec<f64> = d.mask().iter().map(|&m| if m { BIG } else { 0.0 }).collect();
    let mut buf_f = Vec::new();
    let mut buf_out = Vec::new();
    for iy in 0..ny {
        let row = &mut g[iy * nx..(iy + 1) * nx];
        buf_f.clear();
        buf_f.extend_from_slice(row);
        edt_1d(&buf_f, &mut buf_out);
        row.copy_from_slice(&buf_out);
    }
    if d.dim() == 2 {
        for ix in 0..nx {
            buf_f.clear();
            buf_f.extend((0..ny).map(|iy| g[iy * nx + ix]));
            edt_1d(&buf_f, &mut buf_out);
            for iy in 0..ny {
                g[iy * nx + ix] = buf_out[iy];
            }
        }
    }
    let h = d.spacing();
    let values = g
        .iter()
        .zip(d.mask())
        .map(|(&v, &m)| if m { v.sqrt() * h } else { 0.0 })
        .collect();
    ScalarField::new(std::sync::Arc::new(d.clone()), values)
        .expect("distance values are finite and vanish outside")
}

/// Lower envelope of parabolas `(q - p)² + f(p)`.
fn edt_1d(f: &[f64], out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, 0.0);
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0 and the new parabola dominates everywhere.
                v[0] = q;
                z[1] = f64::INFINITY;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
            }
            break;
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *o = dq * dq + f[p];
    }
}

/// `|d| / |hull|`, both counted in cells: the hull of the interior cell
/// centers is rasterized on the same lattice (centers inside or on it).
pub fn convexity_score(d: &GridDomain) -> f64 {
    let pts: Vec<(i64, i64)> = d
        .interior()
        .iter()
        .map(|&i| {
            let (x, y) = d.coords(i);
            (x as i64, y as i64)
        })
        .collect();
    let hull = lattice_hull(pts);
    d.interior_count() as f64 / lattice_points_in_hull(&hull) as f64
}

/// Counter-clockwise convex hull without collinear points.
fn lattice_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lattice points inside or on a convex lattice polygon (Pick's theorem).
fn lattice_points_in_hull(hull: &[(i64, i64)]) -> i64 {
    match hull.len() {
        0 => 0,
        1 => 1,
        2 => gcd(hull[1].0 - hull[0].0, hull[1].1 - hull[0].1) + 1,
        n => {
            let mut twice_area = 0i64;
            let mut boundary = 0i64;
            for i in 0..n {
                let (p, q) = (hull[i], hull[(i + 1) % n]);
                twice_area += p.0 * q.1 - q.0 * p.1;
                boundary += gcd(q.0 - p.0, q.1 - p.1);
            }
            // A + B/2 + 1 with 2A = twice_area.
            (twice_area.abs() + boundary) / 2 + 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridcore::{build_grid_domain, ShapeSpec};
    use std::sync::Arc;

    #[test]
    fn edt_matches_brute_force() {
        let spec = ShapeSpec::PerturbedDisk {
            radius: 1.0,
            amplitude: 0.3,
            mode: 3,
            center: [0.1, 0.0],
        };
        let d = build_grid_domain(&spec, 0.1).unwrap();
        let dt = distance_transform(&d);
        let ext: Vec<usize> = (0..d.len()).filter(|&i| !d.is_interior(i)).collect();
        for &i in d.interior() {
            let c = d.center(i);
            let best = ext
                .iter()
                .map(|&j| {
                    let e = d.center(j);
                    (c[0] - e[0]).hypot(c[1] - e[1])
                })
                .fold(f64::INFINITY, f64::min);
            assert!((dt.values()[i] - best).abs() < 1e-12);
        }
    }

    #[test]
    fn pick_counts() {
        assert_eq!(lattice_points_in_hull(&[(0, 0), (2, 0), (2, 2), (0, 2)]), 9);
        assert_eq!(lattice_points_in_hull(&[(0, 0), (3, 3)]), 4);
        assert_eq!(lattice_points_in_hull(&lattice_hull(vec![(0, 0), (1, 1), (2, 2)])), 3);
    }

    #[test]
    fn contour_of_linear_ramp() {
        let d = Arc::new(
            build_grid_domain(
                &ShapeSpec::Rectangle {
                    w: 1.0,
                    ht: 1.0,
                    center: [0.0; 2],
                },
                1.0 / 32.0,
            )
            .unwrap(),
        );
        // Interior ramp crossing 0.5 on a vertical line; the contour also
        // runs around the support where the ramp exceeds the level.
        let u = ScalarField::from_fn(d, |p| p[0] + 0.5).unwrap();
        let len = contour_length(&u, 0.5);
        assert!(len > 1.0 && len < 3.2, "{len}");
    }
}
