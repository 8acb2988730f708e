use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::convexgeom::polygon::dist;
use crate::convexgeom::{Ball, ConvexPolygon};

/// Seed of the shuffle in [`min_enclosing_ball`].
pub const WELZL_SEED: u64 = 0x5eed_ba11;

/// Largest inscribed ball.
///
/// Solves `max r s.t. a_i·c + r ≤ b_i` through its dual
/// `min Σ b_i y_i s.t. Σ y_i a_i = 0, Σ y_i = 1, y ≥ 0` with a dense
/// two-phase simplex (Bland's rule). The center is read off the final basis
/// and the radius recomputed as the exact minimum edge distance.
pub fn chebyshev_inball(p: &ConvexPolygon) -> Ball {
    let hp = p.half_planes();
    let m = hp.len();
    let rows = [
        hp.iter().map(|(a, _)| a[0]).collect::<Vec<_>>(),
        hp.iter().map(|(a, _)| a[1]).collect(),
        vec![1.0; m],
    ];
    let cost: Vec<f64> = hp.iter().map(|(_, b)| *b).collect();
    let z = simplex_dual(&rows, &[0.0, 0.0, 1.0], &cost);
    let center = [z[0], z[1]];
    let radius = p.depth(center);
    Ball { center, radius }
}

/// Dense tableau for `min c·y, A y = b, y ≥ 0` with three rows and `b ≥ 0`.
/// Returns the simplex multipliers `c_B B⁻¹` of the optimal basis.
fn simplex_dual(a: &[Vec<f64>; 3], b: &[f64; 3], cost: &[f64]) -> [f64; 3] {
    const R: usize = 3;
    const EPS: f64 = 1e-12;
    let m = cost.len();
    let cols = m + R;
    let width = cols + 1;
    let mut t = vec![0.0; R * width];
    for i in 0..R {
        for j in 0..m {
            t[i * width + j] = a[i][j];
        }
        t[i * width + m + i] = 1.0;
        t[i * width + cols] = b[i];
    }
    let mut basis: Vec<usize> = (m..m + R).collect();

    let pivot = |t: &mut Vec<f64>, basis: &mut Vec<usize>, r: usize, c: usize| {
        let pv = t[r * width + c];
        for k in 0..width {
            t[r * width + k] /= pv;
        }
        for i in 0..R {
            if i != r {
                let f = t[i * width + c];
                if f != 0.0 {
                    for k in 0..width {
                        t[i * width + k] -= f * t[r * width + k];
                    }
                }
            }
        }
        basis[r] = c;
    };

    // Runs the simplex for the given column costs over `allowed` columns.
    let run = |t: &mut Vec<f64>, basis: &mut Vec<usize>, c: &dyn Fn(usize) -> f64, allowed: usize| {
        let scale = (0..allowed).map(|j| c(j).abs()).fold(1.0, f64::max);
        for _ in 0..100_000 {
            let mut enter = None;
            for j in 0..allowed {
                if basis.contains(&j) {
                    continue;
                }
                let mut red = c(j);
                for i in 0..R {
                    red -= c(basis[i]) * t[i * width + j];
                }
                if red < -EPS * scale {
                    enter = Some(j);
                    break;
                }
            }
            let Some(j) = enter else { return };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..R {
                let aij = t[i * width + j];
                if aij > EPS {
                    let ratio = t[i * width + cols] / aij;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - EPS || (ratio <= lr + EPS && basis[i] < basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => pivot(t, basis, r, j),
                // Unbounded dual means an empty primal; cannot happen for a
                // bounded polygon.
                None => return,
            }
        }
    };

    let phase1 = |j: usize| if j >= m { 1.0 } else { 0.0 };
    run(&mut t, &mut basis, &phase1, cols);
    // Drive remaining (zero-level) artificials out of the basis.
    for r in 0..R {
        if basis[r] >= m {
            if let Some(j) = (0..m)
                .filter(|j| !basis.contains(j))
                .max_by(|&x, &y| t[r * width + x].abs().total_cmp(&t[r * width + y].abs()))
            {
                if t[r * width + j].abs() > EPS {
                    pivot(&mut t, &mut basis, r, j);
                }
            }
        }
    }
    let phase2 = |j: usize| if j < m { cost[j] } else { 0.0 };
    run(&mut t, &mut basis, &phase2, m);

    // Columns m..m+R of the tableau hold B⁻¹.
    let mut z = [0.0; 3];
    for (k, zk) in z.iter_mut().enumerate() {
        for i in 0..R {
            *zk += phase2(basis[i]) * t[i * width + m + k];
        }
    }
    z
}

/// Smallest ball containing the vertices (Welzl, shuffled with a fixed seed).
pub fn min_enclosing_ball(p: &ConvexPolygon) -> Ball {
    min_enclosing_ball_of(p.vertices())
}

pub fn min_enclosing_ball_of(points: &[[f64; 2]]) -> Ball {
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(WELZL_SEED));
    let scale = pts
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    let inside = |b: &Ball, q: [f64; 2]| dist(b.center, q) <= b.radius + tol;
    let mut ball = Ball {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if inside(&ball, pts[i]) {
            continue;
        }
        ball = Ball {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if inside(&ball, pts[j]) {
                continue;
            }
            ball = circle2(pts[i], pts[j]);
            for k in 0..j {
                if !inside(&ball, pts[k]) {
                    ball = circle3(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    ball
}

fn circle2(a: [f64; 2], b: [f64; 2]) -> Ball {
    Ball {
        center: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])],
        radius: 0.5 * dist(a, b),
    }
}

fn circle3(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Ball {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        // Collinear: the farthest pair spans the circle.
        let cands = [circle2(a, b), circle2(a, c), circle2(b, c)];
        return cands
            .into_iter()
            .max_by(|x, y| x.radius.total_cmp(&y.radius))
            .expect("three candidates");
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = [a[0] + ux, a[1] + uy];
    let radius = dist(center, a).max(dist(center, b)).max(dist(center, c));
    Ball { center, radius }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_balls() {
        let sq = ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let inb = chebyshev_inball(&sq);
        assert!((inb.radius - 0.5).abs() < 1e-14);
        assert!((inb.center[0] - 0.5).abs() < 1e-14 && (inb.center[1] - 0.5).abs() < 1e-14);
        let out = min_enclosing_ball(&sq);
        assert!((out.radius - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn triangle_incircle_and_circumcircle() {
        let t = ConvexPolygon::new(vec![[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]).unwrap();
        let inb = chebyshev_inball(&t);
        assert!((inb.radius - 1.0).abs() < 1e-13);
        assert!((inb.center[0] - 1.0).abs() < 1e-13 && (inb.center[1] - 1.0).abs() < 1e-13);
        let eq = ConvexPolygon::regular(3, 1.0 / 3f64.sqrt(), [0.2, -0.1], 0.3).unwrap();
        assert!((min_enclosing_ball(&eq).radius - 1.0 / 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn thin_shapes() {
        let r = ConvexPolygon::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 0.2], [0.0, 0.2]]).unwrap();
        assert!((chebyshev_inball(&r).radius - 0.1).abs() < 1e-14);
        let sliver = ConvexPolygon::new(vec![[0.0, 0.0], [2.0, -1e-4], [4.0, 0.0], [2.0, 1e-4]]).unwrap();
        assert!((min_enclosing_ball(&sliver).radius - 2.0).abs() < 1e-6);
    }
}
