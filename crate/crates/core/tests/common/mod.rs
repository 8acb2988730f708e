#![allow(dead_code)]

use std::sync::Arc;

use fklab::gridcore::{GridDomain, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// First positive zero of J₀.
pub const J0_ZERO: f64 = 2.404_825_557_695_773;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(d: &Arc<GridDomain>, rng: &mut ChaCha8Rng) -> ScalarField {
    let v = (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ScalarField::masked(d.clone(), v).unwrap()
}

fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 18)
}

/// `∫_0^∞ (2u(x) - u(x+y) - u(x-y)) y^{-1-2s} dy` for `u` supported in
/// `[lo, hi]`: adaptive quadrature up to the support edge in the variable
/// `y = t⁴`, closed form beyond.
pub fn fractional_laplacian_1d(u: &dyn Fn(f64) -> f64, x: f64, s: f64, lo: f64, hi: f64) -> f64 {
    let ux = u(x);
    let g = |y: f64| (2.0 * ux - u(x + y) - u(x - y)) * y.powf(-1.0 - 2.0 * s);
    let ymax = (x - lo).max(hi - x);
    let mut breaks = vec![0.0, (x - lo).min(hi - x), ymax];
    breaks.dedup();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0].powf(0.25), w[1].powf(0.25));
        let h = |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                let y = t.powi(4);
                g(y) * 4.0 * t.powi(3)
            }
        };
        total += adaptive_simpson(&h, t0, t1, 1e-10);
    }
    total + 2.0 * ux * ymax.powf(-2.0 * s) / (2.0 * s)
}

/// `exp(1 - 1/(1 - x²))` on `(-1, 1)`.
pub fn smooth_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}
