use std::f64::consts::PI;

use crate::gridcore::GridDomain;
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

/// Gauss order used on the cells touching the excluded central cell.
const NEAR_ORDER: usize = 12;
/// Subsamples per axis for cells cut by the tail circle.
const CLIP_SUB: usize = 8;

/// Per-cell integrals of `|y|^{-n-2s}` on the lattice `hℤⁿ` plus the closed
/// form tail beyond the support radius.
///
/// Weights are stored densely over offsets `j ∈ [-M, M]ⁿ`; the entry for
/// `j = 0` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalKernel {
    s: f64,
    dim: usize,
    h: f64,
    half_width: usize,
    weights: Vec<f64>,
    weight_sum: f64,
    tail_radius: f64,
    tail_coeff: f64,
}

/// `∫_a^b y^{-1-2s} dy` for `0 < a < b`.
pub fn cell_weight_1d(s: f64, a: f64, b: f64) -> f64 {
    (a.powf(-2.0 * s) - b.powf(-2.0 * s)) / (2.0 * s)
}

/// `∫_{|y|>R} |y|^{-n-2s} dy = σ_{n-1} R^{-2s} / (2s)`.
pub fn tail_integral(s: f64, dim: usize, r: f64) -> f64 {
    let sigma = if dim == 1 { 2.0 } else { 2.0 * PI };
    sigma * r.powf(-2.0 * s) / (2.0 * s)
}

/// Smallest support half-width (in cells) covering every offset between two
/// interior cells. Depends only on the interior extent, so the same mask in a
/// larger box gets the same kernel.
pub fn required_half_width(d: &GridDomain) -> usize {
    let (x0, y0, x1, y1) = d.interior_extent();
    let w = if d.dim() == 1 {
        x1 - x0
    } else {
        ((x1 - x0) as f64).hypot((y1 - y0) as f64).ceil() as usize
    };
    w.max(1)
}

/// Kernel for exponent `s` whose support covers every interior offset of `d`.
pub fn build_kernel(s: f64, d: &GridDomain) -> Result<FractionalKernel> {
    build_kernel_with_support(s, d, required_half_width(d))
}

/// Kernel with an explicit support half-width `m` (in cells).
pub fn build_kernel_with_support(s: f64, d: &GridDomain, m: usize) -> Result<FractionalKernel> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidExponent(s));
    }
    let required = required_half_width(d);
    if m < required {
        return Err(Error::KernelSupport {
            support: m,
            required,
        });
    }
    let h = d.spacing();
    let dim = d.dim();
    let scale = h.powf(-2.0 * s);
    let width = 2 * m + 1;
    let weights = if dim == 1 {
        (0..width)
            .map(|k| {
                let j = (k as i64 - m as i64).unsigned_abs() as f64;
                if j == 0.0 {
                    0.0
                } else {
                    scale * cell_weight_1d(s, j - 0.5, j + 0.5)
                }
            })
            .collect()
    } else {
        weights_2d(s, m, scale)
    };
    let weight_sum = weights.iter().sum();
    let tail_radius = (m as f64 + 0.5) * h;
    Ok(FractionalKernel {
        s,
        dim,
        h,
        half_width: m,
        weights,
        weight_sum,
        tail_radius,
        tail_coeff: tail_integral(s, dim, tail_radius),
    })
}

fn weights_2d(s: f64, m: usize, scale: f64) -> Vec<f64> {
    let p = 2.0 + 2.0 * s;
    let width = 2 * m + 1;
    let r = m as f64 + 0.5;
    let (gx, gw) = gauss_legendre(NEAR_ORDER);
    let f = |x: f64, y: f64| (x * x + y * y).powf(-0.5 * p);
    let near = |jx: f64, jy: f64| -> f64 {
        let mut acc = 0.0;
        for (xi, wi) in gx.iter().zip(&gw) {
            for (yi, wj) in gx.iter().zip(&gw) {
                acc += wi * wj * f(jx + 0.5 * xi, jy + 0.5 * yi);
            }
        }
        0.25 * acc
    };
    // Weights are symmetric in each axis and under swapping the axes, so
    // only the octant 0 <= jy <= jx is evaluated.
    let mut octant = vec![0.0; (m + 1) * (m + 1)];
    for jx in 0..=m {
        for jy in 0..=jx {
            let (x, y) = (jx as f64, jy as f64);
            let w = if jx == 0 {
                0.0
            } else if jx == 1 {
                near(x, y)
            } else {
                let inner = (x - 0.5).hypot((y - 0.5).max(0.0));
                let outer = (x + 0.5).hypot(y + 0.5);
                if inner >= r {
                    0.0
                } else if outer <= r {
                    f(x, y)
                } else {
                    let mut acc = 0.0;
                    let step = 1.0 / CLIP_SUB as f64;
                    for a in 0..CLIP_SUB {
                        for b in 0..CLIP_SUB {
                            let px = x - 0.5 + (a as f64 + 0.5) * step;
                            let py = y - 0.5 + (b as f64 + 0.5) * step;
                            if px.hypot(py) < r {
                                acc += f(px, py);
                            }
                        }
                    }
                    acc * step * step
                }
            };
            octant[jx * (m + 1) + jy] = w * scale;
        }
    }
    let mut out = vec![0.0; width * width];
    for ky in 0..width {
        let ay = (ky as i64 - m as i64).unsigned_abs() as usize;
        for kx in 0..width {
            let ax = (kx as i64 - m as i64).unsigned_abs() as usize;
            let (hi, lo) = if ax >= ay { (ax, ay) } else { (ay, ax) };
            out[ky * width + kx] = octant[hi * (m + 1) + lo];
        }
    }
    out
}

impl FractionalKernel {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Support half-width `M` in cells.
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn tail_radius(&self) -> f64 {
        self.tail_radius
    }

    pub fn tail_coeff(&self) -> f64 {
        self.tail_coeff
    }

    /// `Σ_j w_j` over the whole table.
    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    /// Weight for offset `(jx, jy)`; zero outside the support.
    pub fn weight(&self, jx: i64, jy: i64) -> f64 {
        let m = self.half_width as i64;
        if jx.abs() > m || jy.abs() > m || (self.dim == 1 && jy != 0) {
            return 0.0;
        }
        self.weights[self.offset_index(jx, jy)]
    }

    /// Dense weights, row-major over `[-M, M]ⁿ`.
    pub fn table(&self) -> &[f64] {
        &self.weights
    }

    /// Row `jy` of the table as a slice over `jx ∈ [-M, M]`.
    pub fn row(&self, jy: i64) -> &[f64] {
        let width = 2 * self.half_width + 1;
        let start = if self.dim == 1 {
            0
        } else {
            (jy + self.half_width as i64) as usize * width
        };
        &self.weights[start..start + width]
    }

    fn offset_index(&self, jx: i64, jy: i64) -> usize {
        let m = self.half_width as i64;
        let width = 2 * m + 1;
        if self.dim == 1 {
            (jx + m) as usize
        } else {
            ((jy + m) * width + jx + m) as usize
        }
    }
}
