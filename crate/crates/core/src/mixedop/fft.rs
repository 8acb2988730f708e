use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::mixedop::FractionalKernel;
use crate::par;

/// Smallest `n >= min` whose only prime factors are 2, 3 and 5.
pub fn fast_len(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Linear convolution with the kernel table over a fixed rectangular window,
/// by zero-padded FFT.
///
/// The window is `bx × by` cells; padding to at least `2b - 1` per axis
/// removes wrap-around for every offset inside the window.
pub struct FftConvolver {
    bx: usize,
    by: usize,
    px: usize,
    py: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    /// Kernel spectrum in transposed layout (`px` rows of length `py`),
    /// already divided by `px · py`.
    spectrum: Vec<f64>,
}

impl std::fmt::Debug for FftConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftConvolver")
            .field("window", &(self.bx, self.by))
            .field("padded", &(self.px, self.py))
            .finish()
    }
}

const ROWS_PER_TASK: usize = 8;

impl FftConvolver {
    pub fn new(kernel: &FractionalKernel, bx: usize, by: usize) -> Self {
        let px = fast_len(2 * bx - 1);
        let py = if by == 1 { 1 } else { fast_len(2 * by - 1) };
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(px);
        let row_inv = planner.plan_fft_inverse(px);
        let col_fwd = planner.plan_fft_forward(py);
        let col_inv = planner.plan_fft_inverse(py);
        let mut conv = Self {
            bx,
            by,
            px,
            py,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            spectrum: Vec::new(),
        };
        let mut buf = vec![Complex::new(0.0, 0.0); px * py];
        let wrap = |k: usize, b: usize, p: usize| -> Option<i64> {
            if k < b {
                Some(k as i64)
            } else if k + b > p {
                Some(k as i64 - p as i64)
            } else {
                None
            }
        };
        for ky in 0..py {
            let Some(jy) = wrap(ky, by, py) else { continue };
            for kx in 0..px {
                if let Some(jx) = wrap(kx, bx, px) {
                    buf[ky * px + kx].re = kernel.weight(jx, jy);
                }
            }
        }
        let t = conv.forward(buf, py);
        let norm = 1.0 / (px * py) as f64;
        conv.spectrum = t.iter().map(|c| c.re * norm).collect();
        conv
    }

    pub fn window(&self) -> (usize, usize) {
        (self.bx, self.by)
    }

    pub fn padded(&self) -> (usize, usize) {
        (self.px, self.py)
    }

    /// Row transforms on the first `rows` rows, then transpose and column
    /// transforms. Returns the spectrum in transposed layout.
    fn forward(&self, mut buf: Vec<Complex<f64>>, rows: usize) -> Vec<Complex<f64>> {
        let (px, py) = (self.px, self.py);
        let fft = &self.row_fwd;
        par::for_each_chunk_mut(&mut buf[..rows * px], ROWS_PER_TASK * px, |_, c| {
            fft.process(c)
        });
        if py == 1 {
            return buf;
        }
        let mut t = transpose(&buf, py, px);
        let fft = &self.col_fwd;
        par::for_each_chunk_mut(&mut t, ROWS_PER_TASK * py, |_, c| fft.process(c));
        t
    }

    /// `out[i] = Σ_k w_{k-i} u_k` for `u`, `out` laid out row-major over the
    /// window.
    pub fn convolve(&self, u: &[f64], out: &mut [f64]) {
        let (bx, by, px, py) = (self.bx, self.by, self.px, self.py);
        debug_assert_eq!(u.len(), bx * by);
        let mut buf = vec![Complex::new(0.0, 0.0); px * py];
        for iy in 0..by {
            for ix in 0..bx {
                buf[iy * px + ix].re = u[iy * bx + ix];
            }
        }
        let mut t = self.forward(buf, by);
        for (c, k) in t.iter_mut().zip(&self.spectrum) {
            *c *= *k;
        }
        let mut back = if py == 1 {
            t
        } else {
            let fft = &self.col_inv;
            par::for_each_chunk_mut(&mut t, ROWS_PER_TASK * py, |_, c| fft.process(c));
            transpose_rows(&t, px, py, by)
        };
        let fft = &self.row_inv;
        par::for_each_chunk_mut(&mut back[..by * px], ROWS_PER_TASK * px, |_, c| {
            fft.process(c)
        });
        for iy in 0..by {
            for ix in 0..bx {
                out[iy * bx + ix] = back[iy * px + ix].re;
            }
        }
    }
}

/// Transpose an `rows × cols` row-major matrix.
fn transpose(a: &[Complex<f64>], rows: usize, cols: usize) -> Vec<Complex<f64>> {
    transpose_rows(a, rows, cols, cols)
}

/// Transpose of an `rows × cols` matrix in which only the first `keep` rows
/// of the result (source columns `< keep`) are filled.
fn transpose_rows(a: &[Complex<f64>], rows: usize, cols: usize, keep: usize) -> Vec<Complex<f64>> {
    const B: usize = 32;
    let mut out = vec![Complex::new(0.0, 0.0); rows * cols];
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..keep).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(keep) {
                    out[c * rows + r] = a[r * cols + c];
                }
            }
        }
    }
    out
}
