use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::gridcore::{GridDomain, ScalarField};
use crate::mixedop::fft::FftConvolver;
use crate::mixedop::{build_kernel, FractionalKernel};
use crate::{par, Error, Result};

/// Evaluation strategy for the nonlocal part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlocalPath {
    /// FFT when it is estimated to be cheaper than direct summation.
    #[default]
    Auto,
    Direct,
    Fft,
}

/// Maximal run of interior cells in one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Run {
    pub iy: usize,
    pub ix0: usize,
    pub len: usize,
    /// Position of the first cell in the compact (interior-only) ordering.
    pub offset: usize,
}

const NONE: u32 = u32::MAX;

/// `local_scale · (-Δ_h) + nonlocal_scale · (-Δ)^s_h` on a grid domain.
///
/// Besides [`ScalarField`] entry points the operator works on compact
/// vectors holding only interior values, in increasing cell order.
pub struct MixedOperator {
    domain: Arc<GridDomain>,
    kernel: Option<FractionalKernel>,
    local_scale: f64,
    nonlocal_scale: f64,
    path: NonlocalPath,
    runs: Vec<Run>,
    /// Compact indices of the −x, +x, −y, +y neighbours (`NONE` when exterior).
    neighbours: Vec<[u32; 4]>,
    coords: Vec<(u32, u32)>,
    fft: OnceLock<FftConvolver>,
}

impl std::fmt::Debug for MixedOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MixedOperator")
            .field("shape", &self.domain.shape())
            .field("interior", &self.domain.interior_count())
            .field("s", &self.kernel.as_ref().map(|k| k.s()))
            .field("local_scale", &self.local_scale)
            .field("nonlocal_scale", &self.nonlocal_scale)
            .field("path", &self.path)
            .finish()
    }
}

impl MixedOperator {
    /// Operator with fractional exponent `s` and the given scales.
    pub fn new(
        domain: Arc<GridDomain>,
        s: f64,
        local_scale: f64,
        nonlocal_scale: f64,
    ) -> Result<Self> {
        let kernel = build_kernel(s, &domain)?;
        Self::assemble(domain, Some(kernel), local_scale, nonlocal_scale)
    }

    /// `L = -Δ + (-Δ)^s`.
    pub fn mixed(domain: Arc<GridDomain>, s: f64) -> Result<Self> {
        Self::new(domain, s, 1.0, 1.0)
    }

    /// Pure Dirichlet Laplacian; no kernel is built.
    pub fn laplacian(domain: Arc<GridDomain>) -> Result<Self> {
        Self::assemble(domain, None, 1.0, 0.0)
    }

    /// Same domain and kernel with other scales.
    pub fn with_scales(&self, local_scale: f64, nonlocal_scale: f64) -> Result<Self> {
        let mut op = Self::assemble(
            self.domain.clone(),
            self.kernel.clone(),
            local_scale,
            nonlocal_scale,
        )?;
        op.path = self.path;
        Ok(op)
    }

    pub fn with_path(mut self, path: NonlocalPath) -> Self {
        self.path = path;
        self
    }

    fn assemble(
        domain: Arc<GridDomain>,
        kernel: Option<FractionalKernel>,
        local_scale: f64,
        nonlocal_scale: f64,
    ) -> Result<Self> {
        for (name, v) in [("local", local_scale), ("nonlocal", nonlocal_scale)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} scale {v} must be >= 0")));
            }
        }
        if nonlocal_scale > 0.0 && kernel.is_none() {
            return Err(Error::Config("nonlocal part requested without a kernel".into()));
        }
        let (nx, _) = domain.shape();
        let mut compact = vec![NONE; domain.len()];
        for (k, &i) in domain.interior().iter().enumerate() {
            compact[i] = k as u32;
        }
        let mut runs: Vec<Run> = Vec::new();
        let mut coords = Vec::with_capacity(domain.interior_count());
        for (k, &i) in domain.interior().iter().enumerate() {
            let (ix, iy) = domain.coords(i);
            coords.push((ix as u32, iy as u32));
            match runs.last_mut() {
                Some(r) if r.iy == iy && r.ix0 + r.len == ix => r.len += 1,
                _ => runs.push(Run {
                    iy,
                    ix0: ix,
                    len: 1,
                    offset: k,
                }),
            }
        }
        let two_d = domain.dim() == 2;
        let neighbours = domain
            .interior()
            .iter()
            .map(|&i| {
                // Interior cells never touch the box edge, so i ± 1, i ± nx exist.
                let up = if two_d { compact[i + nx] } else { NONE };
                let down = if two_d { compact[i - nx] } else { NONE };
                [compact[i - 1], compact[i + 1], down, up]
            })
            .collect();
        Ok(Self {
            domain,
            kernel,
            local_scale,
            nonlocal_scale,
            path: NonlocalPath::Auto,
            runs,
            neighbours,
            coords,
            fft: OnceLock::new(),
        })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn kernel(&self) -> Option<&FractionalKernel> {
        self.kernel.as_ref()
    }

    pub fn local_scale(&self) -> f64 {
        self.local_scale
    }

    pub fn nonlocal_scale(&self) -> f64 {
        self.nonlocal_scale
    }

    pub fn path(&self) -> NonlocalPath {
        self.path
    }

    /// Number of unknowns (interior cells).
    pub fn size(&self) -> usize {
        self.coords.len()
    }

    pub(crate) fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub(crate) fn neighbours(&self) -> &[[u32; 4]] {
        &self.neighbours
    }

    pub(crate) fn cell_coords(&self) -> &[(u32, u32)] {
        &self.coords
    }

    /// `Σ_j w_j + τ`, the diagonal of the unscaled nonlocal part.
    pub fn nonlocal_diagonal(&self) -> f64 {
        self.kernel
            .as_ref()
            .map_or(0.0, |k| k.weight_sum() + k.tail_coeff())
    }

    pub fn to_compact(&self, u: &ScalarField) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(self
            .domain
            .interior()
            .iter()
            .map(|&i| u.values()[i])
            .collect())
    }

    pub fn from_compact(&self, x: &[f64]) -> Result<ScalarField> {
        if x.len() != self.size() {
            return Err(Error::InvalidField(format!(
                "compact vector has {} entries, domain has {}",
                x.len(),
                self.size()
            )));
        }
        let mut values = vec![0.0; self.domain.len()];
        for (&i, &v) in self.domain.interior().iter().zip(x) {
            values[i] = v;
        }
        ScalarField::new(self.domain.clone(), values)
    }

    fn check(&self, u: &ScalarField) -> Result<()> {
        if u.domain().same_grid(&self.domain) && u.domain().mask() == self.domain.mask() {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    fn require_kernel(&self) -> Result<&FractionalKernel> {
        self.kernel
            .as_ref()
            .ok_or_else(|| Error::Config("operator has no fractional part".into()))
    }

    /// 3/5-point `-Δ_h` (unscaled). The zero boundary value sits on the
    /// cell faces between interior and exterior cells, i.e. an exterior
    /// neighbour acts as the ghost value `-u`.
    pub fn local_compact(&self, x: &[f64], out: &mut [f64]) {
        let h2 = self.domain.spacing().powi(2);
        let dim = self.domain.dim();
        let centre = 2.0 * dim as f64;
        let nb = &self.neighbours;
        par::fill_indexed(out, |k| {
            let mut acc = centre * x[k];
            for &j in &nb[k][..2 * dim] {
                if j == NONE {
                    acc += x[k];
                } else {
                    acc -= x[j as usize];
                }
            }
            acc / h2
        });
    }

    /// Unscaled nonlocal part by direct summation over interior pairs.
    pub fn nonlocal_direct_compact(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let k = self.require_kernel()?;
        let diag = k.weight_sum() + k.tail_coeff();
        let m = k.half_width() as i64;
        par::fill_indexed(out, |i| {
            let (ix, iy) = self.coords[i];
            let (ix, iy) = (ix as i64, iy as i64);
            let mut acc = 0.0;
            for r in &self.runs {
                let row = k.row(r.iy as i64 - iy);
                let start = (r.ix0 as i64 - ix + m) as usize;
                let w = &row[start..start + r.len];
                let u = &x[r.offset..r.offset + r.len];
                acc += dot(w, u);
            }
            diag * x[i] - acc
        });
        Ok(())
    }

    fn convolver(&self) -> Result<&FftConvolver> {
        let k = self.require_kernel()?;
        Ok(self.fft.get_or_init(|| {
            let (x0, y0, x1, y1) = self.domain.interior_extent();
            FftConvolver::new(k, x1 - x0 + 1, y1 - y0 + 1)
        }))
    }

    /// Unscaled nonlocal part by FFT convolution over the interior extent.
    pub fn nonlocal_fft_compact(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let diag = self.nonlocal_diagonal();
        let conv = self.convolver()?;
        let (x0, y0, _, _) = self.domain.interior_extent();
        let (bx, by) = conv.window();
        let mut window = vec![0.0; bx * by];
        for (k, &(ix, iy)) in self.coords.iter().enumerate() {
            window[(iy as usize - y0) * bx + ix as usize - x0] = x[k];
        }
        let mut res = vec![0.0; bx * by];
        conv.convolve(&window, &mut res);
        for (k, &(ix, iy)) in self.coords.iter().enumerate() {
            out[k] = diag * x[k] - res[(iy as usize - y0) * bx + ix as usize - x0];
        }
        Ok(())
    }

    /// Whether [`NonlocalPath::Auto`] resolves to the FFT path.
    pub fn prefers_fft(&self) -> bool {
        match self.path {
            NonlocalPath::Direct => false,
            NonlocalPath::Fft => true,
            NonlocalPath::Auto => {
                let (x0, y0, x1, y1) = self.domain.interior_extent();
                let px = super::fft::fast_len(2 * (x1 - x0 + 1) - 1) as f64;
                let py = if self.domain.dim() == 1 {
                    1.0
                } else {
                    super::fft::fast_len(2 * (y1 - y0 + 1) - 1) as f64
                };
                let m = self.size() as f64;
                let fft_cost = 12.0 * px * py * (px * py).log2().max(1.0);
                m * m > fft_cost
            }
        }
    }

    /// Unscaled nonlocal part on the configured path.
    pub fn nonlocal_compact(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if self.prefers_fft() {
            self.nonlocal_fft_compact(x, out)
        } else {
            self.nonlocal_direct_compact(x, out)
        }
    }

    /// Full operator on compact vectors.
    pub fn apply_compact(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.size() || out.len() != self.size() {
            return Err(Error::InvalidField("compact vector length mismatch".into()));
        }
        if self.local_scale > 0.0 {
            self.local_compact(x, out);
            if self.local_scale != 1.0 {
                out.iter_mut().for_each(|v| *v *= self.local_scale);
            }
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
        }
        if self.nonlocal_scale > 0.0 {
            let mut nl = vec![0.0; x.len()];
            self.nonlocal_compact(x, &mut nl)?;
            for (o, v) in out.iter_mut().zip(&nl) {
                *o += self.nonlocal_scale * v;
            }
        }
        Ok(())
    }

    fn lift(
        &self,
        u: &ScalarField,
        f: impl FnOnce(&[f64], &mut [f64]) -> Result<()>,
    ) -> Result<ScalarField> {
        let x = self.to_compact(u)?;
        let mut y = vec![0.0; x.len()];
        f(&x, &mut y)?;
        self.from_compact(&y)
    }

    /// Unscaled `-Δ_h u`.
    pub fn apply_local(&self, u: &ScalarField) -> Result<ScalarField> {
        self.lift(u, |x, y| {
            self.local_compact(x, y);
            Ok(())
        })
    }

    /// Unscaled `(-Δ)^s_h u` by direct summation.
    pub fn apply_nonlocal(&self, u: &ScalarField) -> Result<ScalarField> {
        self.lift(u, |x, y| self.nonlocal_direct_compact(x, y))
    }

    /// Unscaled `(-Δ)^s_h u` by FFT convolution.
    pub fn apply_nonlocal_fast(&self, u: &ScalarField) -> Result<ScalarField> {
        self.lift(u, |x, y| self.nonlocal_fft_compact(x, y))
    }

    /// `local_scale · apply_local + nonlocal_scale · apply_nonlocal`.
    pub fn apply_mixed(&self, u: &ScalarField) -> Result<ScalarField> {
        self.lift(u, |x, y| self.apply_compact(x, y))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four independent accumulators, combined in a fixed order.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
