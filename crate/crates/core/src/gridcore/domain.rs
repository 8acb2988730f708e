use std::io::Write;

use crate::gridcore::ShapeSpec;
use crate::{Error, Result};

/// A rasterized bounded open set on a uniform grid.
///
/// Cells are stored row-major (`idx = iy * nx + ix`); one-dimensional
/// domains use `ny = 1`. Cell `(ix, iy)` has center
/// `origin + (i + 1/2) h` along each axis. Interior cells never touch the
/// outermost ring of the box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    dim: usize,
    h: f64,
    nx: usize,
    ny: usize,
    origin: [f64; 2],
    mask: Vec<bool>,
    interior: Vec<usize>,
}

impl GridDomain {
    /// Assemble a domain from an explicit mask, checking the invariants.
    pub fn from_mask(
        dim: usize,
        h: f64,
        (nx, ny): (usize, usize),
        origin: [f64; 2],
        mask: Vec<bool>,
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidShape(format!("dimension {dim} not supported")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidShape(format!("spacing {h} must be positive")));
        }
        if dim == 1 && ny != 1 {
            return Err(Error::InvalidShape("1D domains have ny = 1".into()));
        }
        if mask.len() != nx * ny {
            return Err(Error::InvalidShape(format!(
                "mask has {} cells, box has {}",
                mask.len(),
                nx * ny
            )));
        }
        let interior: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        if interior.is_empty() {
            return Err(Error::EmptyDomain("no cell center lies in the shape".into()));
        }
        for &i in &interior {
            let (ix, iy) = (i % nx, i / nx);
            let touches = ix == 0 || ix + 1 == nx || (dim == 2 && (iy == 0 || iy + 1 == ny));
            if touches {
                return Err(Error::InvalidShape(format!(
                    "interior cell ({ix}, {iy}) touches the box boundary"
                )));
            }
        }
        Ok(Self {
            dim,
            h,
            nx,
            ny,
            origin,
            mask,
            interior,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Indices of interior cells in increasing order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    /// `h^n`, the measure of one cell.
    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn center(&self, idx: usize) -> [f64; 2] {
        let (ix, iy) = self.coords(idx);
        let y = if self.dim == 1 {
            0.0
        } else {
            self.origin[1] + (iy as f64 + 0.5) * self.h
        };
        [self.origin[0] + (ix as f64 + 0.5) * self.h, y]
    }

    /// Tight bounding box of interior cells, `(ix0, iy0, ix1, iy1)` inclusive.
    pub fn interior_extent(&self) -> (usize, usize, usize, usize) {
        let mut e = (usize::MAX, usize::MAX, 0, 0);
        for &i in &self.interior {
            let (ix, iy) = self.coords(i);
            e.0 = e.0.min(ix);
            e.1 = e.1.min(iy);
            e.2 = e.2.max(ix);
            e.3 = e.3.max(iy);
        }
        e
    }

    /// Same mask with the origin moved by a whole number of cells.
    pub fn translated_cells(&self, dx: i64, dy: i64) -> GridDomain {
        let mut out = self.clone();
        out.origin[0] += dx as f64 * self.h;
        if self.dim == 2 {
            out.origin[1] += dy as f64 * self.h;
        }
        out
    }

    /// A domain on the same box with a different mask.
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<GridDomain> {
        GridDomain::from_mask(self.dim, self.h, (self.nx, self.ny), self.origin, mask)
    }

    /// Whether two domains share spacing, box and origin.
    pub fn same_grid(&self, other: &GridDomain) -> bool {
        self.dim == other.dim
            && self.h == other.h
            && self.nx == other.nx
            && self.ny == other.ny
            && self.origin == other.origin
    }

    /// Binary PGM of the mask (interior white), top row = largest y.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "P5\n{} {}\n255", self.nx, self.ny)?;
        let mut row = vec![0u8; self.nx];
        for iy in (0..self.ny).rev() {
            for (ix, px) in row.iter_mut().enumerate() {
                *px = if self.mask[self.index(ix, iy)] { 255 } else { 0 };
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

/// Rasterize `spec` at spacing `h`.
///
/// The box is centered on the shape's bounding-box center, which is placed
/// on a cell corner, and carries an exterior collar of at least
/// `max(1, ceil(0.1 · diam / h))` cells.
pub fn build_grid_domain(spec: &ShapeSpec, h: f64) -> Result<GridDomain> {
    build_grid_domain_offset(spec, h, [0.0; 2])
}

/// Like [`build_grid_domain`] with the cell lattice moved by `offset`
/// (in cells, each component in `[0, 1)`) relative to the shape.
pub fn build_grid_domain_offset(spec: &ShapeSpec, h: f64, offset: [f64; 2]) -> Result<GridDomain> {
    if offset.iter().any(|o| !(0.0..1.0).contains(o)) {
        return Err(Error::InvalidShape(format!("lattice offset {offset:?} outside [0, 1)")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidShape(format!("spacing {h} must be positive")));
    }
    spec.validate()?;
    let dim = spec.dim();
    let (lo, hi) = spec.bounds();
    let diam = spec.diameter();
    let shifted = offset != [0.0; 2];
    let margin = ((0.1 * diam / h).ceil() as usize).max(1) + usize::from(shifted);
    let mut n = [1usize; 2];
    let mut origin = [0.0; 2];
    for k in 0..dim {
        let c = 0.5 * (lo[k] + hi[k]);
        let e = 0.5 * (hi[k] - lo[k]);
        let half = (e / h).ceil() as usize + margin;
        n[k] = 2 * half;
        origin[k] = c - (half as f64 + offset[k]) * h;
    }
    let cells = n[0] * n[1];
    if cells > 1 << 28 {
        return Err(Error::InvalidShape(format!(
            "grid of {} x {} cells is too large",
            n[0], n[1]
        )));
    }
    let mut mask = vec![false; cells];
    for (idx, m) in mask.iter_mut().enumerate() {
        let (ix, iy) = (idx % n[0], idx / n[0]);
        let p = [
            origin[0] + (ix as f64 + 0.5) * h,
            if dim == 1 {
                0.0
            } else {
                origin[1] + (iy as f64 + 0.5) * h
            },
        ];
        *m = spec.contains(p);
    }
    GridDomain::from_mask(dim, h, (n[0], n[1]), origin, mask).map_err(|e| match e {
        Error::EmptyDomain(_) => Error::EmptyDomain(format!(
            "shape has no cell center at spacing {h}; refine the grid"
        )),
        other => other,
    })
}
