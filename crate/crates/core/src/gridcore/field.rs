use std::io::Write;
use std::sync::Arc;

use crate::gridcore::GridDomain;
use crate::{Error, Result};

/// Grid function on the box of a [`GridDomain`], zero off the interior.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wrap `values`; rejects non-finite entries and nonzero exterior values.
    pub fn new(domain: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidField(format!(
                "{} values for a box of {} cells",
                values.len(),
                domain.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("value at cell {i} is not finite")));
        }
        if let Some(i) = (0..values.len()).find(|&i| !domain.is_interior(i) && values[i] != 0.0) {
            return Err(Error::InvalidField(format!(
                "exterior cell {i} carries value {}",
                values[i]
            )));
        }
        Ok(Self { domain, values })
    }

    /// Like [`ScalarField::new`] but zeroes exterior cells instead of failing.
    pub fn masked(domain: Arc<GridDomain>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() == domain.len() {
            for (v, &m) in values.iter_mut().zip(domain.mask()) {
                if !m {
                    *v = 0.0;
                }
            }
        }
        Self::new(domain, values)
    }

    pub fn zeros(domain: Arc<GridDomain>) -> Self {
        let values = vec![0.0; domain.len()];
        Self { domain, values }
    }

    /// Sample `f` at interior cell centers.
    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..domain.len())
            .map(|i| {
                if domain.is_interior(i) {
                    f(domain.center(i))
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(Σ u² h^n)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v * v).sum();
        (s * self.domain.cell_measure()).sqrt()
    }

    /// `Σ u v h^n`; both fields must live on the same grid.
    pub fn dot(&self, other: &ScalarField) -> Result<f64> {
        if !self.domain.same_grid(&other.domain) {
            return Err(Error::DomainMismatch);
        }
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(s * self.domain.cell_measure())
    }

    /// Piecewise (bi)linear interpolation through cell-center values; zero
    /// outside the box.
    pub fn interpolate(&self, p: [f64; 2]) -> f64 {
        let d = &*self.domain;
        let h = d.spacing();
        let (nx, ny) = d.shape();
        let o = d.origin();
        let u = (p[0] - o[0]) / h - 0.5;
        let get = |ix: i64, iy: i64| -> f64 {
            if ix < 0 || iy < 0 || ix >= nx as i64 || iy >= ny as i64 {
                0.0
            } else {
                self.values[d.index(ix as usize, iy as usize)]
            }
        };
        let i0 = u.floor();
        let fx = u - i0;
        let i0 = i0 as i64;
        if d.dim() == 1 {
            return get(i0, 0) * (1.0 - fx) + get(i0 + 1, 0) * fx;
        }
        let v = (p[1] - o[1]) / h - 0.5;
        let j0 = v.floor();
        let fy = v - j0;
        let j0 = j0 as i64;
        (get(i0, j0) * (1.0 - fx) + get(i0 + 1, j0) * fx) * (1.0 - fy)
            + (get(i0, j0 + 1) * (1.0 - fx) + get(i0 + 1, j0 + 1) * fx) * fy
    }

    /// Copy of the field scaled so that `Σ u² h^n = 1`.
    pub fn normalized(&self) -> Result<ScalarField> {
        let n = self.l2_norm();
        if n == 0.0 {
            return Err(Error::InvalidField("cannot normalize the zero field".into()));
        }
        Ok(Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v / n).collect(),
        })
    }

    /// 8-bit PGM with values mapped linearly from `[min, max]` to `[0, 255]`.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        let (nx, ny) = self.domain.shape();
        let (lo, hi) = (self.min(), self.max());
        let span = if hi > lo { hi - lo } else { 1.0 };
        writeln!(w, "P5\n{nx} {ny}\n255")?;
        let mut row = vec![0u8; nx];
        for iy in (0..ny).rev() {
            for (ix, px) in row.iter_mut().enumerate() {
                let v = self.values[self.domain.index(ix, iy)];
                *px = (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8;
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridcore::{build_grid_domain, ShapeSpec};

    fn square() -> Arc<GridDomain> {
        Arc::new(
            build_grid_domain(
                &ShapeSpec::Rectangle {
                    w: 1.0,
                    ht: 1.0,
                    center: [0.0; 2],
                },
                0.125,
            )
            .unwrap(),
        )
    }

    #[test]
    fn exterior_values_rejected() {
        let d = square();
        let mut v = vec![0.0; d.len()];
        v[0] = 1.0;
        assert!(ScalarField::new(d.clone(), v.clone()).is_err());
        assert_eq!(ScalarField::masked(d, v).unwrap().max(), 0.0);
    }

    #[test]
    fn nan_rejected() {
        let d = square();
        let mut v = vec![0.0; d.len()];
        v[d.interior()[0]] = f64::NAN;
        assert!(ScalarField::new(d, v).is_err());
    }

    #[test]
    fn interpolation_reproduces_linear_inside() {
        let d = square();
        let f = ScalarField::from_fn(d, |p| 1.0 + 2.0 * p[0] - p[1]).unwrap();
        let v = f.interpolate([0.1, -0.2]);
        assert!((v - (1.0 + 0.2 + 0.2)).abs() < 1e-12);
    }

    #[test]
    fn normalization() {
        let f = ScalarField::from_fn(square(), |p| p[0] + 2.0).unwrap();
        let g = f.normalized().unwrap();
        assert!((g.l2_norm() - 1.0).abs() < 1e-14);
        assert!(ScalarField::zeros(square()).normalized().is_err());
    }
}
