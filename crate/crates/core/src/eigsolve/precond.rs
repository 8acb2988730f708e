use crate::mixedop::MixedOperator;

/// Incomplete Cholesky factor of `a·(-Δ_h) + c·I` in natural cell order.
///
/// With relaxation `ω > 0` a fraction of the dropped fill is moved to the
/// diagonal (ω = 0 is plain IC(0), ω = 1 the modified factorization).
#[derive(Debug, Clone)]
pub struct IncompleteCholesky {
    diag: Vec<f64>,
    /// Off-diagonal value shared by all stencil neighbours.
    off: f64,
    lower: Vec<[u32; 2]>,
    upper: Vec<[u32; 2]>,
}

const NONE: u32 = u32::MAX;

impl IncompleteCholesky {
    pub fn new(op: &MixedOperator, relaxation: f64) -> Self {
        let h2 = op.domain().spacing().powi(2);
        let a = op.local_scale();
        let dim = op.domain().dim() as f64;
        let shift = op.nonlocal_scale() * op.nonlocal_diagonal();
        let off = -a / h2;
        let nb = op.neighbours();
        let n = nb.len();
        let slots = 2 * dim as usize;
        let lower: Vec<[u32; 2]> = nb.iter().map(|q| [q[0], q[2]]).collect();
        let upper: Vec<[u32; 2]> = nb.iter().map(|q| [q[1], q[3]]).collect();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let exterior = nb[i][..slots].iter().filter(|&&j| j == NONE).count();
            let centre = a * (2.0 * dim + exterior as f64) / h2 + shift;
            let mut d = centre;
            let [w, s] = lower[i];
            if w != NONE {
                let w = w as usize;
                d -= off * off / diag[w];
                // Fill from the west neighbour lands at its +y neighbour.
                if upper[w][1] != NONE {
                    d -= relaxation * off * off / diag[w];
                }
            }
            if s != NONE {
                let s = s as usize;
                d -= off * off / diag[s];
                if upper[s][0] != NONE {
                    d -= relaxation * off * off / diag[s];
                }
            }
            diag[i] = d.max(1e-3 * centre);
        }
        Self {
            diag,
            off,
            lower,
            upper,
        }
    }

    /// `z = M⁻¹ r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        for i in 0..n {
            let mut acc = r[i];
            for &j in &self.lower[i] {
                if j != NONE {
                    acc -= self.off * z[j as usize];
                }
            }
            z[i] = acc / self.diag[i];
        }
        for i in (0..n).rev() {
            let mut acc = 0.0;
            for &j in &self.upper[i] {
                if j != NONE {
                    acc += self.off * z[j as usize];
                }
            }
            z[i] -= acc / self.diag[i];
        }
    }
}
