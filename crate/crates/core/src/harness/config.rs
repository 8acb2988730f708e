use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eigsolve::SolverOptions;
use crate::gridcore::ShapeSpec;
use crate::mixedop::NonlocalPath;
use crate::{Error, Result};

fn default_s() -> f64 {
    0.25
}
fn one() -> f64 {
    1.0
}
fn default_slack() -> f64 {
    crate::rearrange::DEFAULT_SLACK
}
fn default_seed() -> u64 {
    20_240_601
}

/// Configuration shared by every experiment; per-experiment knobs live in
/// optional sections. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Free-form label copied into the CSV header.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_s")]
    pub s: f64,
    /// Grid spacing; `h_list` takes precedence when nonempty.
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub h_list: Vec<f64>,
    #[serde(default = "one")]
    pub local_scale: f64,
    #[serde(default = "one")]
    pub nonlocal_scale: f64,
    #[serde(default)]
    pub domains: Vec<ShapeSpec>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub nonlocal_path: NonlocalPath,
    /// Relative slack of soft comparisons.
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Worker threads (0 = library default).
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub fk_sweep: FkSweepConfig,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub superlevel: SuperlevelConfig,
    #[serde(default)]
    pub level_profile: LevelProfileConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub counterexample: CounterexampleConfig,
    #[serde(default)]
    pub hopf: HopfConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FkSweepConfig {
    /// Ellipses of the given aspect ratios and common area are appended to
    /// the explicit domains.
    pub aspects: Vec<f64>,
    pub area: f64,
    pub polya_szego: bool,
}

impl Default for FkSweepConfig {
    fn default() -> Self {
        Self {
            aspects: Vec::new(),
            area: PI,
            polya_szego: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    /// Perturbed disks `ρ < radius (1 + a cos(mode θ))`.
    pub amplitudes: Vec<f64>,
    pub mode: u32,
    pub radius: f64,
    /// Vertices of the boundary polygonization used for the ball defects.
    pub polygon_vertices: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            amplitudes: vec![0.0, 0.02, 0.04, 0.08],
            mode: 2,
            radius: 1.0,
            polygon_vertices: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuperlevelConfig {
    /// Explicit levels; when empty a geometric grid of `levels` values below
    /// `max_fraction · m^{-1/2} / 2` down to `min_ratio` times that is used.
    pub deltas: Vec<f64>,
    pub levels: usize,
    pub max_fraction: f64,
    pub min_ratio: f64,
    /// Convexity threshold is `1 - convexity_factor · h`.
    pub convexity_factor: f64,
    /// Number of smallest levels subject to the convexity check.
    pub convexity_levels: usize,
}

impl Default for SuperlevelConfig {
    fn default() -> Self {
        Self {
            deltas: Vec::new(),
            levels: 12,
            max_fraction: 0.95,
            min_ratio: 1e-3,
            convexity_factor: 5.0,
            convexity_levels: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelProfileConfig {
    pub levels: usize,
}

impl Default for LevelProfileConfig {
    fn default() -> Self {
        Self { levels: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub ts: Vec<f64>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            ts: vec![0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub hull_deltas: Vec<f64>,
    /// Minimum arc resolution; raised per δ until the polygonization error
    /// is below 1% of the added area.
    pub arc_vertices: usize,
    pub bump_deltas: Vec<f64>,
    pub bump_samples: usize,
    pub random_polygons: usize,
    pub polygon_points: usize,
    pub eps_hats: Vec<f64>,
    /// Target slope of the outer defect against ε and its tolerance.
    pub slope_target: f64,
    pub slope_tol: f64,
    /// Absolute tolerance of the Bonnesen check.
    pub bonnesen_tol: f64,
    /// When set, principal eigenvalues of the counterexample bodies and of
    /// the equal-area disk are computed at this spacing.
    pub eigen_h: Option<f64>,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            hull_deltas: vec![1e-2, 10f64.powf(-2.5), 1e-3, 10f64.powf(-3.5), 1e-4],
            arc_vertices: crate::convexgeom::DEFAULT_ARC_VERTICES,
            bump_deltas: vec![1e-2, 1e-3],
            bump_samples: 4096,
            random_polygons: 200,
            polygon_points: 24,
            eps_hats: vec![0.2, 0.1, 0.05, 0.02, 0.01],
            slope_target: 2.0 / 3.0,
            slope_tol: 0.1,
            bonnesen_tol: 1e-12,
            eigen_h: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HopfConfig {
    pub samples: usize,
}

impl Default for HopfConfig {
    fn default() -> Self {
        Self { samples: 64 }
    }
}

pub const DEFAULT_H: f64 = 1.0 / 64.0;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Spacings to run, in order.
    pub fn spacings(&self) -> Vec<f64> {
        if self.h_list.is_empty() {
            vec![self.h.unwrap_or(DEFAULT_H)]
        } else {
            self.h_list.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s = {} must lie in (0, 1)", self.s));
        }
        for h in self.spacings() {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("h = {h} must be positive"));
            }
        }
        for (name, v) in [("local_scale", self.local_scale), ("nonlocal_scale", self.nonlocal_scale)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be >= 0"));
            }
        }
        if self.local_scale == 0.0 {
            return bad("local_scale must be positive for the eigensolver".into());
        }
        if !(self.slack >= 0.0) {
            return bad(format!("slack = {} must be >= 0", self.slack));
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return bad("solver tolerance and iteration cap must be positive".into());
        }
        for d in &self.domains {
            d.validate().map_err(|e| Error::Config(format!("domain {d:?}: {e}")))?;
        }
        if self.fk_sweep.aspects.iter().any(|&a| !(a > 0.0)) || !(self.fk_sweep.area > 0.0) {
            return bad("fk_sweep aspects and area must be positive".into());
        }
        if self.stability.amplitudes.iter().any(|a| !(a.abs() < 1.0)) {
            return bad("stability amplitudes must be below 1 in magnitude".into());
        }
        if self.superlevel.deltas.iter().any(|&d| !(d >= 0.0)) {
            return bad("superlevel deltas must be nonnegative".into());
        }
        if self.level_profile.levels < 3 {
            return bad("level_profile.levels must be at least 3".into());
        }
        if self.scaling.ts.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return bad("scaling factors must lie in (0, 1]".into());
        }
        let ce = &self.counterexample;
        if ce.hull_deltas.iter().chain(&ce.bump_deltas).any(|&d| !(d > 0.0 && d < 0.25)) {
            return bad("counterexample deltas must lie in (0, 1/4)".into());
        }
        Ok(())
    }

    /// Check (and create) an output directory.
    pub fn prepare_output(dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        let probe = dir.join(".write-probe");
        std::fs::write(&probe, b"")
            .map_err(|e| Error::Config(format!("{} is not writable: {e}", dir.display())))?;
        let _ = std::fs::remove_file(probe);
        Ok(())
    }
}
