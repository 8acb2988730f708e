//! Configuration, experiment runners and CSV output.

mod common;
mod config;
mod experiments;
mod level;
mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

pub use common::{
    ball_reference, equal_volume_ball, margin_verdict, operator_for, operator_on, shape_label, shape_measure, solve,
    BallReference, Solved,
};
pub use config::{
    CounterexampleConfig, ExperimentConfig, FkSweepConfig, HopfConfig, LevelProfileConfig, ScalingConfig,
    StabilityConfig, SuperlevelConfig, DEFAULT_H,
};
pub use experiments::{
    ellipse_family, run_counterexample, run_eig, run_fk_sweep, run_hopf, run_level_profile, run_scaling,
    run_stability, run_superlevel, superlevel_bound_factor, superlevel_deltas, CounterexampleRow, EigRow,
    FkRow, HopfRow, LevelProfileRow, ScalingRow, StabilityRow, SuperlevelRow,
};
pub use level::{ball_perimeter, level_profile, LevelProfile, LevelRow};
pub use report::{loglog_fit, PlotSeries, Report, Status};

use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Eig,
    FkSweep,
    Stability,
    Superlevel,
    LevelProfile,
    Scaling,
    Counterexample,
    Hopf,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Eig,
        Experiment::FkSweep,
        Experiment::Stability,
        Experiment::Superlevel,
        Experiment::LevelProfile,
        Experiment::Scaling,
        Experiment::Counterexample,
        Experiment::Hopf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Eig => "eig",
            Experiment::FkSweep => "fk-sweep",
            Experiment::Stability => "stability",
            Experiment::Superlevel => "superlevel",
            Experiment::LevelProfile => "level-profile",
            Experiment::Scaling => "scaling",
            Experiment::Counterexample => "counterexample",
            Experiment::Hopf => "hopf",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: Experiment,
    pub status: Status,
    pub rows: usize,
    pub files: Vec<PathBuf>,
}

fn finish<R: Serialize>(
    experiment: Experiment,
    report: Report<R>,
    cfg: &ExperimentConfig,
    out: &Path,
    plot_data: bool,
) -> Result<RunSummary> {
    let files = report.write_to(out, cfg.name.as_deref(), plot_data)?;
    Ok(RunSummary {
        experiment,
        status: report.status,
        rows: report.rows.len(),
        files,
    })
}

/// Validate `cfg`, run one experiment with the configured thread count and
/// write its CSV (plus plot series) into `out`.
pub fn run_experiment(
    experiment: Experiment,
    cfg: &ExperimentConfig,
    out: &Path,
    plot_data: bool,
) -> Result<RunSummary> {
    cfg.validate()?;
    ExperimentConfig::prepare_output(out)?;
    par::with_threads(cfg.threads, || match experiment {
        Experiment::Eig => finish(experiment, run_eig(cfg)?, cfg, out, plot_data),
        Experiment::FkSweep => finish(experiment, run_fk_sweep(cfg)?, cfg, out, plot_data),
        Experiment::Stability => finish(experiment, run_stability(cfg)?, cfg, out, plot_data),
        Experiment::Superlevel => finish(experiment, run_superlevel(cfg)?, cfg, out, plot_data),
        Experiment::LevelProfile => finish(experiment, run_level_profile(cfg)?, cfg, out, plot_data),
        Experiment::Scaling => finish(experiment, run_scaling(cfg)?, cfg, out, plot_data),
        Experiment::Counterexample => finish(experiment, run_counterexample(cfg)?, cfg, out, plot_data),
        Experiment::Hopf => finish(experiment, run_hopf(cfg)?, cfg, out, plot_data),
    })
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_HARD_FAIL: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CONFIG: i32 = 64;

/// Process exit code for a run outcome.
pub fn exit_code(outcome: &Result<RunSummary>) -> i32 {
    match outcome {
        Ok(s) => match s.status {
            Status::Pass | Status::Inconclusive => EXIT_OK,
            Status::Fail => EXIT_HARD_FAIL,
            Status::SolverFailure => EXIT_SOLVER,
        },
        Err(Error::NoConvergence { .. } | Error::Indefinite(_)) => EXIT_SOLVER,
        Err(_) => EXIT_CONFIG,
    }
}
