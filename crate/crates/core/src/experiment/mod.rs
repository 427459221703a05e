//! Monte Carlo runs of the two measurement contexts.
//!
//! A run draws independent trials under either quantum mechanics or the
//! noncontextual hidden-variable model, pushes each through a lossy detection
//! layer and tallies the clicks. The estimator turns the tallies of both
//! contexts into the three ensemble averages and the inequality's left-hand
//! side; [`analytic_prediction`] gives the exact expectation of the same
//! quantities.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hilbert::HilbertError;
use crate::nchv::AssignmentDistribution;
use crate::optics::NetworkError;

mod analytic;
pub mod csv;
pub mod detection;
mod engine;
mod estimate;
mod imperfection;
mod sweep;

pub use crate::observables::MeasurementContext as Context;
pub use analytic::{analytic_prediction, analytic_prediction_with, AnalyticPrediction};
pub use engine::{
    prepared_density, run_experiment, run_experiment_with, simulate_trial, trial_rng, Click, CountsTable, Outcome,
    TrialRecord, TrialSampler,
};
pub use estimate::{estimate_averages, estimate_averages_with, InequalityReport, Moments, NCHV_BOUND};
pub use imperfection::{ImperfectionModel, ParamIssue};
pub use sweep::{run_inequality, sweep, ExperimentRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theory {
    Qm,
    Nchv,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::Qm => "QM",
            Theory::Nchv => "NCHV",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown theory `{0}` (expected QM or NCHV)")]
pub struct UnknownTheory(pub String);

impl FromStr for Theory {
    type Err = UnknownTheory;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "QM" => Ok(Theory::Qm),
            "NCHV" => Ok(Theory::Nchv),
            _ => Err(UnknownTheory(s.to_string())),
        }
    }
}

/// Settings that are not physical parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    /// Hidden-variable ensemble sampled under [`Theory::Nchv`].
    pub ensemble: AssignmentDistribution,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
    /// Condition the averages on detection.
    pub fair_sampling: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { ensemble: AssignmentDistribution::default(), workers: None, fair_sampling: true }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParameters(Vec<ParamIssue>),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("a run needs at least one trial")]
    ZeroTrials,
    #[error("no detected counts in context {0}")]
    InsufficientData(Context),
    #[error("expected counts of context {expected}, got context {found}")]
    WrongContext { expected: Context, found: Context },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("csv: {0}")]
    Csv(#[from] ::csv::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

fn join(issues: &[ParamIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
