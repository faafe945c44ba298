//! Bernoulli bond percolation on finite windows.
//!
//! Edge `e` of a window is open in replica `r` iff `U(seed, r, e) < p`, with
//! `U` the keyed uniform from [`crate::rng::uniform_at`]. Raising `p` with the
//! seed held fixed only ever opens edges.

mod crossing;
mod estimate;
mod sample;

pub use crossing::{crossing_probability, crossing_thresholds, estimate_pc, estimate_pc_within, CrossingBox, PcEstimate};
pub use estimate::{sweep_csv, two_point_estimate, Estimate};
pub use sample::{clusters, sample_bonds, ClusterLabeling, EdgeWeights, PercolationSample};

use thiserror::Error;

use crate::graphs::GraphError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PercolationError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} is outside the estimation window")]
    OutsideWindow(String),
    #[error("unsupported graph for this estimator: {0}")]
    UnsupportedSpec(String),
    #[error("interval [{lo}, {hi}] does not bracket the target (values {f_lo}, {f_hi})")]
    NonBracketing { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn check_probability(p: f64) -> Result<(), PercolationError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(PercolationError::InvalidProbability(p))
    }
}
