//! The modified branching random walk on a product with Z, the offspring law
//! it dominates, Galton-Watson survival and the transience series.

mod brw;
mod dominating;
mod law;
mod series;
mod slab;

pub use brw::{
    brw_step, open_cluster, simulate_brw, simulate_coupled_brw, BrwConfig, BrwRun, CoupledRun, ParticleFront,
};
pub use dominating::{dominating_expected_returns, dominating_mean_returns, simulate_dominating, DominatingMean, DominatingRun};
pub use law::{dominance_test, survival_probability, DiscreteLaw, DominanceResult, OffspringLawU, SurvivalEstimate};
pub use series::{expected_returns_series, ReturnsSeries};
pub use slab::{offspring_simulation, OffspringReport, Slab};

use thiserror::Error;

use crate::graphs::GraphError;
use crate::percolation::PercolationError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BranchingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Percolation(#[from] PercolationError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn binomial(rng: &mut impl rand::Rng, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        rand_distr::Distribution::sample(&rand_distr::Binomial::new(n, p).expect("valid binomial"), rng)
    }
}
