//! Window-scale statistics of open clusters: how many clusters join an inner
//! ball to a far boundary, trifurcation points, the annulus escape events of a
//! product with Z, and bounded edge cutsets.
//!
//! Reaching the boundary of a window stands in for being infinite.

mod annulus;
mod cutset;
mod trichotomy;
mod trifurcation;

pub use annulus::{annulus_escape_events, AnnulusReport};
pub use cutset::{find_bounded_cutset, verify_cutset, CutsetCertificate, CutsetSearch, CutsetVerdict};
pub use trichotomy::{boundary_cluster_count, boundary_clusters_in, TrichotomyReport};
pub use trifurcation::{is_trifurcation, trifurcation_count};

use thiserror::Error;

use crate::graphs::GraphError;
use crate::percolation::PercolationError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Percolation(#[from] PercolationError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
