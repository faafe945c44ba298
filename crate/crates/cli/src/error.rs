use perclab_core::analytics::AnalyticsError;
use perclab_core::branching::BranchingError;
use perclab_core::clusters::ClusterError;
use perclab_core::graphs::GraphError;
use perclab_core::percolation::PercolationError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("population cap exceeded: {0}")]
    Cap(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("version mismatch: summary was written by {summary}, this is {running}")]
    VersionMismatch { summary: String, running: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Cap(_) => 4,
            CliError::VersionMismatch { .. } => 5,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::TooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<PercolationError> for CliError {
    fn from(e: PercolationError) -> Self {
        match e {
            PercolationError::Graph(g) => g.into(),
            PercolationError::NonBracketing { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::Graph(g) => g.into(),
            ClusterError::Percolation(p) => p.into(),
            ClusterError::InvalidParameter(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<BranchingError> for CliError {
    fn from(e: BranchingError) -> Self {
        match e {
            BranchingError::Graph(g) => g.into(),
            BranchingError::Percolation(p) => p.into(),
            BranchingError::InvalidParameter(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::Divergent { .. } => CliError::Numeric(e.to_string()),
            AnalyticsError::Graph(g) => g.into(),
            AnalyticsError::InvalidParameter(_) => CliError::Config(e.to_string()),
        }
    }
}
