//! Deterministic numerics: lattice Green's functions through the Bessel
//! representation, the axis-sum bound chain, volume growth and isoperimetric
//! profiles.

mod bessel;
mod green;
mod growth;
mod quadrature;

pub use bessel::{bessel_i0, bessel_i0_asymptotic, bessel_i0_scaled, bessel_i0_series, SWITCHOVER};
pub use green::{
    dhat, dhat2_integral, green0, green2, remco_bound, remco_sweep_csv, RemcoBoundReport, DEFAULT_O_BETA_CONSTANT,
};
pub use growth::{cheeger_profile, profile_csv, volume_growth_profile, volume_growth_profile_capped, GrowthMethod, GrowthProfile};
pub use quadrature::{gauss_kronrod_15, integrate_adaptive, integrate_uniform, QuadratureResult};

use thiserror::Error;

use crate::graphs::GraphError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("the integral diverges in dimension {d} (needs d >= {min})")]
    Divergent { d: u32, min: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
