//! Percolation laboratory for trees with lattice insertions and their
//! products with Z.
//!
//! * [`graphs`]: lazily evaluated infinite graphs and finite windows.
//! * [`percolation`]: seeded Bernoulli bond sampling and cluster labelling.
//! * [`clusters`]: boundary-cluster counts, trifurcations, escape events and
//!   bounded edge cutsets.
//! * [`branching`]: the modified branching random walk, offspring laws and
//!   the transience series.
//! * [`analytics`]: Bessel-integral lattice Green's functions, the
//!   axis-sum bound chain, volume growth and isoperimetric profiles.

pub mod analytics;
pub mod branching;
pub mod clusters;
pub mod graphs;
pub mod percolation;
pub mod rng;
pub mod unionfind;

pub use graphs::{GraphSpec, VertexId};
