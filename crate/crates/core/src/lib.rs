//! Sampling and approximate counting for monomer-dimer systems on planar
//! graphs, nonsymmetric determinantal point processes and partition-constrained
//! distributions, driven by down-up random walks over fixed-size subsets.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: embedded planar graphs, faces, matchings, built-in families.
//! * [`fkt`]: Pfaffian orientations and exact perfect-matching sums.
//! * [`densities`]: the [`Density`] oracle abstraction and its instances.
//! * [`walk`]: the down-up chain, exact transition matrices and spectral gaps.
//! * [`diagnostics`]: correlation and influence matrices and the bounds they obey.
//! * [`counting`]: self-reducible counting, k-matching counts, mixed derivatives.

pub mod counting;
pub mod densities;
pub mod diagnostics;
pub mod error;
pub mod fkt;
pub mod graph;
pub mod linalg;
pub mod rng;
pub mod subsets;
pub mod walk;

pub use counting::{CountConfig, CountEstimate};
pub use densities::{Density, DensityRef};
pub use diagnostics::Distribution;
pub use error::{Error, Result};
pub use graph::{EmbeddedGraph, Matching};
pub use walk::WalkConfig;
