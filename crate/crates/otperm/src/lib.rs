//! Multivariate permutation tests whose p-values come from optimally
//! transporting permuted test-statistic vectors onto regular grids in the
//! unit ball.
//!
//! The crate is organized bottom-up:
//!
//! - [`lowdisc`]: low-discrepancy point sets in the unit cube (good-lattice
//!   points, Halton) and maps from the cube onto the unit sphere.
//! - [`grids`]: product and non-product grids in the unit ball, full,
//!   positive-orthant, and mixed variants.
//! - [`transport`]: minimum-cost assignment between a sample and a grid
//!   (the empirical center-outward distribution function).
//! - [`stats`]: grouped samples, test-statistic vectors, permutation
//!   ensembles, partial p-values, and combining functions.
//! - [`pipeline`]: the end-to-end tests — transport of statistic vectors,
//!   transport of complemented partial p-values, and nonparametric
//!   combination.
//! - [`sim`]: Monte Carlo power studies over a built-in scenario catalog,
//!   data-parallel over replicates when the `parallel` feature is enabled.
//!
//! All randomized steps take explicit seeds and produce identical results
//! whether run sequentially or in parallel.

pub mod error;
pub mod grids;
pub mod lowdisc;
mod matrix;
pub mod pipeline;
pub mod seeding;
pub mod sim;
pub mod stats;
pub mod transport;

pub use error::{Error, Result};
pub use matrix::Matrix;
