//! Planar last-passage percolation laboratory.
//!
//! The crate computes last-passage values and geodesics over i.i.d. weight
//! fields, tracks midpoint and endpoint transversal statistics, and estimates
//! the associated tail probabilities and decay rates by replicated Monte
//! Carlo with optional importance sampling. An independent oracle layer
//! (path enumeration, exact combinatorics of the uniform walk, Gamma tails)
//! backs the test suite.
//!
//! Numeric kernels are generic over the [`real::Real`] scalar; the aliases
//! below fix the default `f64` instantiation. Statistics (probabilities,
//! intervals, rates) are always `f64`.

// negated comparisons reject NaN parameters along with the out-of-range ones
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corridor;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod field;
pub mod lattice;
pub mod oracle;
pub mod parallel;
pub mod passage;
pub mod real;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::Point;
pub use real::Real;

/// Default scalar for weights and passage values.
pub type Scalar = f64;

pub type WeightDistribution = distributions::WeightDistribution<Scalar>;
pub type WeightField = field::WeightField<Scalar>;
pub type PassageResult = passage::PassageResult<Scalar>;

pub type WeightDistribution32 = distributions::WeightDistribution<f32>;
pub type WeightField32 = field::WeightField<f32>;
pub type PassageResult32 = passage::PassageResult<f32>;
