//! Generalized energy distances and halfspace discrepancies between empirical measures.
//!
//! The crate is organised around [`EmpiricalMeasure`], a weighted point cloud, and a validated
//! exponent [`GammaOrder`]. On top of those sit:
//!
//! * [`energy`]: pairwise V/U-statistics, the kernel (MMD) form, location gradients and
//!   population oracles for the generalized energy distance `E_γ`;
//! * [`sliced`]: one-dimensional projections, the exact CDF formula for `γ = 1` and the
//!   Monte Carlo sliced estimator;
//! * [`halfspace`]: the perceptron discrepancy (exact in one and two dimensions, random-direction
//!   heuristic otherwise) and the ramp-feature statistics `T_{d,k}`;
//! * [`spectral`]: weighted Fourier norms and the oscillating one-dimensional density pair used to
//!   probe how sharp the comparison inequalities are;
//! * [`estimation`]: minimum-energy fitting of generators by gradient descent, error-correcting
//!   codebooks with a simplex-constrained discrete estimator, and the training stopping rule;
//! * [`testing`]: permutation two-sample tests and power curves.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod estimation;
pub mod halfspace;
pub mod measures;
pub mod numerics;
pub mod rng;
pub mod sliced;
pub mod spectral;
pub mod testing;

pub use energy::GammaOrder;
pub use error::{Error, Result};
pub use measures::{DistributionSpec, EmpiricalMeasure};

/// Library version string embedded in experiment outputs.
pub const VERSION: &str = concat!("energy-core ", env!("CARGO_PKG_VERSION"));
