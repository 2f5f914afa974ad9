//! Sparse recovery by iteratively reweighted least squares.
//!
//! Two smoothing schedules are provided: the classical rule
//! `ε ← min{ε, r_{K+1}(x)/N}` and a modified rule
//! `ε ← min{ε, η(1−γ)σ_K(x)/N}` that converges whenever the measurement
//! matrix has the null space property of order `K` with constant `γ`. The
//! [`instances`] module builds the explicit ℓ1-regression family on which the
//! classical rule stalls at a nonzero error, together with the scalar
//! recursion that predicts the stall exactly; [`experiments`] reproduces the
//! numerical studies around both algorithms.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod instances;
pub mod io;
pub mod irls;
pub mod numkernel;
pub mod problem;
pub mod rng;

pub use error::{Error, Result};
pub use irls::{IrlsConfig, IrlsResult, Status, Variant};
pub use numkernel::DenseMatrix;
pub use problem::{CsInstance, RegressionInstance};
