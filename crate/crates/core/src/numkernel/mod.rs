//! Dense linear algebra and the scalar functionals the IRLS iterations are
//! built from.

mod cholesky;
mod functionals;
mod matrix;
mod solve;

pub use cholesky::{Cholesky, PIVOT_RELATIVE_THRESHOLD};
pub use functionals::{
    nonincreasing_rearrangement, rearrangement_entry, sigma_tail, smoothed_objective, weighted_inner, weighted_norm,
    WeightVector,
};
pub use matrix::{dot, norm1, norm2, norm_inf, sub, DenseMatrix};
pub use solve::{constrained_weighted_ls, orthogonal_complement, weighted_regression_ls, FEASIBILITY_TOLERANCE};
