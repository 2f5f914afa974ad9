//! Problem constructors: the adversarial regression family and its scalar
//! oracle, random Gaussian instances, perturbations, and NSP sampling.

mod counterexample;
mod gaussian;
mod nsp;
mod oracle;
mod serialize;

pub use counterexample::{
    build_a_gamma, build_counterexample, build_regression_family, build_tilde_a, critical_gamma, derived_constants,
    enforce_positive, marked_rows_indicator, random_positive_z_star, rhs_for, row_count, CounterexampleInstance,
    CounterexampleParams,
};
pub use gaussian::{perturb_counterexample, random_gaussian_instance, random_gaussian_instance_from};
pub use nsp::{binomial, feasible_bound_diagnostic, nsp_check, FeasibleBoundDiagnostic, NspReport, NspWitness};
pub use oracle::{scalar_recursion_oracle, OracleStep};
pub use serialize::{counterexample_params, fmt17, write_counterexample, write_cs_instance, write_regression_instance};
