//! Iteratively reweighted least squares for basis pursuit and ℓ1 regression.
//!
//! Both algorithms share one engine: at iterate `x^n` with smoothing `ε_n`
//! the weights `w_i = (x_i² + ε_n²)^{-1/2}` define a weighted least-squares
//! problem whose solution is `x^{n+1}`, after which `ε` is shrunk by the
//! selected [`Variant`]'s rule. The run stops when `ε` hits zero, the step
//! falls below `step_tol`, the ground-truth error reaches `success_tol`, or
//! `max_iter` is exhausted.

mod certificate;
mod config;
mod engine;
mod eps;
mod trace;

pub use certificate::{contraction_factor, linear_rate_certificate, LinearRateReport, DEFAULT_PRECISION_FLOOR};
pub use config::{IrlsConfig, Variant, DEFAULT_EPS0, DEFAULT_ETA, DEFAULT_GAMMA, DEFAULT_MAX_ITER, DEFAULT_STEP_TOL};
pub use engine::{
    run_irls_cs, run_irls_cs_from, run_irls_l1r, run_irls_l1r_from, run_irls_l1r_observed, IrlsResult, Observer,
};
pub use eps::{eps_update_ddfg, eps_update_modified, eps_update_scaled, weights_from_iterate, EpsPolicy};
pub use trace::{IterRecord, IterationTrace, Snapshot, Status, TRACE_CSV_HEADER};
