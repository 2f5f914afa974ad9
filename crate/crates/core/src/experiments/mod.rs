//! Seeded reproductions of the five numerical studies, at desk or full scale.
//!
//! | id | study |
//! |----|-------|
//! | E1 | both schedules on the stall instance, with the scalar oracle alongside |
//! | E2 | classical schedule over a γ sweep around the critical value |
//! | E3 | classical schedule on randomly perturbed stall instances |
//! | E4 | success rates over a `(K, γ)` grid on Gaussian instances |
//! | E5 | recovery rate and mean error per iteration on Gaussian instances |

mod protocols;
mod report;
mod spec;

pub use protocols::{run_experiment, START_STD};
pub use report::{
    aggregate, aggregate_csv, recovery_csv, recovery_statistics, trials_csv, write_report, AggregateRow, CellKey,
    ExperimentReport, RecoveryPoint, TrialRow, TrialStatus,
};
pub use spec::{
    gamma_sweep, ExperimentId, ExperimentSpec, Overrides, ResolvedSpec, Scale, DEFAULT_SUCCESS_TOL, DESK_MAX_ITER,
    EXPERIMENT_ETA, FULL_MAX_ITER,
};
