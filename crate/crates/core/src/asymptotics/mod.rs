//! Convergence tables and asymmetry experiments on rank-one towers.
//!
//! Every quantity is an exact certified interval from the correlation
//! engine; a row's `certified_gap` is the largest possible distance between
//! the true left- and right-hand sides given both intervals.

mod mixing;
mod presets;
mod runs;
mod tables;
mod tolerances;

pub use mixing::{find_mixing_times, select_schedule, MixingTarget, MixingTime};
pub use presets::{
    random_level_set, random_set_with_measure, theorem2_plan, theorem3_plan, theorem4_plan,
    THEOREM3_N_MAX,
};
pub use runs::{theorem3_run, theorem4_run, AsymmetryReport, AsymmetryRow, GeneralTargets};
pub use tables::{
    backward_table, rows_to_csv, rows_to_json, table_verdict, theorem2_table, weak_limit_check,
    ConvergenceRow, CSV_HEADER,
};
pub use tolerances::Tolerances;
