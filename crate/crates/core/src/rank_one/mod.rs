//! Rank-one cutting-and-stacking transformations built from spacer plans.
//!
//! Stage `j` is a tower of `h_j` levels of width `w_j`. To form stage
//! `j + 1` the tower is cut into `r_j = 3L_j` equal columns, `s_j[c]`
//! spacer levels are placed on top of column `c`, and the columns are
//! stacked left to right. The transformation moves each point one level up.
//! Points are embedded in `[0, μ_total)`: stage-0 level `ℓ` is `[ℓ, ℓ + 1)`,
//! and the `k`-th spacer created at stage `j + 1` is
//! `[μ_j + k w_{j+1}, μ_j + (k + 1) w_{j+1})`.

mod columns;
mod correlation;
mod level_set;
mod orbit;
mod plan;
mod tower;

pub use columns::{certified_shift_difference, column_bases, column_bases_union};
pub use correlation::{
    certified_correlation, certified_correlation_dense, CertifiedMeasure, Correlator,
};
pub use level_set::LevelSet;
pub use orbit::{coordinate, locate, orbit_point, point_in_set, Located};
pub use plan::{Height, SpacerPlan, StageSpec};
pub use tower::{
    build_tower, mixing_sequence_n, Classification, Tower, TowerLimits, TowerStage,
    DEFAULT_LEVEL_CAP, DEFAULT_STAGE_CAP,
};
