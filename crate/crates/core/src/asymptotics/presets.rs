use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::rank_one::{Height, LevelSet, SpacerPlan, StageSpec, Tower};
use crate::rational::{int, ratio};
use crate::{Error, Rational, Result};

/// Largest block parameter of the `theorem3` preset.
pub const THEOREM3_N_MAX: u64 = 5;

fn spec(n: u64, l: u64, h: Height) -> StageSpec {
    StageSpec::new(n, l, h).expect("preset stage parameters are positive")
}

/// `N = 1`, `H = 0`, `L_j = j + 2` for `j < stages`.
pub fn theorem2_plan(stages: usize) -> SpacerPlan {
    SpacerPlan::from_fn(1, stages.max(1), |j| {
        spec(1, j as u64 + 2, Height::Fixed(0))
    })
    .unwrap()
}

/// `N_j` cycles through `1..=n_max`, `H = 0`, `L_j = j + 2`.
pub fn theorem3_plan(stages: usize, n_max: u64) -> SpacerPlan {
    SpacerPlan::from_fn(1, stages.max(1), |j| {
        spec(1 + j as u64 % n_max.max(1), j as u64 + 2, Height::Fixed(0))
    })
    .unwrap()
}

/// Auto-height, `N = 1`, `L_0 = L_1 = 1`, `L_j = j` afterwards; stage-2
/// levels have measure 1/9.
pub fn theorem4_plan(stages: usize) -> SpacerPlan {
    SpacerPlan::from_fn(1, stages.max(1), |j| {
        spec(1, (j as u64).max(1), Height::Auto)
    })
    .unwrap()
}

/// About a fraction `p` of the levels of `stage`, chosen by `seed`.
pub fn random_level_set(tower: &Tower, stage: usize, p: &Rational, seed: u64) -> Result<LevelSet> {
    let h = tower.dense_height(stage)?;
    let count = round(&(p * int(h as u64)))?;
    LevelSet::random(tower, stage, count, seed)
}

/// A random stage-`stage` set whose normalized measure is as close to
/// `target` as the level width allows.
pub fn random_set_with_measure(
    tower: &Tower,
    stage: usize,
    target: &Rational,
    seed: u64,
) -> Result<LevelSet> {
    let count = round(&(target * tower.normalizer() / tower.width(stage)))?;
    LevelSet::random(tower, stage, count, seed)
}

fn round(q: &Rational) -> Result<usize> {
    let r = (q + ratio(1, 2)).numer().div_floor(q.denom());
    r.to_usize()
        .ok_or_else(|| Error::precondition("requested level count out of range"))
}
