use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::rational::{from_u128, int};
use crate::{Error, Rational, Result};

use super::level_set::LevelSet;
use super::tower::Tower;

/// Where a point of `[0, μ_total)` sits relative to a stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Located {
    /// Level and offset inside that level, `0 ≤ offset < w_J`.
    Level { level: u128, offset: Rational },
    /// The point is a spacer created after the stage, at stage `stage`
    /// (`None` if beyond the built depth).
    Later { stage: Option<usize> },
}

fn floor_u128(q: &Rational) -> u128 {
    q.numer()
        .div_floor(q.denom())
        .to_u128()
        .expect("nonnegative level index")
}

/// Level of the `k`-th spacer (in stacking order) created at stage `j + 1`.
fn spacer_level(tower: &Tower, j: usize, mut k: u128) -> u128 {
    let st = tower.stage(j);
    for (c, &s) in st.spacers.iter().enumerate() {
        if k < s {
            return st.base_offsets[c] + st.height + k;
        }
        k -= s;
    }
    unreachable!("spacer index beyond stage {}", j + 1)
}

/// Stage where `p` first appears, with its level and offset there.
fn appearance(tower: &Tower, p: &Rational) -> Result<Option<(usize, u128, Rational)>> {
    if p < &int(0) || tower.total_measure().is_some_and(|t| p >= t) {
        return Err(Error::precondition("point outside the phase space"));
    }
    if p < &tower.measure_at(0) {
        let l = floor_u128(p);
        return Ok(Some((0, l, p - from_u128(l))));
    }
    for j in 0..tower.depth() {
        let next = tower.measure_at(j + 1);
        if p < &next {
            let w = tower.width(j + 1);
            let rel = p - tower.measure_at(j);
            let k = floor_u128(&(&rel / w));
            return Ok(Some((
                j + 1,
                spacer_level(tower, j, k),
                rel - from_u128(k) * w,
            )));
        }
    }
    Ok(None)
}

fn descend(tower: &Tower, j: usize, level: u128, offset: &Rational) -> (u128, Rational) {
    let w = tower.width(j + 1);
    let c = floor_u128(&(offset / w));
    (
        tower.stage(j).base_offsets[c as usize] + level,
        offset - from_u128(c) * w,
    )
}

/// Position of `p` in stage `stage`.
pub fn locate(tower: &Tower, p: &Rational, stage: usize) -> Result<Located> {
    let Some((mut j, mut level, mut offset)) = appearance(tower, p)? else {
        return Ok(Located::Later { stage: None });
    };
    if j > stage {
        return Ok(Located::Later { stage: Some(j) });
    }
    while j < stage {
        (level, offset) = descend(tower, j, level, &offset);
        j += 1;
    }
    Ok(Located::Level { level, offset })
}

/// The point at `(level, offset)` of stage `stage`.
pub fn coordinate(tower: &Tower, stage: usize, level: u128, offset: &Rational) -> Rational {
    let mut level = level;
    let mut offset = offset.clone();
    for j in (0..stage).rev() {
        let st = tower.stage(j);
        let c = st.base_offsets.partition_point(|&o| o <= level) - 1;
        let rel = level - st.base_offsets[c];
        let w = tower.width(j + 1);
        if rel < st.height {
            level = rel;
            offset += from_u128(c as u128) * w;
        } else {
            let k: u128 = st.spacers[..c].iter().sum::<u128>() + (rel - st.height);
            return tower.measure_at(j) + from_u128(k) * w + offset;
        }
    }
    from_u128(level) * tower.width(0) + offset
}

/// `T^{steps} p`, moving level by level and cutting into deeper stages only
/// when the current level is the top (or, for inverse steps, the bottom).
/// `None` when that needs a stage beyond `max_stage`.
pub fn orbit_point(
    tower: &Tower,
    p: &Rational,
    steps: i128,
    max_stage: usize,
) -> Result<Option<Rational>> {
    if max_stage > tower.depth() {
        return Err(Error::precondition("max_stage exceeds the built tower"));
    }
    let Some((mut j, mut level, mut offset)) = appearance(tower, p)? else {
        return Ok(None);
    };
    if j > max_stage {
        return Ok(None);
    }
    let mut left = steps;
    while left != 0 {
        let room = if left > 0 {
            (tower.height(j) - 1 - level) as i128
        } else {
            level as i128
        };
        if room > 0 {
            let mv = room.min(left.abs());
            if left > 0 {
                level += mv as u128;
                left -= mv;
            } else {
                level -= mv as u128;
                left += mv;
            }
            continue;
        }
        if j == max_stage {
            return Ok(None);
        }
        (level, offset) = descend(tower, j, level, &offset);
        j += 1;
    }
    Ok(Some(coordinate(tower, j, level, &offset)))
}

/// Membership of `p` in a level set.
pub fn point_in_set(tower: &Tower, p: &Rational, set: &LevelSet) -> Result<Option<bool>> {
    Ok(match locate(tower, p, set.stage())? {
        Located::Level { level, .. } => Some(set.contains_level(level)),
        Located::Later { stage: Some(_) } => Some(set.includes_later_spacers()),
        Located::Later { stage: None } => {
            if set.includes_later_spacers() {
                Some(true)
            } else if tower.total_measure().is_none() || p >= &tower.measure_at(tower.depth()) {
                Some(false)
            } else {
                None
            }
        }
    })
}
