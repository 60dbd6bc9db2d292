use crate::{Error, Result};

use super::correlation::{certified_correlation, CertifiedMeasure};
use super::level_set::LevelSet;
use super::tower::Tower;

fn bases(tower: &Tower, j: usize, columns: impl Iterator<Item = usize>) -> Result<[Vec<u128>; 3]> {
    if j + 1 > tower.depth() {
        return Err(Error::precondition(format!(
            "column bases of stage {j} need depth ≥ {}",
            j + 1
        )));
    }
    let offs = &tower.stage(j).base_offsets;
    let mut out: [Vec<u128>; 3] = Default::default();
    for t in columns {
        for (q, slot) in out.iter_mut().enumerate() {
            slot.push(offs[3 * t + q]);
        }
    }
    Ok(out)
}

/// Bottom levels of columns `3t`, `3t + 1`, `3t + 2` of stage `j`, as
/// singleton level sets of stage `j + 1`.
pub fn column_bases(tower: &Tower, j: usize, t: usize) -> Result<(LevelSet, LevelSet, LevelSet)> {
    let l = tower.stage(j).spec.l as usize;
    if t >= l {
        return Err(Error::precondition(format!(
            "triple {t} out of range (L = {l})"
        )));
    }
    let [b1, b2, b3] = bases(tower, j, t..t + 1)?;
    Ok((
        LevelSet::from_levels(tower, j + 1, b1)?,
        LevelSet::from_levels(tower, j + 1, b2)?,
        LevelSet::from_levels(tower, j + 1, b3)?,
    ))
}

/// Unions over all `L_j` triples of the three column bases.
pub fn column_bases_union(tower: &Tower, j: usize) -> Result<(LevelSet, LevelSet, LevelSet)> {
    let l = tower.stage(j).spec.l as usize;
    let [b1, b2, b3] = bases(tower, j, 0..l)?;
    Ok((
        LevelSet::from_levels(tower, j + 1, b1)?,
        LevelSet::from_levels(tower, j + 1, b2)?,
        LevelSet::from_levels(tower, j + 1, b3)?,
    ))
}

/// `μ(T^k A Δ B) = μ(A) + μ(B) − 2μ(B ∩ T^k A)`, certified.
pub fn certified_shift_difference(
    tower: &Tower,
    a: &LevelSet,
    k: i128,
    b: &LevelSet,
    depth: usize,
) -> Result<CertifiedMeasure> {
    let inter = certified_correlation(tower, &[(b, 0), (a, k)], depth)?;
    let sum = a.measure(tower)? + b.measure(tower)?;
    let hi = &sum - &inter.value * crate::rational::int(2);
    let lo = &sum - inter.hi() * crate::rational::int(2);
    let zero = crate::rational::int(0);
    let value = if lo < zero { zero } else { lo };
    Ok(CertifiedMeasure {
        bound: &hi - &value,
        value,
    })
}
