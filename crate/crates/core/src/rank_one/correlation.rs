use std::collections::HashMap;

use crate::bits::BitSet;
use crate::rational::{from_u128, int};
use crate::{Error, Rational, Result};

use super::level_set::LevelSet;
use super::tower::Tower;

/// An exact rational `value` and a `bound ≥ 0` with the true measure in
/// `[value, value + bound]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedMeasure {
    pub value: Rational,
    pub bound: Rational,
}

impl CertifiedMeasure {
    pub fn exact(value: Rational) -> Self {
        CertifiedMeasure {
            value,
            bound: int(0),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.value
    }

    pub fn hi(&self) -> Rational {
        &self.value + &self.bound
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.value <= q && q <= &self.hi()
    }

    pub fn overlaps(&self, other: &CertifiedMeasure) -> bool {
        self.value <= other.hi() && other.value <= self.hi()
    }

    /// Both ends divided by `d > 0`.
    pub fn scaled_down(&self, d: &Rational) -> CertifiedMeasure {
        CertifiedMeasure {
            value: &self.value / d,
            bound: &self.bound / d,
        }
    }

    /// Distance from `q` to the interval.
    pub fn distance_to(&self, q: &Rational) -> Rational {
        if q < &self.value {
            &self.value - q
        } else if q > &self.hi() {
            q - self.hi()
        } else {
            int(0)
        }
    }
}

type MemoKey = (usize, Vec<(usize, i128)>, i128, i128);

/// Shifted-intersection counter over a fixed family of level sets.
///
/// `count(J, δ, [lo, hi))` is the number of stage-`J` levels `ℓ ∈ [lo, hi)`
/// with `ℓ − δ_i` in the refinement of every set `i`. Stage `t` is the
/// concatenation of the copies (columns) of stage `t − 1` and spacer runs,
/// so the range splits into pieces on which every track sits in a fixed
/// column or spacer run. Column pieces recurse into stage `t − 1` with the
/// track offsets moved by the column bases; spacer pieces drop the track
/// (if the set contains later spacers) or contribute nothing. Sub-counts are
/// memoized on the offsets relative to the first track, so heights far beyond
/// any dense vector are handled exactly.
pub struct Correlator<'a> {
    tower: &'a Tower,
    depth: usize,
    base: usize,
    sets: Vec<BitSet>,
    later: Vec<bool>,
    memo: HashMap<MemoKey, u128>,
}

impl<'a> Correlator<'a> {
    pub fn new(tower: &'a Tower, sets: &[&LevelSet], depth: usize) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::precondition("correlation needs at least one set"));
        }
        if depth > tower.depth() {
            return Err(Error::precondition(format!(
                "depth {depth} exceeds built tower depth {}",
                tower.depth()
            )));
        }
        let base = sets.iter().map(|s| s.stage()).max().unwrap();
        if base > depth {
            return Err(Error::precondition(format!(
                "set of stage {base} is deeper than depth {depth}"
            )));
        }
        let refined = sets
            .iter()
            .map(|s| s.refine(tower, base))
            .collect::<Result<Vec<_>>>()?;
        Ok(Correlator {
            tower,
            depth,
            base,
            later: refined.iter().map(|s| s.includes_later_spacers()).collect(),
            sets: refined.into_iter().map(|s| s.levels().clone()).collect(),
            memo: HashMap::new(),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of memoized sub-counts.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// `μ{x : T^{-k_i} x ∈ A_i ∀i}`, certified.
    pub fn certified(&mut self, shifts: &[i128]) -> Result<CertifiedMeasure> {
        let all: Vec<Option<i128>> = shifts.iter().copied().map(Some).collect();
        self.certified_subset(&all)
    }

    /// As [`certified`](Self::certified) over the sets whose shift is `Some`.
    ///
    /// Shifts are re-based on a set that lies inside the stage-`J` tower, so
    /// every point of the intersection is in the tower and only the `spread`
    /// levels whose orbit segment leaves it are uncertain. If every set
    /// contains later spacers, the mass outside the tower is added to the
    /// bound.
    pub fn certified_subset(&mut self, shifts: &[Option<i128>]) -> Result<CertifiedMeasure> {
        if shifts.len() != self.sets.len() {
            return Err(Error::precondition("one shift slot per set is required"));
        }
        let active: Vec<(usize, i128)> = shifts
            .iter()
            .enumerate()
            .filter_map(|(i, k)| k.map(|k| (i, k)))
            .collect();
        if active.is_empty() {
            return Err(Error::precondition("at least one set must be active"));
        }
        let reference = active.iter().find(|(i, _)| !self.later[*i]).copied();
        let k0 = reference.unwrap_or(active[0]).1;
        let tracks: Vec<(usize, i128)> = active.iter().map(|&(i, k)| (i, k - k0)).collect();
        let h = self.tower.height(self.depth) as i128;
        let lo = tracks.iter().map(|t| t.1).max().unwrap().max(0);
        let hi = h + tracks.iter().map(|t| t.1).min().unwrap().min(0);
        if lo >= hi {
            return Err(Error::precondition(format!(
                "shift spread {} is not below h_{} = {h}",
                lo - hi + h,
                self.depth
            )));
        }
        let count = self.count(self.depth, &tracks, lo, hi);
        let w = self.tower.width(self.depth);
        let mut bound = from_u128((h - (hi - lo)) as u128) * w;
        if reference.is_none() {
            match self.tower.total_measure() {
                Some(total) => bound += total - self.tower.measure_at(self.depth),
                None => {
                    return Err(Error::precondition(
                        "every set contains later spacers of an infinite plan; the measure is unbounded",
                    ))
                }
            }
        }
        Ok(CertifiedMeasure {
            value: from_u128(count) * w,
            bound,
        })
    }

    /// Exact number of stage-`J` levels `ℓ ∈ [lo, hi)` with `ℓ − δ_i` in set
    /// `i` for all `i`; every `ℓ − δ_i` must stay inside the stage-`J` tower.
    pub fn count_range(&mut self, offsets: &[i128], lo: i128, hi: i128) -> Result<u128> {
        let h = self.tower.height(self.depth) as i128;
        for &d in offsets {
            if lo < hi && (lo - d < 0 || hi - d > h) {
                return Err(Error::precondition(
                    "level range leaves the tower for some shift",
                ));
            }
        }
        if lo >= hi {
            return Ok(0);
        }
        let tracks: Vec<(usize, i128)> = offsets.iter().copied().enumerate().collect();
        Ok(self.count(self.depth, &tracks, lo, hi))
    }

    fn count(&mut self, t: usize, tracks: &[(usize, i128)], lo: i128, hi: i128) -> u128 {
        if tracks.is_empty() {
            return (hi - lo) as u128;
        }
        let d0 = tracks[0].1;
        let tracks: Vec<(usize, i128)> = tracks.iter().map(|&(i, d)| (i, d - d0)).collect();
        let (lo, hi) = (lo - d0, hi - d0);
        if t == self.base {
            let sets: Vec<&BitSet> = tracks.iter().map(|&(i, _)| &self.sets[i]).collect();
            let offs: Vec<i128> = tracks.iter().map(|&(_, d)| -d).collect();
            return BitSet::count_shifted_intersection(&sets, &offs, lo, hi) as u128;
        }
        let key = (t, tracks, lo, hi);
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let (_, tracks, _, _) = &key;
        let st = self.tower.stage(t - 1);
        let h = st.height as i128;
        let offsets: Vec<i128> = st.base_offsets.iter().map(|&o| o as i128).collect();

        let mut cuts: Vec<i128> = vec![lo, hi];
        for &(_, d) in tracks {
            for &o in &offsets {
                for b in [o + d, o + h + d] {
                    if lo < b && b < hi {
                        cuts.push(b);
                    }
                }
            }
        }
        cuts.sort_unstable();
        cuts.dedup();

        let mut total: u128 = 0;
        let mut child: Vec<(usize, i128)> = Vec::with_capacity(tracks.len());
        'pieces: for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            child.clear();
            for &(i, d) in tracks {
                let pos = a - d;
                let c = offsets.partition_point(|&o| o <= pos) - 1;
                if pos - offsets[c] < h {
                    child.push((i, d + offsets[c]));
                } else if !self.later[i] {
                    continue 'pieces;
                }
            }
            let sub = child.clone();
            total += self.count(t - 1, &sub, a, b);
        }
        self.memo.insert(key, total);
        total
    }
}

/// `μ(∩_i T^{k_i} A_i)` at depth `J` with a certified truncation bound.
/// Convention: `μ(A ∩ T^k B ∩ T^m C)` is `[(A, 0), (B, k), (C, m)]`.
pub fn certified_correlation(
    tower: &Tower,
    items: &[(&LevelSet, i128)],
    depth: usize,
) -> Result<CertifiedMeasure> {
    let sets: Vec<&LevelSet> = items.iter().map(|(s, _)| *s).collect();
    let shifts: Vec<i128> = items.iter().map(|(_, k)| *k).collect();
    Correlator::new(tower, &sets, depth)?.certified(&shifts)
}

/// Same quantity through dense stage-`J` level vectors (bounded by the
/// tower's level cap); used as an independent cross-check.
pub fn certified_correlation_dense(
    tower: &Tower,
    items: &[(&LevelSet, i128)],
    depth: usize,
) -> Result<CertifiedMeasure> {
    if items.is_empty() {
        return Err(Error::precondition("correlation needs at least one set"));
    }
    let refined = items
        .iter()
        .map(|(s, _)| s.refine(tower, depth))
        .collect::<Result<Vec<_>>>()?;
    let reference = refined.iter().position(|s| !s.includes_later_spacers());
    let k0 = items[reference.unwrap_or(0)].1;
    let rel: Vec<i128> = items.iter().map(|(_, k)| k - k0).collect();
    let h = tower.height(depth) as i128;
    let lo = rel.iter().copied().max().unwrap().max(0);
    let hi = h + rel.iter().copied().min().unwrap().min(0);
    if lo >= hi {
        return Err(Error::precondition(
            "shift spread is not below the stage height",
        ));
    }
    let sets: Vec<&BitSet> = refined.iter().map(|s| s.levels()).collect();
    let offs: Vec<i128> = rel.iter().map(|k| -k).collect();
    let count = BitSet::count_shifted_intersection(&sets, &offs, lo, hi);
    let w = tower.width(depth);
    let mut bound = from_u128((h - (hi - lo)) as u128) * w;
    if reference.is_none() {
        match tower.total_measure() {
            Some(total) => bound += total - tower.measure_at(depth),
            None => return Err(Error::precondition("unbounded measure")),
        }
    }
    Ok(CertifiedMeasure {
        value: int(count) * w,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_one::plan::{Height, SpacerPlan, StageSpec};
    use crate::rank_one::tower::build_tower;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn basic() -> SpacerPlan {
        SpacerPlan::uniform(1, StageSpec::new(1, 1, Height::Fixed(0)).unwrap())
    }

    fn growing() -> SpacerPlan {
        SpacerPlan::from_fn(1, 12, |j| {
            StageSpec::new(1 + j as u64 % 3, j as u64 + 2, Height::Fixed(0)).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn no_dynamics_is_exact() {
        let t = build_tower(&basic(), 4).unwrap();
        let a = LevelSet::from_levels(&t, 1, [0, 1, 3]).unwrap();
        let b = LevelSet::from_levels(&t, 2, [0, 1, 2, 10]).unwrap();
        let c = certified_correlation(&t, &[(&a, 0), (&b, 0)], 4).unwrap();
        assert_eq!(c.bound, int(0));
        assert_eq!(
            c.value,
            a.intersection(&b, &t).unwrap().measure(&t).unwrap()
        );
    }

    #[test]
    fn single_level_self_correlation() {
        let t = build_tower(&basic(), 3).unwrap();
        let a = LevelSet::from_levels(&t, 0, [0]).unwrap();
        let c1 = certified_correlation(&t, &[(&a, 0), (&a, 1)], 1).unwrap();
        assert_eq!(c1.value, ratio(1, 3));
        assert_eq!(c1.bound, ratio(1, 3));
        // Each stage-2 copy holds the pairs (0,1), (6,7), (14,15) and no pair
        // straddles two copies, so the count at stage 3 is 9.
        let c3 = certified_correlation(&t, &[(&a, 0), (&a, 1)], 3).unwrap();
        assert_eq!(c3.value, ratio(9, 27));
        assert_eq!(c3.bound, ratio(1, 27));
        assert!(c1.overlaps(&c3));
        // A ∩ TA is the base of the middle stage-1 column.
        let col = LevelSet::from_levels(&t, 1, [1]).unwrap();
        assert!(c3.contains(&col.measure(&t).unwrap()));
    }

    #[test]
    fn spread_must_fit() {
        let t = build_tower(&basic(), 2).unwrap();
        let a = LevelSet::from_levels(&t, 0, [0]).unwrap();
        assert!(certified_correlation(&t, &[(&a, 0), (&a, 21)], 2).is_err());
        assert!(certified_correlation(&t, &[(&a, 0), (&a, 20)], 2).is_ok());
    }

    #[test]
    fn deep_queries_beyond_dense_reach() {
        // h_14 of this plan is far above any dense vector.
        let t = build_tower(&growing(), 14).unwrap();
        assert!(t.height(14) > 1u128 << 50);
        let a = LevelSet::random(&t, 2, 40, 1).unwrap();
        let b = LevelSet::random(&t, 2, 50, 2).unwrap();
        let n = t.height(8) as i128;
        let shallow = certified_correlation(&t, &[(&a, 0), (&b, n), (&a, 2 * n)], 12).unwrap();
        let deep = certified_correlation(&t, &[(&a, 0), (&b, n), (&a, 2 * n)], 14).unwrap();
        assert!(shallow.overlaps(&deep));
        assert!(deep.bound < shallow.bound);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn recursive_matches_dense(
            xs in proptest::collection::vec(0u128..117, 1..40),
            ys in proptest::collection::vec(0u128..12, 1..6),
            fx in any::<bool>(), fy in any::<bool>(),
            k1 in -1500i128..1500, k2 in -1500i128..1500,
            depth in 2usize..5,
        ) {
            let t = build_tower(&growing(), 4).unwrap();
            let a = LevelSet::from_levels(&t, 2, xs).unwrap().with_later_spacers(fx);
            let b = LevelSet::from_levels(&t, 1, ys).unwrap().with_later_spacers(fy);
            let items = [(&a, 0), (&b, k1), (&a, k2)];
            let fast = certified_correlation(&t, &items, depth);
            let dense = certified_correlation_dense(&t, &items, depth);
            match (fast, dense) {
                (Ok(f), Ok(d)) => prop_assert_eq!(f, d),
                (Err(_), Err(_)) => {}
                (f, d) => prop_assert!(false, "{:?} vs {:?}", f, d),
            }
        }
    }
}
