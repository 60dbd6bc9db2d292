use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::rank_one::{CertifiedMeasure, Correlator, LevelSet, Tower};
use crate::rational::{abs_diff, int, max};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixingTarget {
    /// `μ(A)μ(B)μ(C)` on normalized measures (finite plans).
    Product,
    /// 0 on raw measures (infinite plans).
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingTime {
    pub n: u64,
    /// Worst-case deviation of `μ(A ∩ T^N B ∩ T^{-N}C)` and
    /// `μ(A ∩ T^{2N}B ∩ T^N C)` from the target, over all probes.
    pub score: Rational,
    /// Worst-case deviation of `μ(A ∩ T^N B)` from its pairwise target.
    pub pairwise: Rational,
}

fn worst_deviation(c: &CertifiedMeasure, target: &Rational) -> Rational {
    max(abs_diff(c.lo(), target), abs_diff(&c.hi(), target))
}

/// Scores every candidate `N` against the probe triples at depth `depth`
/// and returns them sorted by score (ties by `N`).
pub fn find_mixing_times(
    tower: &Tower,
    probes: &[[&LevelSet; 3]],
    candidates: RangeInclusive<u64>,
    target: MixingTarget,
    depth: usize,
) -> Result<Vec<MixingTime>> {
    if candidates.is_empty() {
        return Err(Error::precondition("empty mixing-time candidate range"));
    }
    if probes.is_empty() {
        return Err(Error::precondition("at least one probe triple is required"));
    }
    if depth == 0 || depth > tower.depth() {
        return Err(Error::precondition(
            "mixing-time depth must be in 1..=tower depth",
        ));
    }
    let limit = tower.height(depth - 1) / 4;
    if *candidates.start() < 1 || *candidates.end() as u128 > limit {
        return Err(Error::precondition(format!(
            "candidates must lie in [1, {limit}]"
        )));
    }
    let norm = match target {
        MixingTarget::Product => tower.normalizer(),
        MixingTarget::Zero => int(1),
    };
    let mut targets = Vec::with_capacity(probes.len());
    for [a, b, c] in probes {
        let (pa, pb, pc) = (
            a.measure(tower)? / &norm,
            b.measure(tower)? / &norm,
            c.measure(tower)? / &norm,
        );
        targets.push(match target {
            MixingTarget::Product => (&pa * &pb * &pc, &pa * &pb),
            MixingTarget::Zero => (int(0), int(0)),
        });
    }
    let mut engines = probes
        .iter()
        .map(|p| Correlator::new(tower, p, depth))
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<u64> = candidates.collect();
    let mut out: Vec<MixingTime> = engines
        .par_iter_mut()
        .zip(targets.par_iter())
        .map(|(eng, (t3, t2))| {
            ns.iter()
                .map(|&n| {
                    let n = n as i128;
                    let f1 = eng.certified(&[0, n, -n])?.scaled_down(&norm);
                    let f2 = eng.certified(&[0, 2 * n, n])?.scaled_down(&norm);
                    let pair = eng
                        .certified_subset(&[Some(0), Some(n), None])?
                        .scaled_down(&norm);
                    Ok((
                        max(worst_deviation(&f1, t3), worst_deviation(&f2, t3)),
                        worst_deviation(&pair, t2),
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(None::<Vec<(Rational, Rational)>>, |acc, per| match acc {
            None => Some(per),
            Some(acc) => Some(
                acc.into_iter()
                    .zip(per)
                    .map(|((s, p), (s2, p2))| (max(s, s2), max(p, p2)))
                    .collect(),
            ),
        })
        .unwrap()
        .into_iter()
        .zip(&ns)
        .map(|((score, pairwise), &n)| MixingTime { n, score, pairwise })
        .collect();
    out.sort_by(|x, y| x.score.cmp(&y.score).then(x.n.cmp(&y.n)));
    Ok(out)
}

/// Picks `N_j` for each stage: the best-scoring candidate with `N² ≤ h_j`,
/// kept nondecreasing and raised only when a larger candidate scores
/// strictly better. Stages whose block parameter differs from `N_j` are
/// left out, since only realized block parameters carry the sequence.
pub fn select_schedule(tower: &Tower, times: &[MixingTime], stages: &[usize]) -> Vec<(usize, u64)> {
    let mut current: Option<&MixingTime> = None;
    let mut out = Vec::new();
    for &j in stages {
        let h = tower.height(j);
        let best = times
            .iter()
            .filter(|t| (t.n as u128) * (t.n as u128) <= h)
            .min_by(|x, y| x.score.cmp(&y.score).then(x.n.cmp(&y.n)));
        if let Some(best) = best {
            current = match current {
                None => Some(best),
                Some(cur) if best.n > cur.n && best.score < cur.score => Some(best),
                keep => keep,
            };
        }
        if let Some(cur) = current {
            if tower.plan().stage(j).n == cur.n {
                out.push((j, cur.n));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::presets::{random_level_set, theorem2_plan, theorem4_plan};
    use crate::rank_one::build_tower;
    use crate::rational::ratio;

    #[test]
    fn single_candidate_score_is_the_probe_deviation() {
        let t = build_tower(&theorem2_plan(10), 8).unwrap();
        let a = random_level_set(&t, 2, &ratio(1, 2), 1).unwrap();
        let times =
            find_mixing_times(&t, &[[&a, &a, &a]], 1..=1, MixingTarget::Product, 8).unwrap();
        let norm = t.normalizer();
        let p = a.measure(&t).unwrap() / &norm;
        let target = &p * &p * &p;
        let f1 = crate::rank_one::certified_correlation(&t, &[(&a, 0), (&a, 1), (&a, -1)], 8)
            .unwrap()
            .scaled_down(&norm);
        let f2 = crate::rank_one::certified_correlation(&t, &[(&a, 0), (&a, 2), (&a, 1)], 8)
            .unwrap()
            .scaled_down(&norm);
        assert_eq!(
            times[0].score,
            max(worst_deviation(&f1, &target), worst_deviation(&f2, &target))
        );
    }

    #[test]
    fn heights_are_rigidity_times() {
        let t = build_tower(&theorem2_plan(10), 8).unwrap();
        let a = random_level_set(&t, 2, &ratio(1, 2), 3).unwrap();
        let h = t.height(3) as u64;
        let probe = [[&a, &a, &a]];
        let rigid = find_mixing_times(&t, &probe, h..=h, MixingTarget::Product, 8).unwrap();
        let small = find_mixing_times(&t, &probe, 1..=5, MixingTarget::Product, 8).unwrap();
        assert!(
            rigid[0].score > int(5) * &small[0].score,
            "{rigid:?} vs {small:?}"
        );
    }

    #[test]
    fn infinite_plan_pairwise_decay() {
        let t = build_tower(&theorem4_plan(12), 8).unwrap();
        let a = crate::rank_one::LevelSet::from_levels(&t, 2, [10]).unwrap();
        let times = find_mixing_times(&t, &[[&a, &a, &a]], 1..=3, MixingTarget::Zero, 8).unwrap();
        let mu = a.measure(&t).unwrap();
        assert!(times.iter().all(|m| m.pairwise <= ratio(2, 100) * &mu));
    }

    #[test]
    fn schedule_keeps_realized_block_parameters() {
        let t = build_tower(&crate::asymptotics::presets::theorem3_plan(12, 5), 10).unwrap();
        let times = vec![
            MixingTime {
                n: 2,
                score: ratio(1, 100),
                pairwise: int(0),
            },
            MixingTime {
                n: 1,
                score: ratio(1, 10),
                pairwise: int(0),
            },
        ];
        let s = select_schedule(&t, &times, &(2..=10).collect::<Vec<_>>());
        assert_eq!(s, vec![(6, 2)]);
        assert!(find_mixing_times(&t, &[], 1..=2, MixingTarget::Product, 5).is_err());
    }
}
