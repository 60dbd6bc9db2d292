use serde_json::{json, Value};

use crate::rank_one::{mixing_sequence_n, CertifiedMeasure, Correlator, LevelSet, Tower};
use crate::rational::{abs_diff, fmt_exact, int, max, ratio, to_f64};
use crate::{Error, Rational, Result};

use super::tolerances::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymmetryRow {
    pub j: usize,
    pub mixing_n: u64,
    pub n_j: u128,
    pub k: i128,
    pub m: i128,
    pub depth: usize,
    /// `μ(A ∩ T^k A ∩ T^m A)`.
    pub forward: CertifiedMeasure,
    /// `μ(A ∩ T^{-k} A ∩ T^{-m} A)`.
    pub backward: CertifiedMeasure,
    /// `μ(A ∩ T^{N_j} A)`.
    pub pairwise: CertifiedMeasure,
}

/// Three-set variants at the last scheduled stage.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralTargets {
    pub forward: CertifiedMeasure,
    pub backward: CertifiedMeasure,
    pub forward_target: Rational,
    pub backward_target: Rational,
    pub forward_error: Rational,
    pub backward_error: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymmetryReport {
    pub experiment: &'static str,
    /// `μ(A)`: normalized for finite plans, raw otherwise.
    pub measure_a: Rational,
    pub forward_target: Rational,
    pub backward_target: Rational,
    pub rows: Vec<AsymmetryRow>,
    /// Worst-case distance of the last forward interval from its target.
    pub forward_error: Rational,
    pub backward_error: Rational,
    /// `forward.lo − backward.hi` at the last stage.
    pub separation: Rational,
    /// Absolute tolerances applied.
    pub tolerance: Rational,
    pub separation_required: Option<Rational>,
    pub pairwise_limit: Option<Rational>,
    pub general: Option<GeneralTargets>,
    pub pass: bool,
}

fn worst(c: &CertifiedMeasure, t: &Rational) -> Rational {
    max(abs_diff(c.lo(), t), abs_diff(&c.hi(), t))
}

fn check_schedule(tower: &Tower, schedule: &[(usize, u64)], depth_offset: usize) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::precondition("empty stage schedule"));
    }
    for &(j, n) in schedule {
        let actual = tower.plan().stage(j).n;
        if actual != n {
            return Err(Error::precondition(format!(
                "schedule pairs stage {j} with N = {n}, but its block parameter is {actual}"
            )));
        }
        if j + depth_offset > tower.depth() {
            return Err(Error::precondition(format!(
                "stage {} exceeds the built tower",
                j + depth_offset
            )));
        }
    }
    Ok(())
}

fn rows(
    tower: &Tower,
    a: &LevelSet,
    schedule: &[(usize, u64)],
    depth_offset: usize,
) -> Result<Vec<AsymmetryRow>> {
    use rayon::prelude::*;
    let norm = tower.normalizer();
    schedule
        .par_iter()
        .map(|&(j, nn)| {
            let depth = j + depth_offset;
            let n_j = mixing_sequence_n(tower, j) as i128;
            let (k, m) = (n_j + nn as i128, 2 * n_j);
            let mut eng = Correlator::new(tower, &[a, a, a], depth)?;
            Ok(AsymmetryRow {
                j,
                mixing_n: nn,
                n_j: n_j as u128,
                k,
                m,
                depth,
                forward: eng.certified(&[0, k, m])?.scaled_down(&norm),
                backward: eng.certified(&[0, -k, -m])?.scaled_down(&norm),
                pairwise: eng
                    .certified_subset(&[Some(0), Some(nn as i128), None])?
                    .scaled_down(&norm),
            })
        })
        .collect()
}

/// Finite plans: forward `μ(A ∩ T^{k_j}A ∩ T^{m_j}A)` and backward
/// `μ(A ∩ T^{-k_j}A ∩ T^{-m_j}A)` with `k_j = n_j + N_j`, `m_j = 2n_j`,
/// against `(2/3)p³ + (1/3)p` and `p²`, `p` the normalized `μ(A)`.
/// With `general = Some([A, B, C])` the three-set variants are checked at
/// the last stage against `(2/3)μ(A)μ(B)μ(C) + (1/3)μ(A ∩ B ∩ C)` and
/// `(μ(A ∩ B)μ(C) + μ(B ∩ C)μ(A) + μ(A ∩ C)μ(B)) / 3`.
pub fn theorem3_run(
    tower: &Tower,
    a: &LevelSet,
    schedule: &[(usize, u64)],
    depth_offset: usize,
    tol: &Tolerances,
    general: Option<[&LevelSet; 3]>,
) -> Result<AsymmetryReport> {
    if !tower.is_finite() {
        return Err(Error::precondition(
            "theorem3_run needs a finite-measure plan",
        ));
    }
    check_schedule(tower, schedule, depth_offset)?;
    let norm = tower.normalizer();
    let p = a.measure(tower)? / &norm;
    let forward_target = ratio(2, 3) * &p * &p * &p + ratio(1, 3) * &p;
    let backward_target = &p * &p;
    let rows = rows(tower, a, schedule, depth_offset)?;
    let last = rows.last().unwrap();
    let forward_error = worst(&last.forward, &forward_target);
    let backward_error = worst(&last.backward, &backward_target);
    let separation = last.forward.lo() - last.backward.hi();
    let separated = abs_diff(&forward_target, &backward_target) >= tol.theorem3_separation;
    let mut pass = forward_error <= tol.theorem3 && backward_error <= tol.theorem3;
    if separated {
        pass &= separation >= tol.theorem3_separation;
    }
    let general = match general {
        None => None,
        Some(sets) => {
            let g = general_variant(tower, sets, last, &norm)?;
            pass &= g.forward_error <= tol.theorem3 && g.backward_error <= tol.theorem3;
            Some(g)
        }
    };
    Ok(AsymmetryReport {
        experiment: "theorem3",
        measure_a: p,
        forward_target,
        backward_target,
        forward_error,
        backward_error,
        separation,
        tolerance: tol.theorem3.clone(),
        separation_required: separated.then(|| tol.theorem3_separation.clone()),
        pairwise_limit: None,
        general,
        pass,
        rows,
    })
}

fn general_variant(
    tower: &Tower,
    [a, b, c]: [&LevelSet; 3],
    last: &AsymmetryRow,
    norm: &Rational,
) -> Result<GeneralTargets> {
    let mu = |s: &LevelSet| -> Result<Rational> { Ok(s.measure(tower)? / norm) };
    let (pa, pb, pc) = (mu(a)?, mu(b)?, mu(c)?);
    let ab = mu(&a.intersection(b, tower)?)?;
    let bc = mu(&b.intersection(c, tower)?)?;
    let ac = mu(&a.intersection(c, tower)?)?;
    let abc = mu(&a.intersection(b, tower)?.intersection(c, tower)?)?;
    let forward_target = ratio(2, 3) * &pa * &pb * &pc + ratio(1, 3) * abc;
    let backward_target = (ab * &pc + bc * &pa + ac * &pb) / int(3);
    let mut eng = Correlator::new(tower, &[a, b, c], last.depth)?;
    let forward = eng.certified(&[0, last.k, last.m])?.scaled_down(norm);
    let backward = eng.certified(&[0, -last.k, -last.m])?.scaled_down(norm);
    Ok(GeneralTargets {
        forward_error: worst(&forward, &forward_target),
        backward_error: worst(&backward, &backward_target),
        forward,
        backward,
        forward_target,
        backward_target,
    })
}

/// Infinite plans: raw forward and backward measures against `μ(A)/3` and
/// 0, plus the pairwise premise `μ(A ∩ T^{N_j}A) ≤ tol·μ(A)` at every
/// scheduled stage.
pub fn theorem4_run(
    tower: &Tower,
    a: &LevelSet,
    schedule: &[(usize, u64)],
    depth_offset: usize,
    tol: &Tolerances,
) -> Result<AsymmetryReport> {
    if tower.is_finite() {
        return Err(Error::precondition(
            "theorem4_run needs an infinite-measure plan",
        ));
    }
    check_schedule(tower, schedule, depth_offset)?;
    let mu = a.measure(tower)?;
    let forward_target = &mu / int(3);
    let backward_target = int(0);
    let rows = rows(tower, a, schedule, depth_offset)?;
    let last = rows.last().unwrap();
    let forward_error = worst(&last.forward, &forward_target);
    let backward_error = worst(&last.backward, &backward_target);
    let tolerance = &tol.theorem4 * &mu;
    let pairwise_limit = &tol.theorem4_pairwise * &mu;
    let pass = forward_error <= tolerance
        && backward_error <= tolerance
        && rows.iter().all(|r| r.pairwise.hi() <= pairwise_limit);
    Ok(AsymmetryReport {
        experiment: "theorem4",
        separation: last.forward.lo() - last.backward.hi(),
        measure_a: mu,
        forward_target,
        backward_target,
        forward_error,
        backward_error,
        tolerance,
        separation_required: None,
        pairwise_limit: Some(pairwise_limit),
        general: None,
        pass,
        rows,
    })
}

impl AsymmetryReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "j,N_j,n_j,k,m,forward_lo,forward_hi,backward_lo,backward_hi,pairwise_hi,forward_target,backward_target,forward_f,backward_f\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{:.12e},{:.12e}\n",
                r.j,
                r.mixing_n,
                r.n_j,
                r.k,
                r.m,
                fmt_exact(r.forward.lo()),
                fmt_exact(&r.forward.hi()),
                fmt_exact(r.backward.lo()),
                fmt_exact(&r.backward.hi()),
                fmt_exact(&r.pairwise.hi()),
                fmt_exact(&self.forward_target),
                fmt_exact(&self.backward_target),
                to_f64(r.forward.lo()),
                to_f64(r.backward.lo()),
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let f = |q: &Rational| json!({"exact": fmt_exact(q), "float": to_f64(q)});
        json!({
            "experiment": self.experiment,
            "measure_a": f(&self.measure_a),
            "forward_target": f(&self.forward_target),
            "backward_target": f(&self.backward_target),
            "forward_error": to_f64(&self.forward_error),
            "backward_error": to_f64(&self.backward_error),
            "separation": to_f64(&self.separation),
            "separation_required": self.separation_required.as_ref().map(to_f64),
            "tolerance": fmt_exact(&self.tolerance),
            "pairwise_limit": self.pairwise_limit.as_ref().map(fmt_exact),
            "schedule": self.rows.iter().map(|r| json!([r.j, r.mixing_n])).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| json!({
                "j": r.j,
                "N_j": r.mixing_n,
                "n_j": r.n_j.to_string(),
                "depth": r.depth,
                "forward": [to_f64(r.forward.lo()), to_f64(&r.forward.hi())],
                "backward": [to_f64(r.backward.lo()), to_f64(&r.backward.hi())],
                "pairwise_hi": to_f64(&r.pairwise.hi()),
            })).collect::<Vec<_>>(),
            "general": self.general.as_ref().map(|g| json!({
                "forward": [to_f64(g.forward.lo()), to_f64(&g.forward.hi())],
                "backward": [to_f64(g.backward.lo()), to_f64(&g.backward.hi())],
                "forward_target": to_f64(&g.forward_target),
                "backward_target": to_f64(&g.backward_target),
            })),
            "verdict": if self.pass { "PASS" } else { "FAIL" },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::presets::{theorem3_plan, theorem4_plan};
    use crate::rank_one::build_tower;

    #[test]
    fn targets_for_standard_measures() {
        let p = ratio(1, 5);
        assert_eq!(
            ratio(2, 3) * &p * &p * &p + ratio(1, 3) * &p,
            ratio(27, 375)
        );
        let p = ratio(1, 2);
        assert_eq!(ratio(2, 3) * &p * &p * &p + ratio(1, 3) * &p, &p * &p);
    }

    #[test]
    fn whole_space_gives_one() {
        let t = build_tower(&theorem3_plan(12, 5), 11).unwrap();
        let x = LevelSet::whole_space(&t).unwrap();
        let rep = theorem3_run(&t, &x, &[(5, 1)], 6, &Tolerances::default(), None).unwrap();
        assert_eq!(rep.forward_target, int(1));
        assert_eq!(rep.backward_target, int(1));
        assert!(rep.rows[0].forward.contains(&int(1)) && rep.rows[0].backward.contains(&int(1)));
    }

    #[test]
    fn schedule_must_match_plan() {
        let t = build_tower(&theorem3_plan(12, 5), 11).unwrap();
        let x = LevelSet::whole_space(&t).unwrap();
        assert!(theorem3_run(&t, &x, &[(5, 2)], 6, &Tolerances::default(), None).is_err());
        let inf = build_tower(&theorem4_plan(12), 11).unwrap();
        assert!(theorem3_run(&inf, &x, &[(5, 1)], 6, &Tolerances::default(), None).is_err());
        assert!(theorem4_run(&t, &x, &[(5, 1)], 6, &Tolerances::default()).is_err());
    }

    #[test]
    fn empty_set_in_infinite_measure() {
        let t = build_tower(&theorem4_plan(12), 10).unwrap();
        let e = LevelSet::empty(&t, 2).unwrap();
        let rep = theorem4_run(&t, &e, &[(3, 1), (4, 1)], 6, &Tolerances::default()).unwrap();
        assert_eq!(rep.forward_target, int(0));
        assert!(rep
            .rows
            .iter()
            .all(|r| r.forward.value == int(0) && r.backward.value == int(0)));
        let a = LevelSet::from_levels(&t, 2, [0]).unwrap();
        let rep = theorem4_run(&t, &a, &[(3, 1), (4, 1)], 6, &Tolerances::default()).unwrap();
        assert_eq!(rep.measure_a, ratio(1, 9));
        assert_eq!(rep.forward_target, ratio(1, 27));
    }

    #[test]
    fn backward_limit_has_no_triple_rigidity_term() {
        // μ(A ∩ B ∩ C) = 0 with all pairwise intersections nonempty.
        let t = build_tower(&theorem3_plan(20, 5), 16).unwrap();
        // Each level independently gets one label among A, B, C, AB, BC, AC
        // or none, so the sets look random at small shifts.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (mut la, mut lb, mut lc) = (Vec::new(), Vec::new(), Vec::new());
        for l in 0..t.height(3) {
            match rng.gen_range(0..7) {
                0 => la.push(l),
                1 => lb.push(l),
                2 => lc.push(l),
                3 => {
                    la.push(l);
                    lb.push(l)
                }
                4 => {
                    lb.push(l);
                    lc.push(l)
                }
                5 => {
                    la.push(l);
                    lc.push(l)
                }
                _ => {}
            }
        }
        let a = LevelSet::from_levels(&t, 3, la).unwrap();
        let b = LevelSet::from_levels(&t, 3, lb).unwrap();
        let c = LevelSet::from_levels(&t, 3, lc).unwrap();
        assert_eq!(
            a.intersection(&b, &t)
                .unwrap()
                .intersection(&c, &t)
                .unwrap()
                .count(),
            0
        );
        let tol = Tolerances::default();
        let rep = theorem3_run(&t, &a, &[(5, 1), (10, 1)], 6, &tol, Some([&a, &b, &c])).unwrap();
        let g = rep.general.unwrap();
        assert!(g.backward_error <= tol.theorem3, "{g:?}");
        assert!(g.forward_error <= tol.theorem3, "{g:?}");
    }
}
