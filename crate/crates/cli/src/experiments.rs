//! Runs one configured experiment and assembles its reports.

use asymlab::asymptotics::{
    backward_table, find_mixing_times, random_level_set, random_set_with_measure, rows_to_csv,
    rows_to_json, select_schedule, table_verdict, theorem2_plan, theorem2_table, theorem3_plan,
    theorem3_run, theorem4_plan, theorem4_run, weak_limit_check, ConvergenceRow, MixingTarget,
    MixingTime, THEOREM3_N_MAX,
};
use asymlab::gf2_dual::Character;
use asymlab::ledrappier::{theorem1_certificate, SetSpec, WindowCap};
use asymlab::rank_one::{build_tower, LevelSet, SpacerPlan, Tower};
use asymlab::rational::{fmt_exact, parse, ratio, to_f64};
use asymlab::{Error, Result};
use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig};

pub struct Outcome {
    pub csv: String,
    pub summary: Value,
    pub lines: Vec<String>,
    pub pass: bool,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::Theorem1 => theorem1(cfg),
        Experiment::Theorem2 | Experiment::Backward | Experiment::WeakLimit => table(cfg),
        Experiment::Theorem3 | Experiment::Theorem4 => asymmetry(cfg),
    }
}

fn theorem1(cfg: &RunConfig) -> Result<Outcome> {
    let chi = match cfg.sets.as_slice() {
        [] => Character::monomial(0, 0),
        [one] => match SetSpec::parse(one)? {
            SetSpec::CharacterSet(c) => c,
            SetSpec::Cylinder(_) => {
                return Err(Error::Parse(
                    "theorem1 needs a character set (\"character: [...]\")".into(),
                ))
            }
        },
        _ => {
            return Err(Error::Parse(
                "theorem1 takes exactly one character set".into(),
            ))
        }
    };
    let mut report = theorem1_certificate(&chi, cfg.m_max)?;
    if cfg.samples > 0 {
        report.attach_mc(cfg.samples, cfg.seed, WindowCap::default())?;
    }
    let mc_ok = report.mc.iter().all(|c| c.within_4_sigma);
    let pass = report.pass && mc_ok;
    let mut lines: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "m={:>2} forward={} backward={} pair1_nontrivial={} pair2_nontrivial={}",
                r.m,
                fmt_exact(&r.forward),
                fmt_exact(&r.backward),
                r.pair1_nontrivial,
                r.pair2_nontrivial
            )
        })
        .collect();
    lines.push(format!(
        "mu(A0)={} backward threshold={:?} mc cross-checks={} (all within 4 sigma: {mc_ok})",
        fmt_exact(&report.mu_a0),
        report.threshold,
        report.mc.len()
    ));
    Ok(Outcome {
        csv: report.to_csv(),
        summary: json!({ "result": report.to_json() }),
        lines,
        pass,
    })
}

fn plan_or(
    cfg: &RunConfig,
    preset: impl FnOnce(usize) -> SpacerPlan,
    stages_needed: usize,
) -> Result<SpacerPlan> {
    match &cfg.plan {
        Some(src) => src.load(),
        None => Ok(preset(stages_needed)),
    }
}

/// Level-set literal, extended with `"random": p` (fraction of the stage's
/// levels) or `"measure": p` (normalized measure), each with an optional
/// `"seed"`.
fn level_set(tower: &Tower, text: &str, default_seed: u64) -> Result<LevelSet> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("level-set literal {text:?}: {e}")))?;
    let stage = v.get("stage").and_then(Value::as_u64).map(|s| s as usize);
    let seed = v
        .get("seed")
        .and_then(Value::as_u64)
        .unwrap_or(default_seed);
    let frac = |key: &str| -> Result<Option<asymlab::Rational>> {
        match v.get(key) {
            None => Ok(None),
            Some(x) => {
                let s = match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                parse(&s)
                    .map(Some)
                    .ok_or_else(|| Error::Parse(format!("{key}: bad number {s:?}")))
            }
        }
    };
    let stage_or_err =
        || stage.ok_or_else(|| Error::Parse("level-set literal needs \"stage\"".into()));
    if let Some(p) = frac("random")? {
        return random_level_set(tower, stage_or_err()?, &p, seed);
    }
    if let Some(p) = frac("measure")? {
        return random_set_with_measure(tower, stage_or_err()?, &p, seed);
    }
    LevelSet::from_json(tower, &v)
}

fn sets_or_default(
    cfg: &RunConfig,
    tower: &Tower,
    count: usize,
    default: &str,
) -> Result<(Vec<LevelSet>, Vec<String>)> {
    let literals: Vec<String> = if cfg.sets.is_empty() {
        vec![default.to_string(); count]
    } else if cfg.sets.len() == count {
        cfg.sets.clone()
    } else {
        return Err(Error::Parse(format!(
            "{} expects {count} level sets, got {}",
            cfg.experiment.name(),
            cfg.sets.len()
        )));
    };
    let sets = literals
        .iter()
        .enumerate()
        .map(|(i, s)| level_set(tower, s, cfg.seed.wrapping_mul(1000).wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok((sets, literals))
}

fn row_line(r: &ConvergenceRow) -> String {
    format!(
        "j={:>2} h_j={} n_j={} lhs=[{:.6}, {:.6}] rhs={:.6} certified_gap={:.3e} {}",
        r.j,
        r.h_j,
        r.n_j,
        to_f64(r.lhs.lo()),
        to_f64(&r.lhs.hi()),
        to_f64(r.rhs.lo()),
        to_f64(&r.certified_gap),
        if r.pass { "PASS" } else { "FAIL" }
    )
}

fn table(cfg: &RunConfig) -> Result<Outcome> {
    let last = *cfg.stages.iter().max().unwrap();
    let depth = last + cfg.depth;
    let plan = plan_or(cfg, theorem2_plan, depth + 1)?;
    let tower = build_tower(&plan, depth)?;
    let (rows, literals) = match cfg.experiment {
        Experiment::WeakLimit => {
            // A = B by default.
            let (sets, lits) = if cfg.sets.is_empty() {
                let a = level_set(&tower, r#"{"stage": 2, "random": "1/2"}"#, cfg.seed)?;
                (
                    vec![a.clone(), a],
                    vec![r#"{"stage": 2, "random": "1/2"}"#.to_string(); 2],
                )
            } else {
                sets_or_default(cfg, &tower, 2, "")?
            };
            (
                weak_limit_check(
                    &tower,
                    &sets[0],
                    &sets[1],
                    &cfg.stages,
                    cfg.depth,
                    &cfg.tolerances.weak_limit,
                )?,
                lits,
            )
        }
        exp => {
            let (sets, lits) = sets_or_default(cfg, &tower, 3, r#"{"stage": 2, "random": "1/2"}"#)?;
            let s = [&sets[0], &sets[1], &sets[2]];
            let rows = if exp == Experiment::Theorem2 {
                theorem2_table(
                    &tower,
                    cfg.n,
                    s,
                    &cfg.stages,
                    cfg.depth,
                    &cfg.tolerances.theorem2,
                )?
            } else {
                backward_table(
                    &tower,
                    cfg.n,
                    s,
                    &cfg.stages,
                    cfg.depth,
                    &cfg.tolerances.backward,
                )?
            };
            (rows, lits)
        }
    };
    let pass = table_verdict(&rows);
    let mut lines: Vec<String> = rows.iter().map(row_line).collect();
    lines.push(format!(
        "gap trend: first {:.3e}, last {:.3e}",
        to_f64(&rows[0].certified_gap),
        to_f64(&rows.last().unwrap().certified_gap)
    ));
    Ok(Outcome {
        csv: rows_to_csv(&rows),
        summary: json!({
            "plan": plan.to_json(),
            "sets": literals,
            "n": cfg.n,
            "classification": if tower.is_finite() { "finite" } else { "infinite" },
            "rows": rows_to_json(&rows),
        }),
        lines,
        pass,
    })
}

fn mixing_json(times: &[MixingTime]) -> Value {
    Value::Array(
        times
            .iter()
            .map(|m| json!({"N": m.n, "score": to_f64(&m.score), "pairwise": to_f64(&m.pairwise)}))
            .collect(),
    )
}

fn asymmetry(cfg: &RunConfig) -> Result<Outcome> {
    let theorem3 = cfg.experiment == Experiment::Theorem3;
    let last = *cfg.stages.iter().max().unwrap();
    let first = *cfg.stages.iter().min().unwrap();
    let depth = last + cfg.depth;
    let plan = if theorem3 {
        plan_or(cfg, |k| theorem3_plan(k, THEOREM3_N_MAX), depth + 1)?
    } else {
        plan_or(cfg, theorem4_plan, depth + 1)?
    };
    let tower = build_tower(&plan, depth)?;
    let default = if theorem3 {
        r#"{"stage": 3, "measure": "1/5"}"#
    } else {
        r#"{"stage": 2, "levels": [0]}"#
    };
    let (sets, literals) = match cfg.sets.len() {
        0 | 1 => sets_or_default(cfg, &tower, 1, default)?,
        _ if theorem3 => sets_or_default(cfg, &tower, 3, default)?,
        n => {
            return Err(Error::Parse(format!(
                "theorem4 expects one level set, got {n}"
            )))
        }
    };
    let a = &sets[0];
    let n_max = cfg.stages.iter().map(|&j| plan.stage(j).n).max().unwrap();
    let probe_depth = first + cfg.depth;
    let target = if theorem3 {
        MixingTarget::Product
    } else {
        MixingTarget::Zero
    };
    let times = find_mixing_times(&tower, &[[a, a, a]], 1..=n_max, target, probe_depth)?;
    let schedule = select_schedule(&tower, &times, &cfg.stages);
    if schedule.is_empty() {
        return Err(Error::Precondition(
            "no tested stage realizes the selected mixing time".into(),
        ));
    }
    let report = if theorem3 {
        let general = (sets.len() == 3).then(|| [&sets[0], &sets[1], &sets[2]]);
        theorem3_run(&tower, a, &schedule, cfg.depth, &cfg.tolerances, general)?
    } else {
        theorem4_run(&tower, a, &schedule, cfg.depth, &cfg.tolerances)?
    };
    let mut lines: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "j={:>2} N_j={} forward=[{:.6}, {:.6}] backward=[{:.6}, {:.6}] mu(A and T^N A)<={:.3e}",
                r.j,
                r.mixing_n,
                to_f64(r.forward.lo()),
                to_f64(&r.forward.hi()),
                to_f64(r.backward.lo()),
                to_f64(&r.backward.hi()),
                to_f64(&r.pairwise.hi())
            )
        })
        .collect();
    lines.push(format!(
        "mu(A)={:.6} forward target={:.6} backward target={:.6} errors=({:.3e}, {:.3e}) tolerance={:.3e} separation={:.4}",
        to_f64(&report.measure_a),
        to_f64(&report.forward_target),
        to_f64(&report.backward_target),
        to_f64(&report.forward_error),
        to_f64(&report.backward_error),
        to_f64(&report.tolerance),
        to_f64(&report.separation)
    ));
    let schedule_note = "N_j: best-scoring mixing time with N_j^2 <= h_j, nondecreasing; \
                         only stages whose block parameter equals N_j are tested";
    Ok(Outcome {
        csv: report.to_csv(),
        summary: json!({
            "plan": plan.to_json(),
            "sets": literals,
            "classification": if tower.is_finite() { "finite" } else { "infinite" },
            "mixing_times": mixing_json(&times),
            "schedule_rule": schedule_note,
            "result": report.to_json(),
            "target_at_nominal_measure": if theorem3 {
                json!({"p": "1/5", "forward": fmt_exact(&ratio(27, 375)), "backward": fmt_exact(&ratio(1, 25))})
            } else {
                Value::Null
            },
        }),
        lines,
        pass: report.pass,
    })
}
