use rayon::prelude::*;
use serde_json::{json, Value};

use crate::rank_one::{mixing_sequence_n, CertifiedMeasure, Correlator, LevelSet, Tower};
use crate::rational::{fmt_exact, int, max, to_f64};
use crate::{Error, Rational, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub j: usize,
    pub h_j: u128,
    pub n_j: u128,
    /// The two non-trivial shifts of the left-hand side.
    pub k: i128,
    pub m: i128,
    pub depth: usize,
    /// Left-hand side at stage `j` (normalized).
    pub lhs: CertifiedMeasure,
    /// Limit formula evaluated with small shifts (normalized).
    pub rhs: CertifiedMeasure,
    /// Distance from `rhs.value` to the `lhs` interval.
    pub gap: Rational,
    /// Largest distance between any point of `lhs` and any point of `rhs`.
    pub certified_gap: Rational,
    pub pass: bool,
}

pub const CSV_HEADER: &str =
    "j,h_j,n_j,k,m,lhs_lo,lhs_hi,rhs,gap,verdict,lhs_lo_f,lhs_hi_f,rhs_f,gap_f,certified_gap,certified_gap_f";

fn certified_gap(lhs: &CertifiedMeasure, rhs: &CertifiedMeasure) -> Rational {
    max(max(lhs.hi() - rhs.lo(), rhs.hi() - lhs.lo()), int(0))
}

fn third(parts: &[CertifiedMeasure]) -> CertifiedMeasure {
    let mut v = int(0);
    let mut b = int(0);
    for p in parts {
        v += &p.value;
        b += &p.bound;
    }
    CertifiedMeasure {
        value: v / int(3),
        bound: b / int(3),
    }
}

/// One table row: `lhs_shifts` for the left side, `rhs_shifts` averaged for
/// the right side, all over the same sets at depth `j + depth_offset`.
fn row(
    tower: &Tower,
    sets: &[&LevelSet],
    j: usize,
    depth_offset: usize,
    lhs_shifts: Vec<i128>,
    rhs_shifts: &[Vec<i128>],
    tol: &Rational,
) -> Result<ConvergenceRow> {
    let depth = j + depth_offset;
    let norm = tower.normalizer();
    let mut eng = Correlator::new(tower, sets, depth)?;
    let lhs = eng.certified(&lhs_shifts)?.scaled_down(&norm);
    let parts = rhs_shifts
        .iter()
        .map(|s| eng.certified(s))
        .collect::<Result<Vec<_>>>()?;
    let rhs = third(&parts).scaled_down(&norm);
    let gap = lhs.distance_to(rhs.lo());
    let cg = certified_gap(&lhs, &rhs);
    Ok(ConvergenceRow {
        j,
        h_j: tower.height(j),
        n_j: mixing_sequence_n(tower, j),
        k: lhs_shifts[1],
        m: lhs_shifts.get(2).copied().unwrap_or(0),
        depth,
        pass: &cg <= tol,
        lhs,
        rhs,
        gap,
        certified_gap: cg,
    })
}

fn matching_stages(
    tower: &Tower,
    n: u64,
    stages: &[usize],
    depth_offset: usize,
) -> Result<Vec<usize>> {
    let out: Vec<usize> = stages
        .iter()
        .copied()
        .filter(|&j| tower.plan().stage(j).n == n)
        .collect();
    if out.is_empty() {
        return Err(Error::precondition(format!(
            "no tested stage has block parameter N = {n}"
        )));
    }
    let deepest = out.iter().max().unwrap() + depth_offset;
    if deepest > tower.depth() {
        return Err(Error::precondition(format!(
            "stage {deepest} needed but the tower is built to {}",
            tower.depth()
        )));
    }
    Ok(out)
}

fn build_rows(
    tower: &Tower,
    sets: &[&LevelSet],
    stages: &[usize],
    depth_offset: usize,
    tol: &Rational,
    shifts: impl Fn(i128) -> (Vec<i128>, Vec<Vec<i128>>) + Sync,
) -> Result<Vec<ConvergenceRow>> {
    stages
        .par_iter()
        .map(|&j| {
            let (lhs, rhs) = shifts(mixing_sequence_n(tower, j) as i128);
            row(tower, sets, j, depth_offset, lhs, &rhs, tol)
        })
        .collect()
}

/// `μ(A ∩ T^{n_j+N}B ∩ T^{2n_j}C)` against
/// `(μ(A ∩ T^N B ∩ T^{-N}C) + μ(A ∩ T^{2N}B ∩ T^N C) + μ(A ∩ B ∩ C)) / 3`
/// for every stage in `stages` whose block parameter is `N`.
pub fn theorem2_table(
    tower: &Tower,
    n: u64,
    sets: [&LevelSet; 3],
    stages: &[usize],
    depth_offset: usize,
    tol: &Rational,
) -> Result<Vec<ConvergenceRow>> {
    let stages = matching_stages(tower, n, stages, depth_offset)?;
    let n = n as i128;
    build_rows(tower, &sets, &stages, depth_offset, tol, |nj| {
        (
            vec![0, nj + n, 2 * nj],
            vec![vec![0, n, -n], vec![0, 2 * n, n], vec![0, 0, 0]],
        )
    })
}

/// `μ(A ∩ T^{-n_j-N}B ∩ T^{-2n_j}C)` against
/// `(μ(A ∩ B ∩ T^N C) + μ(A ∩ T^{-N}B ∩ T^{-N}C) + μ(A ∩ T^{-2N}B ∩ C)) / 3`.
pub fn backward_table(
    tower: &Tower,
    n: u64,
    sets: [&LevelSet; 3],
    stages: &[usize],
    depth_offset: usize,
    tol: &Rational,
) -> Result<Vec<ConvergenceRow>> {
    let stages = matching_stages(tower, n, stages, depth_offset)?;
    let n = n as i128;
    build_rows(tower, &sets, &stages, depth_offset, tol, |nj| {
        (
            vec![0, -nj - n, -2 * nj],
            vec![vec![0, 0, n], vec![0, -n, -n], vec![0, -2 * n, 0]],
        )
    })
}

/// `μ(A ∩ T^{n_j}B)` against `(μ(A ∩ B) + μ(A ∩ TB) + μ(A ∩ T^{-1}B)) / 3`
/// on the stages with `N = 1`.
pub fn weak_limit_check(
    tower: &Tower,
    a: &LevelSet,
    b: &LevelSet,
    stages: &[usize],
    depth_offset: usize,
    tol: &Rational,
) -> Result<Vec<ConvergenceRow>> {
    let stages = matching_stages(tower, 1, stages, depth_offset)?;
    build_rows(tower, &[a, b], &stages, depth_offset, tol, |nj| {
        (vec![0, nj], vec![vec![0, 0], vec![0, 1], vec![0, -1]])
    })
}

/// Table-level verdict: the last row passes and the last certified gap is
/// not larger than the first.
pub fn table_verdict(rows: &[ConvergenceRow]) -> bool {
    match (rows.first(), rows.last()) {
        (Some(f), Some(l)) => l.pass && l.certified_gap <= f.certified_gap,
        _ => false,
    }
}

pub fn rows_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.12e}\n",
            r.j,
            r.h_j,
            r.n_j,
            r.k,
            r.m,
            fmt_exact(r.lhs.lo()),
            fmt_exact(&r.lhs.hi()),
            fmt_exact(r.rhs.lo()),
            fmt_exact(&r.gap),
            if r.pass { "PASS" } else { "FAIL" },
            to_f64(r.lhs.lo()),
            to_f64(&r.lhs.hi()),
            to_f64(r.rhs.lo()),
            to_f64(&r.gap),
            fmt_exact(&r.certified_gap),
            to_f64(&r.certified_gap),
        ));
    }
    out
}

pub fn rows_to_json(rows: &[ConvergenceRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "j": r.j,
                    "h_j": r.h_j.to_string(),
                    "n_j": r.n_j.to_string(),
                    "k": r.k.to_string(),
                    "m": r.m.to_string(),
                    "depth": r.depth,
                    "lhs_lo": fmt_exact(r.lhs.lo()),
                    "lhs_hi": fmt_exact(&r.lhs.hi()),
                    "rhs_lo": fmt_exact(r.rhs.lo()),
                    "rhs_hi": fmt_exact(&r.rhs.hi()),
                    "gap": to_f64(&r.gap),
                    "certified_gap": to_f64(&r.certified_gap),
                    "verdict": if r.pass { "PASS" } else { "FAIL" },
                })
            })
            .collect(),
    )
}
