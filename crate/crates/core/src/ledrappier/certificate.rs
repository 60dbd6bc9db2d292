use serde_json::{json, Value};

use crate::gf2_dual::{character_set_correlation, Character};
use crate::rational::{fmt_exact, int, to_f64};
use crate::{Error, Rational, Result};

use super::mc::mc_correlation_with;
use super::query::{SetSpec, WindowCap};

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Row {
    pub m: u32,
    /// `μ(A₀ ∩ S^{2^m}A₀ ∩ T^{2^m}A₀)`.
    pub forward: Rational,
    /// `μ(A₀ ∩ S^{-2^m}A₀ ∩ T^{-2^m}A₀)`.
    pub backward: Rational,
    /// `χ · S^{2^m}χ` is nontrivial on X.
    pub pair1_nontrivial: bool,
    /// `S^{2^m}χ · T^{2^m}χ` is nontrivial on X.
    pub pair2_nontrivial: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McCrossCheck {
    pub m: u32,
    pub estimate: Rational,
    pub hits: u64,
    pub samples: u64,
    pub stderr: f64,
    pub within_4_sigma: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub chi: Character,
    pub mu_a0: Rational,
    pub rows: Vec<Theorem1Row>,
    /// Smallest `m₀` with `backward = μ(A₀)³` for every `m ∈ [m₀, m_max]`.
    pub threshold: Option<u32>,
    pub mc: Vec<McCrossCheck>,
    pub pass: bool,
}

/// Exact forward/backward triple measures of `A₀ = {χ = -1}` along
/// `n_m = 2^m` for `m = 1..=m_max`.
pub fn theorem1_certificate(chi: &Character, m_max: u32) -> Result<Theorem1Report> {
    if m_max < 1 {
        return Err(Error::precondition("m_max must be at least 1"));
    }
    if chi.is_trivial_on_x()? {
        return Err(Error::precondition("χ is trivial on X, so A₀ is empty"));
    }
    let mu_a0 = character_set_correlation(&[(chi.clone(), (0, 0))])?;
    let cube = &mu_a0 * &mu_a0 * &mu_a0;
    let mut rows = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let n = 1i64 << m;
        let triple = |d: i64| {
            character_set_correlation(&[
                (chi.clone(), (0, 0)),
                (chi.clone(), (0, d)),
                (chi.clone(), (d, 0)),
            ])
        };
        let s = chi.shifted(0, n);
        rows.push(Theorem1Row {
            m,
            forward: triple(n)?,
            backward: triple(-n)?,
            pair1_nontrivial: !chi.product(&s).is_trivial_on_x()?,
            pair2_nontrivial: !s.product(&chi.shifted(n, 0)).is_trivial_on_x()?,
        });
    }
    let mut threshold = None;
    for row in rows.iter().rev() {
        if row.backward != cube {
            break;
        }
        threshold = Some(row.m);
    }
    let pass = threshold.is_some() && rows.iter().all(|r| r.forward == int(0));
    Ok(Theorem1Report {
        chi: chi.clone(),
        mu_a0,
        rows,
        threshold,
        mc: Vec::new(),
        pass,
    })
}

impl Theorem1Report {
    /// Monte Carlo estimates of every backward value. Rows whose window would
    /// exceed `cap` are skipped.
    pub fn attach_mc(&mut self, samples: u64, seed: u64, cap: WindowCap) -> Result<()> {
        let a0 = SetSpec::CharacterSet(self.chi.clone());
        self.mc.clear();
        for row in &self.rows {
            let n = 1i64 << row.m;
            let items = [
                (a0.clone(), (0, 0)),
                (a0.clone(), (0, -n)),
                (a0.clone(), (-n, 0)),
            ];
            let est =
                match mc_correlation_with(&items, samples, seed.wrapping_add(row.m as u64), cap) {
                    Ok(e) => e,
                    Err(e) if e.is_resource_cap() => continue,
                    Err(e) => return Err(e),
                };
            self.mc.push(McCrossCheck {
                m: row.m,
                within_4_sigma: est.within_sigmas(&row.backward, 4.0),
                estimate: est.estimate,
                hits: est.hits,
                samples: est.samples,
                stderr: est.stderr,
            });
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("m,forward_exact,backward_exact,pair1_nontrivial,pair2_nontrivial\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.m,
                fmt_exact(&r.forward),
                fmt_exact(&r.backward),
                r.pair1_nontrivial,
                r.pair2_nontrivial
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "experiment": "theorem1",
            "chi": self.chi.poly.to_literal(),
            "shift_sequence": "2^m",
            "mu_a0": fmt_exact(&self.mu_a0),
            "mu_a0_cubed": fmt_exact(&(&self.mu_a0 * &self.mu_a0 * &self.mu_a0)),
            "m_max": self.rows.last().map(|r| r.m),
            "all_forward_zero": self.rows.iter().all(|r| r.forward == int(0)),
            "backward_threshold": self.threshold,
            "rows": self.rows.iter().map(|r| json!({
                "m": r.m,
                "forward_exact": fmt_exact(&r.forward),
                "backward_exact": fmt_exact(&r.backward),
                "pair1_nontrivial": r.pair1_nontrivial,
                "pair2_nontrivial": r.pair2_nontrivial,
            })).collect::<Vec<_>>(),
            "mc_cross_check": self.mc.iter().map(|c| json!({
                "m": c.m,
                "estimate": to_f64(&c.estimate),
                "hits": c.hits,
                "samples": c.samples,
                "stderr": c.stderr,
                "within_4_sigma": c.within_4_sigma,
            })).collect::<Vec<_>>(),
            "verdict": if self.pass { "PASS" } else { "FAIL" },
        })
    }
}
