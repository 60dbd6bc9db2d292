use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Spacer height parameter `H` of a stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Height {
    Fixed(u64),
    /// `H_j = h_j`: the fast-growth choice that makes the total measure infinite.
    Auto,
}

impl Height {
    pub fn resolve(&self, h_j: u128) -> u128 {
        match *self {
            Height::Fixed(h) => h as u128,
            Height::Auto => h_j,
        }
    }
}

/// Stage parameters: spacer array `(H, H + 2N, H + N)` repeated `L` times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StageSpec {
    pub n: u64,
    pub l: u64,
    pub h: Height,
}

impl StageSpec {
    pub fn new(n: u64, l: u64, h: Height) -> Result<Self> {
        if n == 0 || l == 0 {
            return Err(Error::parse(format!(
                "stage needs N ≥ 1 and L ≥ 1, got N={n}, L={l}"
            )));
        }
        Ok(StageSpec { n, l, h })
    }

    /// Cut count `r = 3L`.
    pub fn cuts(&self) -> u64 {
        3 * self.l
    }

    /// Spacer counts `s[0..r)` for a stage of height `h_j`.
    pub fn spacers(&self, h_j: u128) -> Vec<u128> {
        let h = self.h.resolve(h_j);
        let n = self.n as u128;
        (0..self.l).flat_map(|_| [h, h + 2 * n, h + n]).collect()
    }
}

/// A rank-one construction: initial height `h0` (stage 0 is `h0` levels of
/// width 1) and a stage list whose last entry repeats forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacerPlan {
    pub h0: u64,
    stages: Vec<StageSpec>,
}

#[derive(Serialize, Deserialize)]
struct PlanJson {
    h0: u64,
    stages: Vec<StageJson>,
}

#[derive(Serialize, Deserialize)]
struct StageJson {
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "L")]
    l: u64,
    #[serde(rename = "H")]
    h: HeightJson,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HeightJson {
    Fixed(u64),
    Named(String),
}

impl SpacerPlan {
    pub fn new(h0: u64, stages: Vec<StageSpec>) -> Result<Self> {
        if h0 == 0 {
            return Err(Error::parse("h0 must be positive"));
        }
        if stages.is_empty() {
            return Err(Error::parse("plan has an empty stage list"));
        }
        Ok(SpacerPlan { h0, stages })
    }

    /// One stage spec used at every stage.
    pub fn uniform(h0: u64, spec: StageSpec) -> Self {
        SpacerPlan {
            h0,
            stages: vec![spec],
        }
    }

    /// `count` explicit stages `f(0), …, f(count − 1)`; the last one repeats.
    pub fn from_fn(h0: u64, count: usize, f: impl Fn(usize) -> StageSpec) -> Result<Self> {
        SpacerPlan::new(h0, (0..count).map(f).collect())
    }

    /// Spec of stage `j` (the last explicit stage repeats).
    pub fn stage(&self, j: usize) -> &StageSpec {
        &self.stages[j.min(self.stages.len() - 1)]
    }

    pub fn explicit_stages(&self) -> &[StageSpec] {
        &self.stages
    }

    /// Finite total measure iff the repeating tail has a fixed `H`.
    pub fn is_finite(&self) -> bool {
        matches!(self.stages.last().unwrap().h, Height::Fixed(_))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PlanJson =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("plan JSON: {e}")))?;
        let stages = raw
            .stages
            .into_iter()
            .map(|s| {
                let h = match s.h {
                    HeightJson::Fixed(h) => Height::Fixed(h),
                    HeightJson::Named(ref name) if name == "auto-height" => Height::Auto,
                    HeightJson::Named(name) => {
                        return Err(Error::parse(format!("unknown H value {name:?}")));
                    }
                };
                StageSpec::new(s.n, s.l, h)
            })
            .collect::<Result<Vec<_>>>()?;
        SpacerPlan::new(raw.h0, stages)
    }

    pub fn load(path: &Path) -> Result<Self> {
        SpacerPlan::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = PlanJson {
            h0: self.h0,
            stages: self
                .stages
                .iter()
                .map(|s| StageJson {
                    n: s.n,
                    l: s.l,
                    h: match s.h {
                        Height::Fixed(h) => HeightJson::Fixed(h),
                        Height::Auto => HeightJson::Named("auto-height".into()),
                    },
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("plan serializes")
    }
}
