use num_traits::One;

use crate::rational::{from_u128, int};
use crate::{Error, Rational, Result};

use super::plan::{SpacerPlan, StageSpec};

/// Largest stage index [`build_tower`] accepts.
pub const DEFAULT_STAGE_CAP: usize = 64;
/// Largest stage height that dense level vectors may use.
pub const DEFAULT_LEVEL_CAP: u128 = 1 << 28;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStage {
    pub index: usize,
    pub spec: StageSpec,
    pub height: u128,
    pub width: Rational,
    /// Resolved spacer height `H_j`.
    pub spacer_height: u128,
    /// Spacers placed on top of each column when forming stage `j + 1`.
    pub spacers: Vec<u128>,
    /// Level of stage `j + 1` where column `c` starts.
    pub base_offsets: Vec<u128>,
}

impl TowerStage {
    fn new(index: usize, spec: StageSpec, height: u128, width: Rational) -> Result<Self> {
        let spacers = spec.spacers(height);
        let mut base_offsets = Vec::with_capacity(spacers.len());
        let mut pos: u128 = 0;
        for &s in &spacers {
            base_offsets.push(pos);
            pos = pos
                .checked_add(height)
                .and_then(|p| p.checked_add(s))
                .ok_or_else(|| overflow(index + 1))?;
        }
        Ok(TowerStage {
            index,
            spacer_height: spec.h.resolve(height),
            spec,
            height,
            width,
            spacers,
            base_offsets,
        })
    }

    pub fn cuts(&self) -> usize {
        self.spacers.len()
    }

    /// `h_{j+1} = r_j h_j + Σ_i s_j[i]`.
    pub fn next_height(&self) -> u128 {
        self.base_offsets[self.cuts() - 1] + self.height + self.spacers[self.cuts() - 1]
    }

    pub fn next_width(&self) -> Rational {
        &self.width / int(self.cuts() as u64)
    }

    /// `μ_j = h_j · w_j`.
    pub fn measure(&self) -> Rational {
        from_u128(self.height) * &self.width
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Finite { limit: Rational },
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerLimits {
    pub depth: usize,
    /// `μ_J` at the built depth.
    pub measure_at_depth: Rational,
    pub classification: Classification,
}

/// Stages `0..=J` of a plan's construction.
#[derive(Clone, Debug)]
pub struct Tower {
    plan: SpacerPlan,
    stages: Vec<TowerStage>,
    limits: TowerLimits,
    level_cap: u128,
}

fn overflow(stage: usize) -> Error {
    Error::ResourceCap {
        what: "tower height (u128)",
        needed: u128::MAX,
        cap: stage as u128,
    }
}

fn stages_up_to(plan: &SpacerPlan, last: usize) -> Result<Vec<TowerStage>> {
    let mut out: Vec<TowerStage> = Vec::with_capacity(last + 1);
    out.push(TowerStage::new(0, *plan.stage(0), plan.h0 as u128, int(1))?);
    for j in 1..=last {
        let prev = &out[j - 1];
        let st = TowerStage::new(j, *plan.stage(j), prev.next_height(), prev.next_width())?;
        out.push(st);
    }
    Ok(out)
}

/// Finite plans: the stage spec is constant from the last explicit stage `K`
/// on, so `μ_total = μ_K + L(3H + 3N) w_K / (3L − 1)`.
fn classify(plan: &SpacerPlan, stages: &[TowerStage]) -> Classification {
    if !plan.is_finite() {
        return Classification::Infinite;
    }
    let k = plan.explicit_stages().len() - 1;
    let st = &stages[k];
    let added: u128 = st.spacers.iter().sum();
    let r = st.cuts() as u64;
    Classification::Finite {
        limit: st.measure() + from_u128(added) * &st.width / int(r - 1),
    }
}

/// Builds stages `0..=depth`. Heights are exact `u128`; only dense level
/// vectors are subject to the level cap (see [`Tower::level_cap`]).
pub fn build_tower(plan: &SpacerPlan, depth: usize) -> Result<Tower> {
    if depth > DEFAULT_STAGE_CAP {
        return Err(Error::ResourceCap {
            what: "tower depth",
            needed: depth as u128,
            cap: DEFAULT_STAGE_CAP as u128,
        });
    }
    let k = plan.explicit_stages().len() - 1;
    let mut stages = stages_up_to(plan, depth.max(k))?;
    let classification = classify(plan, &stages);
    stages.truncate(depth + 1);
    Ok(Tower {
        plan: plan.clone(),
        limits: TowerLimits {
            depth,
            measure_at_depth: stages[depth].measure(),
            classification,
        },
        stages,
        level_cap: DEFAULT_LEVEL_CAP,
    })
}

impl Tower {
    pub fn with_level_cap(mut self, cap: u128) -> Self {
        self.level_cap = cap;
        self
    }

    pub fn level_cap(&self) -> u128 {
        self.level_cap
    }

    pub fn plan(&self) -> &SpacerPlan {
        &self.plan
    }

    pub fn depth(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stages(&self) -> &[TowerStage] {
        &self.stages
    }

    pub fn stage(&self, j: usize) -> &TowerStage {
        &self.stages[j]
    }

    pub fn height(&self, j: usize) -> u128 {
        self.stages[j].height
    }

    pub fn width(&self, j: usize) -> &Rational {
        &self.stages[j].width
    }

    /// `μ_j` for `j ≤ depth + 1`.
    pub fn measure_at(&self, j: usize) -> Rational {
        if j == self.stages.len() {
            let top = self.stages.last().unwrap();
            return from_u128(top.next_height()) * top.next_width();
        }
        self.stages[j].measure()
    }

    pub fn limits(&self) -> &TowerLimits {
        &self.limits
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.limits.classification, Classification::Finite { .. })
    }

    /// Total measure of the limit transformation, `None` when infinite.
    pub fn total_measure(&self) -> Option<&Rational> {
        match &self.limits.classification {
            Classification::Finite { limit } => Some(limit),
            Classification::Infinite => None,
        }
    }

    /// Divisor turning raw measures into normalized ones: `μ_total` for
    /// finite plans, 1 otherwise.
    pub fn normalizer(&self) -> Rational {
        self.total_measure().cloned().unwrap_or_else(Rational::one)
    }

    /// Checks that a dense vector of `h_j` levels fits the level cap.
    pub fn dense_height(&self, j: usize) -> Result<usize> {
        let h = self.height(j);
        if h > self.level_cap {
            return Err(Error::ResourceCap {
                what: "dense level vector",
                needed: h,
                cap: self.level_cap,
            });
        }
        Ok(h as usize)
    }

    /// Column `c` of stage `j` viewed in stage `j + 1`: `(base, spacer count)`.
    pub fn column(&self, j: usize, c: usize) -> (u128, u128) {
        let st = &self.stages[j];
        (st.base_offsets[c], st.spacers[c])
    }
}

/// `n_j = h_j + H_j + N_j`.
pub fn mixing_sequence_n(tower: &Tower, j: usize) -> u128 {
    let st = tower.stage(j);
    st.height + st.spacer_height + st.spec.n as u128
}
