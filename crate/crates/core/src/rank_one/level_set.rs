use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bits::BitSet;
use crate::rational::int;
use crate::{Error, Rational, Result};

use super::tower::Tower;

/// A union of levels of one stage. When `later_spacers` is set the set also
/// contains every spacer level created after that stage, so the whole space
/// and complements are representable and refinement commutes with
/// complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    stage: usize,
    levels: BitSet,
    later_spacers: bool,
}

impl LevelSet {
    pub fn new(tower: &Tower, stage: usize, levels: BitSet) -> Result<Self> {
        check_stage(tower, stage)?;
        let h = tower.dense_height(stage)?;
        if levels.len() != h {
            return Err(Error::precondition(format!(
                "level vector has length {}, stage {stage} has {h} levels",
                levels.len()
            )));
        }
        Ok(LevelSet {
            stage,
            levels,
            later_spacers: false,
        })
    }

    pub fn from_levels(
        tower: &Tower,
        stage: usize,
        levels: impl IntoIterator<Item = u128>,
    ) -> Result<Self> {
        check_stage(tower, stage)?;
        let h = tower.dense_height(stage)?;
        let mut bits = BitSet::new(h);
        for l in levels {
            if l >= h as u128 {
                return Err(Error::precondition(format!(
                    "level {l} outside stage {stage} (height {h})"
                )));
            }
            bits.set(l as usize, true);
        }
        LevelSet::new(tower, stage, bits)
    }

    /// Union of half-open level ranges `[a, b)`.
    pub fn from_ranges(tower: &Tower, stage: usize, ranges: &[(u128, u128)]) -> Result<Self> {
        check_stage(tower, stage)?;
        let h = tower.dense_height(stage)?;
        let mut bits = BitSet::new(h);
        for &(a, b) in ranges {
            if a > b || b > h as u128 {
                return Err(Error::precondition(format!(
                    "range {a}..{b} outside stage {stage} (height {h})"
                )));
            }
            bits.set_range(a as usize, b as usize);
        }
        LevelSet::new(tower, stage, bits)
    }

    pub fn empty(tower: &Tower, stage: usize) -> Result<Self> {
        LevelSet::from_ranges(tower, stage, &[])
    }

    /// Every level of stage `stage`.
    pub fn tower_at(tower: &Tower, stage: usize) -> Result<Self> {
        LevelSet::from_ranges(tower, stage, &[(0, tower.height(stage))])
    }

    /// The whole phase space.
    pub fn whole_space(tower: &Tower) -> Result<Self> {
        Ok(LevelSet::tower_at(tower, 0)?.with_later_spacers(true))
    }

    /// `count` distinct levels of stage `stage` drawn uniformly by a seeded generator.
    pub fn random(tower: &Tower, stage: usize, count: usize, seed: u64) -> Result<Self> {
        check_stage(tower, stage)?;
        let h = tower.dense_height(stage)?;
        if count > h {
            return Err(Error::precondition(format!(
                "cannot pick {count} of {h} levels"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked = sample(&mut rng, h, count);
        LevelSet::new(tower, stage, BitSet::from_indices(h, picked.iter()))
    }

    pub fn with_later_spacers(mut self, on: bool) -> Self {
        self.later_spacers = on;
        self
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn levels(&self) -> &BitSet {
        &self.levels
    }

    pub fn includes_later_spacers(&self) -> bool {
        self.later_spacers
    }

    pub fn count(&self) -> u64 {
        self.levels.count_ones()
    }

    pub fn contains_level(&self, level: u128) -> bool {
        level < self.levels.len() as u128 && self.levels.get(level as usize)
    }

    /// Exact measure. Sets containing later spacers of an infinite plan have
    /// infinite measure and are rejected.
    pub fn measure(&self, tower: &Tower) -> Result<Rational> {
        let own = int(self.count()) * tower.width(self.stage);
        if !self.later_spacers {
            return Ok(own);
        }
        match tower.total_measure() {
            Some(total) => Ok(own + total - tower.measure_at(self.stage)),
            None => Err(Error::precondition(
                "set containing all later spacers has infinite measure",
            )),
        }
    }

    /// The same set written as levels of stage `target ≥ stage`: level `ℓ`
    /// of stage `j` becomes levels `base_offsets[c] + ℓ` of stage `j + 1`.
    pub fn refine(&self, tower: &Tower, target: usize) -> Result<LevelSet> {
        if target < self.stage {
            return Err(Error::precondition(format!(
                "cannot refine stage {} to stage {target}",
                self.stage
            )));
        }
        check_stage(tower, target)?;
        tower.dense_height(target)?;
        let mut cur = self.levels.clone();
        for j in self.stage..target {
            let st = tower.stage(j);
            let mut next = BitSet::new(tower.height(j + 1) as usize);
            for (c, &o) in st.base_offsets.iter().enumerate() {
                next.or_shifted(&cur, o as usize);
                if self.later_spacers {
                    let top = (o + st.height) as usize;
                    next.set_range(top, top + st.spacers[c] as usize);
                }
            }
            cur = next;
        }
        Ok(LevelSet {
            stage: target,
            levels: cur,
            later_spacers: self.later_spacers,
        })
    }

    pub fn complement(&self) -> LevelSet {
        LevelSet {
            stage: self.stage,
            levels: self.levels.complement(),
            later_spacers: !self.later_spacers,
        }
    }

    fn combine(
        &self,
        other: &LevelSet,
        tower: &Tower,
        bits: impl Fn(&mut BitSet, &BitSet),
        flag: impl Fn(bool, bool) -> bool,
    ) -> Result<LevelSet> {
        let stage = self.stage.max(other.stage);
        let mut a = self.refine(tower, stage)?;
        let b = other.refine(tower, stage)?;
        bits(&mut a.levels, &b.levels);
        a.later_spacers = flag(a.later_spacers, b.later_spacers);
        Ok(a)
    }

    pub fn union(&self, other: &LevelSet, tower: &Tower) -> Result<LevelSet> {
        self.combine(other, tower, |a, b| a.or_with(b), |x, y| x || y)
    }

    pub fn intersection(&self, other: &LevelSet, tower: &Tower) -> Result<LevelSet> {
        self.combine(other, tower, |a, b| a.and_with(b), |x, y| x && y)
    }

    pub fn difference(&self, other: &LevelSet, tower: &Tower) -> Result<LevelSet> {
        self.intersection(&other.complement(), tower)
    }

    pub fn symmetric_difference(&self, other: &LevelSet, tower: &Tower) -> Result<LevelSet> {
        self.combine(other, tower, |a, b| a.xor_with(b), |x, y| x != y)
    }

    /// Parses `{"stage": j, "levels": [ℓ | [a, b], …]}` where `[a, b]` is the
    /// half-open range `a ≤ ℓ < b`; `"levels": "all"` selects every level.
    /// An optional `"later_spacers": true` adds all later spacer levels.
    pub fn from_json(tower: &Tower, value: &Value) -> Result<LevelSet> {
        let bad = |msg: &str| Error::parse(format!("level-set literal: {msg}"));
        let stage = value
            .get("stage")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing integer \"stage\""))? as usize;
        let levels = value
            .get("levels")
            .ok_or_else(|| bad("missing \"levels\""))?;
        let mut ranges = Vec::new();
        if levels.as_str() == Some("all") {
            check_stage(tower, stage)?;
            ranges.push((0, tower.height(stage)));
        } else {
            for item in levels
                .as_array()
                .ok_or_else(|| bad("\"levels\" must be a list or \"all\""))?
            {
                if let Some(l) = item.as_u64() {
                    ranges.push((l as u128, l as u128 + 1));
                } else {
                    let pair = item
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .and_then(|p| Some((p[0].as_u64()?, p[1].as_u64()?)))
                        .ok_or_else(|| bad("entries must be levels or [a, b] ranges"))?;
                    ranges.push((pair.0 as u128, pair.1 as u128));
                }
            }
        }
        let later = match value.get("later_spacers") {
            None => false,
            Some(v) => v
                .as_bool()
                .ok_or_else(|| bad("\"later_spacers\" must be a boolean"))?,
        };
        Ok(LevelSet::from_ranges(tower, stage, &ranges)?.with_later_spacers(later))
    }

    pub fn parse(tower: &Tower, text: &str) -> Result<LevelSet> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("level-set literal: {e}")))?;
        LevelSet::from_json(tower, &value)
    }

    /// Literal form with maximal runs as ranges.
    pub fn to_json(&self) -> Value {
        let mut runs: Vec<Value> = Vec::new();
        let mut ones = self.levels.iter_ones().peekable();
        while let Some(a) = ones.next() {
            let mut b = a + 1;
            while ones.peek() == Some(&b) {
                ones.next();
                b += 1;
            }
            runs.push(if b == a + 1 { json!(a) } else { json!([a, b]) });
        }
        let mut v = json!({"stage": self.stage, "levels": runs});
        if self.later_spacers {
            v["later_spacers"] = json!(true);
        }
        v
    }
}

fn check_stage(tower: &Tower, stage: usize) -> Result<()> {
    if stage > tower.depth() {
        return Err(Error::precondition(format!(
            "stage {stage} is deeper than the built tower (depth {})",
            tower.depth()
        )));
    }
    Ok(())
}
