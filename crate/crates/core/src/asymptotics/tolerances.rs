use serde_json::{json, Value};

use crate::rational::{fmt_exact, parse, ratio};
use crate::{Error, Rational, Result};

/// Acceptance tolerances. `theorem4` and `theorem4_pairwise` are relative to
/// `μ(A)`; the others are absolute on normalized measures.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub theorem2: Rational,
    pub backward: Rational,
    pub weak_limit: Rational,
    pub theorem3: Rational,
    pub theorem3_separation: Rational,
    pub theorem4: Rational,
    pub theorem4_pairwise: Rational,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            theorem2: ratio(5, 1000),
            backward: ratio(5, 1000),
            weak_limit: ratio(1, 100),
            theorem3: ratio(15, 1000),
            theorem3_separation: ratio(2, 100),
            theorem4: ratio(5, 100),
            theorem4_pairwise: ratio(2, 100),
        }
    }
}

const KEYS: [&str; 7] = [
    "theorem2",
    "backward",
    "weak-limit",
    "theorem3",
    "theorem3-separation",
    "theorem4",
    "theorem4-pairwise",
];

impl Tolerances {
    fn slot(&mut self, key: &str) -> Option<&mut Rational> {
        Some(match key {
            "theorem2" => &mut self.theorem2,
            "backward" => &mut self.backward,
            "weak-limit" => &mut self.weak_limit,
            "theorem3" => &mut self.theorem3,
            "theorem3-separation" => &mut self.theorem3_separation,
            "theorem4" => &mut self.theorem4,
            "theorem4-pairwise" => &mut self.theorem4_pairwise,
            _ => return None,
        })
    }

    /// Sets one tolerance from `KEY` and a decimal or `p/q` value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = parse(value)
            .ok_or_else(|| Error::parse(format!("tolerance {key}: bad number {value:?}")))?;
        if v < ratio(0, 1) {
            return Err(Error::parse(format!("tolerance {key} must be nonnegative")));
        }
        *self.slot(key).ok_or_else(|| {
            Error::parse(format!(
                "unknown tolerance {key:?}; expected one of {KEYS:?}"
            ))
        })? = v;
        Ok(())
    }

    /// Sets every tolerance to `value`.
    pub fn set_all(&mut self, value: &Rational) {
        for k in KEYS {
            *self.slot(k).unwrap() = value.clone();
        }
    }

    pub fn to_json(&self) -> Value {
        let mut me = self.clone();
        let mut m = serde_json::Map::new();
        for k in KEYS {
            m.insert(k.to_string(), json!(fmt_exact(me.slot(k).unwrap())));
        }
        Value::Object(m)
    }
}
