use std::fmt;

use crate::gf2_dual::Character;
use crate::literal::{self, Value};
use crate::{Error, Result};

use super::window::cell_functional;

/// Translation `(t, s)`: `t` along the `T` (first) axis, `s` along `S`.
pub type Shift = (i64, i64);

/// `a(z1, z2) = value` with `z2 ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CylinderConstraint {
    z1: i64,
    z2: i64,
    pub value: bool,
}

impl CylinderConstraint {
    pub fn new(z1: i64, z2: i64, value: bool) -> Result<Self> {
        if z2 < 0 {
            return Err(Error::precondition(format!(
                "cylinder cell ({z1},{z2}) lies below the half-plane z2 ≥ 0"
            )));
        }
        Ok(CylinderConstraint { z1, z2, value })
    }

    pub fn cell(&self) -> (i64, i64) {
        (self.z1, self.z2)
    }
}

/// A measurable set of configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSpec {
    /// `{a : χ(a) = -1}`.
    CharacterSet(Character),
    /// All constraints hold.
    Cylinder(Vec<CylinderConstraint>),
}

impl SetSpec {
    /// Parses `"character: [(e1,e2),...]"` or `"cylinder: [((z1,z2),bit),...]"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').ok_or_else(|| {
            Error::parse(format!(
                "set spec {s:?} needs a 'character:' or 'cylinder:' prefix"
            ))
        })?;
        match kind.trim() {
            "character" => Ok(SetSpec::CharacterSet(Character::parse(body)?)),
            "cylinder" => {
                let v = literal::parse(body)?;
                let mut out = Vec::new();
                for item in v.as_list()? {
                    let Value::Tuple(parts) = item else {
                        return Err(Error::parse(format!(
                            "expected ((z1,z2),bit), found {item:?}"
                        )));
                    };
                    if parts.len() != 2 {
                        return Err(Error::parse(format!(
                            "expected ((z1,z2),bit), found {item:?}"
                        )));
                    }
                    let (z1, z2) = parts[0].as_pair()?;
                    let bit = match parts[1].as_int()? {
                        0 => false,
                        1 => true,
                        b => {
                            return Err(Error::parse(format!(
                                "cylinder bit must be 0 or 1, got {b}"
                            )))
                        }
                    };
                    out.push(CylinderConstraint::new(z1, z2, bit)?);
                }
                Ok(SetSpec::Cylinder(out))
            }
            other => Err(Error::parse(format!("unknown set kind {other:?}"))),
        }
    }

    fn cells(&self) -> Vec<(i64, i64)> {
        match self {
            SetSpec::CharacterSet(c) => c.poly.support().iter().copied().collect(),
            SetSpec::Cylinder(cs) => cs.iter().map(|c| c.cell()).collect(),
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::CharacterSet(c) => write!(f, "character: {}", c.poly.to_literal()),
            SetSpec::Cylinder(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|c| format!("(({},{}),{})", c.z1, c.z2, c.value as u8))
                    .collect();
                write!(f, "cylinder: [{}]", parts.join(","))
            }
        }
    }
}

/// Caps on the row-0 window a query may need.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowCap {
    pub max_width: usize,
    pub max_height: usize,
}

impl Default for WindowCap {
    fn default() -> Self {
        WindowCap {
            max_width: 1 << 16,
            max_height: 1 << 16,
        }
    }
}

/// Affine condition `Σ_{c ∈ columns} a(c, 0) = value` over F₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub columns: Vec<usize>,
    pub value: bool,
}

/// A correlation query after half-plane normalization: the intersection of
/// the shifted sets is the solution set of `equations` in the row-0 bits
/// `0 .. width`.
#[derive(Clone, Debug)]
pub struct CompiledQuery {
    pub width: usize,
    pub height: usize,
    pub equations: Vec<Equation>,
}

impl CompiledQuery {
    /// Translates every evaluated cell by a common vector so the minimum
    /// coordinates are 0 (valid by S- and T-invariance of Haar measure), then
    /// expresses each condition through row 0.
    pub fn compile(items: &[(SetSpec, Shift)], cap: WindowCap) -> Result<Self> {
        let shifted: Vec<Vec<(i64, i64)>> = items
            .iter()
            .map(|(set, (t, s))| {
                set.cells()
                    .into_iter()
                    .map(|(a, b)| (a + t, b + s))
                    .collect()
            })
            .collect();
        let all = shifted.iter().flatten();
        let min1 = all.clone().map(|c| c.0).min().unwrap_or(0);
        let min2 = all.clone().map(|c| c.1).min().unwrap_or(0);
        let mut height: u128 = 0;
        let mut reach: u128 = 0;
        for &(a, b) in all {
            let (a, b) = ((a - min1) as u128, (b - min2) as u128);
            height = height.max(b);
            reach = reach.max(a + b);
        }
        let width = reach + 1;
        if width > cap.max_width as u128 {
            return Err(Error::ResourceCap {
                what: "row-0 window width",
                needed: width,
                cap: cap.max_width as u128,
            });
        }
        if height > cap.max_height as u128 {
            return Err(Error::ResourceCap {
                what: "window height",
                needed: height,
                cap: cap.max_height as u128,
            });
        }
        let functional = |(a, b): (i64, i64)| -> Vec<usize> {
            cell_functional(a - min1, (b - min2) as u64)
                .into_iter()
                .map(|c| c as usize)
                .collect()
        };
        let mut equations = Vec::new();
        for ((set, _), cells) in items.iter().zip(&shifted) {
            match set {
                SetSpec::CharacterSet(_) => {
                    let mut cols: Vec<usize> = cells.iter().flat_map(|&c| functional(c)).collect();
                    cols.sort_unstable();
                    equations.push(Equation {
                        columns: cancel_pairs(cols),
                        value: true,
                    });
                }
                SetSpec::Cylinder(cs) => {
                    for (c, &cell) in cs.iter().zip(cells) {
                        equations.push(Equation {
                            columns: functional(cell),
                            value: c.value,
                        });
                    }
                }
            }
        }
        Ok(CompiledQuery {
            width: width as usize,
            height: height as usize,
            equations,
        })
    }
}

/// Keeps the elements of a sorted list that occur an odd number of times.
fn cancel_pairs(sorted: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(sorted.len());
    for c in sorted {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

/// Convenience for literal shifts `"(t,s)"`.
pub fn parse_shift(s: &str) -> Result<Shift> {
    literal::parse_pair(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_set_specs() {
        let s = SetSpec::parse("character: [(0,0),(1,0)]").unwrap();
        assert_eq!(s.to_string(), "character: [(0,0),(1,0)]");
        let c = SetSpec::parse("cylinder: [((0,0),1), ((2,3),0)]").unwrap();
        assert_eq!(c.to_string(), "cylinder: [((0,0),1),((2,3),0)]");
        assert!(SetSpec::parse("cylinder: [((0,-1),1)]").is_err());
        assert!(SetSpec::parse("cylinder: [((0,0),2)]").is_err());
        assert!(SetSpec::parse("blob: []").is_err());
        assert_eq!(parse_shift("(3,-4)").unwrap(), (3, -4));
    }

    #[test]
    fn normalization_lifts_negative_shifts() {
        let a = SetSpec::parse("cylinder: [((0,0),1)]").unwrap();
        let q = CompiledQuery::compile(
            &[(a.clone(), (0, 0)), (a.clone(), (0, -4)), (a, (-4, 0))],
            WindowCap::default(),
        )
        .unwrap();
        // cells (4,4), (4,0), (0,4)
        assert_eq!(q.height, 4);
        assert_eq!(q.width, 9);
        assert_eq!(q.equations[0].columns, vec![4, 8]);
        assert_eq!(q.equations[1].columns, vec![4]);
        assert_eq!(q.equations[2].columns, vec![0, 4]);
    }

    #[test]
    fn trivial_character_compiles_to_empty_functional() {
        let s = SetSpec::parse("character: [(0,0),(1,0),(0,1)]").unwrap();
        let q = CompiledQuery::compile(&[(s, (5, 7))], WindowCap::default()).unwrap();
        assert!(q.equations[0].columns.is_empty());
    }

    #[test]
    fn oversized_windows_are_rejected() {
        let a = SetSpec::parse("cylinder: [((0,0),1)]").unwrap();
        let cap = WindowCap {
            max_width: 100,
            max_height: 100,
        };
        let err = CompiledQuery::compile(&[(a.clone(), (0, 0)), (a, (0, 200))], cap).unwrap_err();
        assert!(err.is_resource_cap());
    }
}
