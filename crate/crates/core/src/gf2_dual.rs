//! Characters of the Ledrappier group and the decision procedure for
//! "is this character identically 1 on X".
//!
//! A character `a ↦ (-1)^(Σ a(e1, e2))` over a finite support is stored as an
//! F₂ Laurent polynomial in `x` (the `T` direction, first coordinate) and `y`
//! (the `S` direction, second coordinate). Multiplying characters adds their
//! polynomials, and `S^n χ`, `T^n χ` with `(S^n χ)(a) = χ(S^n a)` multiply by
//! `y^n`, `x^n`. A character is trivial on X exactly when its polynomial lies
//! in the ideal generated by `1 + x + y`; [`reduce_mod_relation`] decides this
//! by substituting `y = 1 + x` and clearing the poles at `x` and `1 + x`.

use std::collections::BTreeSet;
use std::fmt;

use crate::bits::BitSet;
use crate::rational::{int, ratio};
use crate::{literal, Error, Rational, Result};

/// Largest exponent span (per variable) accepted by the reduction.
pub const DEGREE_CAP: u64 = 1 << 20;

/// Largest number of characters accepted by [`character_set_correlation`]
/// (the expansion has `2^k` terms).
pub const MAX_CORRELATION_ITEMS: usize = 24;

/// Finite F₂ Laurent polynomial in two variables; coefficients are implicit.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly2 {
    support: BTreeSet<(i64, i64)>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn monomial(e1: i64, e2: i64) -> Self {
        LaurentPoly2 {
            support: BTreeSet::from([(e1, e2)]),
        }
    }

    /// Sums the given monomials over F₂ (repeated terms cancel in pairs).
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut p = Self::zero();
        for t in terms {
            p.toggle(t);
        }
        p
    }

    /// Builds a polynomial from a support set, rejecting duplicates.
    pub fn from_support(terms: &[(i64, i64)]) -> Result<Self> {
        let mut support = BTreeSet::new();
        for &t in terms {
            if !support.insert(t) {
                return Err(Error::parse(format!("duplicate exponent pair {t:?}")));
            }
        }
        Ok(LaurentPoly2 { support })
    }

    /// `1 + x + y`, the defining relation of X.
    pub fn relation() -> Self {
        Self::from_terms([(0, 0), (1, 0), (0, 1)])
    }

    /// `1 + x^n + y^n`.
    pub fn sparse_relation(n: i64) -> Self {
        Self::from_terms([(0, 0), (n, 0), (0, n)])
    }

    pub fn support(&self) -> &BTreeSet<(i64, i64)> {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn toggle(&mut self, t: (i64, i64)) {
        if !self.support.remove(&t) {
            self.support.insert(t);
        }
    }

    /// F₂ addition (symmetric difference); pointwise product of characters.
    pub fn add(&self, other: &Self) -> Self {
        LaurentPoly2 {
            support: self
                .support
                .symmetric_difference(&other.support)
                .copied()
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for &(a1, a2) in &self.support {
            for &(b1, b2) in &other.support {
                out.toggle((a1 + b1, a2 + b2));
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        // Frobenius: cross terms cancel in characteristic 2.
        LaurentPoly2 {
            support: self.support.iter().map(|&(a, b)| (2 * a, 2 * b)).collect(),
        }
    }

    /// Multiplication by `x^t y^s`, i.e. the character `T^t S^s χ`.
    pub fn shift(&self, t: i64, s: i64) -> Self {
        LaurentPoly2 {
            support: self.support.iter().map(|&(a, b)| (a + t, b + s)).collect(),
        }
    }

    pub fn min_exponents(&self) -> Option<(i64, i64)> {
        let e1 = self.support.iter().map(|t| t.0).min()?;
        let e2 = self.support.iter().map(|t| t.1).min()?;
        Some((e1, e2))
    }

    /// Literal form `[(e1,e2),...]`.
    pub fn to_literal(&self) -> String {
        let parts: Vec<String> = self
            .support
            .iter()
            .map(|(a, b)| format!("({a},{b})"))
            .collect();
        format!("[{}]", parts.join(","))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::from_support(&literal::parse_pair_list(s)?)
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(a, b) in &self.support {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let var = |name: &str, e: i64| match e {
                0 => String::new(),
                1 => name.to_string(),
                e => format!("{name}^{e}"),
            };
            let term = match (var("x", a), var("y", b)) {
                (xs, ys) if xs.is_empty() && ys.is_empty() => "1".to_string(),
                (xs, ys) if xs.is_empty() => ys,
                (xs, ys) if ys.is_empty() => xs,
                (xs, ys) => format!("{xs}{ys}"),
            };
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly2({self})")
    }
}

/// Dense F₂ polynomial in one variable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Poly {
    bits: BitSet,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly {
            bits: BitSet::new(0),
        }
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = usize>) -> Self {
        let exps: Vec<usize> = exps.into_iter().collect();
        let len = exps.iter().max().map_or(0, |m| m + 1);
        let mut bits = BitSet::new(len);
        for e in exps {
            bits.toggle(e);
        }
        Gf2Poly { bits }.trimmed()
    }

    /// `(1 + x)^k`; coefficient `i` is `binom(k, i) mod 2`, odd iff `i & k == i`.
    pub fn one_plus_x_pow(k: usize) -> Self {
        let mut bits = BitSet::new(k + 1);
        toggle_submasks(&mut bits, 0, k);
        Gf2Poly { bits }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.none()
    }

    pub fn degree(&self) -> Option<usize> {
        self.bits.highest_one()
    }

    pub fn exponents(&self) -> Vec<usize> {
        self.bits.iter_ones().collect()
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.bits.len().max(other.bits.len());
        let mut a = self.bits.resized(len);
        a.xor_with(&other.bits.resized(len));
        Gf2Poly { bits: a }.trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return Self::zero();
        };
        let (small, big) = if self.bits.count_ones() <= other.bits.count_ones() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = BitSet::new(da + db + 1);
        for e in small.bits.iter_ones() {
            xor_shifted(&mut out, &big.bits, e);
        }
        Gf2Poly { bits: out }.trimmed()
    }

    pub fn mul_x_pow(&self, k: usize) -> Self {
        let Some(d) = self.degree() else {
            return Self::zero();
        };
        let mut out = BitSet::new(d + k + 1);
        xor_shifted(&mut out, &self.bits, k);
        Gf2Poly { bits: out }
    }

    /// Removes every factor `x`, returning how many were removed.
    fn strip_x(&mut self) -> u64 {
        let Some(t) = self.bits.lowest_one() else {
            return 0;
        };
        if t > 0 {
            let d = self.degree().unwrap();
            let mut out = BitSet::new(d - t + 1);
            for e in self.bits.iter_ones() {
                out.set(e - t, true);
            }
            self.bits = out;
        }
        t as u64
    }

    /// Removes every factor `1 + x`, returning how many were removed.
    fn strip_one_plus_x(&mut self) -> u64 {
        let mut count = 0;
        // p(1) = 0 iff the number of terms is even.
        while !self.is_zero() && self.bits.count_ones().is_multiple_of(2) {
            self.div_one_plus_x();
            count += 1;
        }
        count
    }

    /// Exact division by `1 + x`; the quotient coefficients are prefix XORs.
    fn div_one_plus_x(&mut self) {
        let mut carry = 0u64;
        let mut words: Vec<u64> = self.bits.words().to_vec();
        for w in words.iter_mut() {
            let mut v = *w;
            v ^= v << 1;
            v ^= v << 2;
            v ^= v << 4;
            v ^= v << 8;
            v ^= v << 16;
            v ^= v << 32;
            v ^= carry;
            carry = if v >> 63 == 1 { u64::MAX } else { 0 };
            *w = v;
        }
        let len = self.bits.len();
        self.bits = BitSet::from_words(words, len);
        *self = std::mem::replace(self, Gf2Poly::zero()).trimmed();
    }

    fn trimmed(self) -> Self {
        match self.bits.highest_one() {
            None => Gf2Poly::zero(),
            Some(d) if d + 1 == self.bits.len() => self,
            Some(d) => Gf2Poly {
                bits: self.bits.resized(d + 1),
            },
        }
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly{:?}", self.exponents())
    }
}

fn xor_shifted(out: &mut BitSet, src: &BitSet, shift: usize) {
    for e in src.iter_ones() {
        out.toggle(e + shift);
    }
}

/// Toggles bits `offset + i` for every `i` with `binom(k, i)` odd.
fn toggle_submasks(bits: &mut BitSet, offset: usize, k: usize) {
    let mut i = k;
    loop {
        bits.toggle(offset + i);
        if i == 0 {
            break;
        }
        i = (i - 1) & k;
    }
}

/// Image of a Laurent polynomial in `F₂[x^{±1}, (1+x)^{-1}]` after `y ↦ 1 + x`,
/// written as `numerator · x^{-pole_order_x} · (1+x)^{-pole_order_x1}`.
///
/// Canonical: a nonzero numerator is divisible by neither `x` nor `1 + x`;
/// the zero element has both pole orders 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ReducedPoly {
    numerator: Gf2Poly,
    pole_order_x: i64,
    pole_order_x1: i64,
}

impl ReducedPoly {
    pub fn zero() -> Self {
        ReducedPoly {
            numerator: Gf2Poly::zero(),
            pole_order_x: 0,
            pole_order_x1: 0,
        }
    }

    fn canonical(mut numerator: Gf2Poly, pole_x: i64, pole_x1: i64) -> Self {
        if numerator.is_zero() {
            return Self::zero();
        }
        let t = numerator.strip_x() as i64;
        let u = numerator.strip_one_plus_x() as i64;
        ReducedPoly {
            numerator,
            pole_order_x: pole_x - t,
            pole_order_x1: pole_x1 - u,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn numerator(&self) -> &Gf2Poly {
        &self.numerator
    }

    pub fn numerator_exponents(&self) -> Vec<usize> {
        self.numerator.exponents()
    }

    pub fn pole_order_x(&self) -> i64 {
        self.pole_order_x
    }

    pub fn pole_order_x1(&self) -> i64 {
        self.pole_order_x1
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let px = self.pole_order_x.max(other.pole_order_x);
        let p1 = self.pole_order_x1.max(other.pole_order_x1);
        let lift = |r: &ReducedPoly| {
            r.numerator
                .mul_x_pow((px - r.pole_order_x) as usize)
                .mul(&Gf2Poly::one_plus_x_pow((p1 - r.pole_order_x1) as usize))
        };
        Self::canonical(lift(self).add(&lift(other)), px, p1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // x and 1+x are prime, so the product of canonical numerators is canonical.
        ReducedPoly {
            numerator: self.numerator.mul(&other.numerator),
            pole_order_x: self.pole_order_x + other.pole_order_x,
            pole_order_x1: self.pole_order_x1 + other.pole_order_x1,
        }
    }
}

impl fmt::Debug for ReducedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ReducedPoly{{num: {:?}, pole_x: {}, pole_1+x: {}}}",
            self.numerator.exponents(),
            self.pole_order_x,
            self.pole_order_x1
        )
    }
}

/// Substitutes `y ↦ 1 + x` and returns the canonical reduced form. The result
/// is zero exactly when `p` lies in the Laurent ideal generated by `1 + x + y`.
pub fn reduce_mod_relation(p: &LaurentPoly2) -> Result<ReducedPoly> {
    let Some((amin, bmin)) = p.min_exponents() else {
        return Ok(ReducedPoly::zero());
    };
    let amax = p.support.iter().map(|t| t.0).max().unwrap();
    let bmax = p.support.iter().map(|t| t.1).max().unwrap();
    let span_a = (amax - amin) as u64;
    let span_b = (bmax - bmin) as u64;
    for (span, what) in [(span_a, "x-exponent span"), (span_b, "y-exponent span")] {
        if span > DEGREE_CAP {
            return Err(Error::ResourceCap {
                what,
                needed: span as u128,
                cap: DEGREE_CAP as u128,
            });
        }
    }
    // p = x^amin (1+x)^bmin · Σ x^(a-amin) (1+x)^(b-bmin)
    let mut bits = BitSet::new((span_a + span_b + 1) as usize);
    for &(a, b) in &p.support {
        toggle_submasks(&mut bits, (a - amin) as usize, (b - bmin) as usize);
    }
    let q = Gf2Poly { bits }.trimmed();
    Ok(ReducedPoly::canonical(q, -amin, -bmin))
}

/// Character `a ↦ (-1)^(Σ_{e ∈ support} a(e))` of the Ledrappier group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    pub poly: LaurentPoly2,
}

impl Character {
    pub fn new(poly: LaurentPoly2) -> Self {
        Character { poly }
    }

    pub fn monomial(e1: i64, e2: i64) -> Self {
        Character::new(LaurentPoly2::monomial(e1, e2))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Character::new(LaurentPoly2::parse(s)?))
    }

    /// `T^t S^s χ`.
    pub fn shifted(&self, t: i64, s: i64) -> Self {
        Character::new(self.poly.shift(t, s))
    }

    /// Pointwise product.
    pub fn product(&self, other: &Character) -> Self {
        Character::new(self.poly.add(&other.poly))
    }

    /// Value (±1) on a configuration given as a cell oracle.
    pub fn evaluate(&self, cell: impl Fn(i64, i64) -> bool) -> i8 {
        let parity = self
            .poly
            .support()
            .iter()
            .filter(|&&(a, b)| cell(a, b))
            .count()
            % 2;
        if parity == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_trivial_on_x(&self) -> Result<bool> {
        Ok(reduce_mod_relation(&self.poly)?.is_zero())
    }
}

pub fn poly_add(p: &LaurentPoly2, q: &LaurentPoly2) -> LaurentPoly2 {
    p.add(q)
}

pub fn poly_mul(p: &LaurentPoly2, q: &LaurentPoly2) -> LaurentPoly2 {
    p.mul(q)
}

pub fn monomial_shift(p: &LaurentPoly2, t: i64, s: i64) -> LaurentPoly2 {
    p.shift(t, s)
}

pub fn is_trivial_on_x(chi: &Character) -> Result<bool> {
    chi.is_trivial_on_x()
}

/// Haar integral of a character: 1 if trivial on X, else 0.
pub fn character_integral(chi: &Character) -> Result<Rational> {
    Ok(if chi.is_trivial_on_x()? {
        int(1)
    } else {
        int(0)
    })
}

/// `μ(∩ A_i)` with `A_i = {a : (T^t S^s χ_i)(a) = -1}` for each item
/// `(χ_i, (t, s))`, via `2^{-k} Σ_{S} (-1)^{|S|} ∫ Π_{i∈S} χ_i`.
pub fn character_set_correlation(items: &[(Character, (i64, i64))]) -> Result<Rational> {
    let k = items.len();
    if k == 0 {
        return Err(Error::precondition(
            "character_set_correlation needs at least one item",
        ));
    }
    if k > MAX_CORRELATION_ITEMS {
        return Err(Error::ResourceCap {
            what: "character correlation items",
            needed: k as u128,
            cap: MAX_CORRELATION_ITEMS as u128,
        });
    }
    let shifted: Vec<LaurentPoly2> = items
        .iter()
        .map(|(c, (t, s))| c.poly.shift(*t, *s))
        .collect();
    // Walk subsets in Gray-code order so each step is one symmetric difference.
    let mut acc = LaurentPoly2::zero();
    let mut signed_sum: i64 = 1; // empty subset: ∫1 = 1
    for g in 1u64..(1u64 << k) {
        let flip = g.trailing_zeros() as usize;
        acc = acc.add(&shifted[flip]);
        let gray = g ^ (g >> 1);
        if reduce_mod_relation(&acc)?.is_zero() {
            signed_sum += if gray.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(ratio(signed_sum, 1i64 << k))
}

/// How the m-th shift of a mixing-threshold scan is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSequence {
    /// `n_m = 2^m`.
    PowersOfTwo,
    /// `n_m = factor · m`.
    Linear(i64),
}

impl ShiftSequence {
    pub fn shift(&self, m: u32) -> i64 {
        match self {
            ShiftSequence::PowersOfTwo => 1i64 << m,
            ShiftSequence::Linear(f) => f * m as i64,
        }
    }
}

/// `χ₁ · S^{-n}χ₂ · T^{-n}χ₃`.
pub fn backward_triple_product(chis: [&Character; 3], n: i64) -> Character {
    Character::new(
        chis[0]
            .poly
            .add(&chis[1].poly.shift(0, -n))
            .add(&chis[2].poly.shift(-n, 0)),
    )
}

/// Smallest `m₀ ≤ m_max` such that `χ₁ · S^{-2^m}χ₂ · T^{-2^m}χ₃` is
/// nontrivial on X for every `m ∈ [m₀, m_max]`; `None` if it is trivial at
/// `m_max`.
pub fn min_mixing_threshold(
    chi1: &Character,
    chi2: &Character,
    chi3: &Character,
    m_max: u32,
) -> Result<Option<u32>> {
    min_mixing_threshold_with(chi1, chi2, chi3, m_max, ShiftSequence::PowersOfTwo)
}

pub fn min_mixing_threshold_with(
    chi1: &Character,
    chi2: &Character,
    chi3: &Character,
    m_max: u32,
    seq: ShiftSequence,
) -> Result<Option<u32>> {
    if m_max < 1 {
        return Err(Error::precondition("m_max must be at least 1"));
    }
    for (i, c) in [chi1, chi2, chi3].iter().enumerate() {
        if c.is_trivial_on_x()? {
            return Err(Error::precondition(format!(
                "character χ{} is trivial on X",
                i + 1
            )));
        }
    }
    let mut threshold = Some(1);
    for m in 1..=m_max {
        let prod = backward_triple_product([chi1, chi2, chi3], seq.shift(m));
        if prod.is_trivial_on_x()? {
            threshold = if m == m_max { None } else { Some(m + 1) };
        }
    }
    Ok(threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(terms: &[(i64, i64)]) -> LaurentPoly2 {
        LaurentPoly2::from_terms(terms.iter().copied())
    }

    #[test]
    fn add_is_symmetric_difference() {
        assert!(p(&[(0, 0)]).add(&p(&[(0, 0)])).is_zero());
        assert_eq!(
            p(&[(0, 0), (1, 0)]).add(&p(&[(1, 0), (0, 1)])),
            p(&[(0, 0), (0, 1)])
        );
        assert_eq!(
            LaurentPoly2::relation().add(&p(&[(0, 0), (1, 0)])),
            p(&[(0, 1)])
        );
    }

    #[test]
    fn mul_examples() {
        let r = LaurentPoly2::relation();
        assert_eq!(r.mul(&r), LaurentPoly2::sparse_relation(2));
        assert!(r.mul(&LaurentPoly2::zero()).is_zero());
        assert_eq!(r.mul(&LaurentPoly2::one()), r);
        assert_eq!(r.mul(&r), r.square());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(LaurentPoly2::one().shift(4, 0), p(&[(4, 0)]));
        assert_eq!(
            LaurentPoly2::relation().shift(0, -1),
            p(&[(0, -1), (1, -1), (0, 0)])
        );
        let q = p(&[(3, -2), (0, 5)]);
        assert_eq!(q.shift(0, 0), q);
    }

    #[test]
    fn relation_reduces_to_zero() {
        assert!(reduce_mod_relation(&LaurentPoly2::relation())
            .unwrap()
            .is_zero());
        for m in 0..=12 {
            let r = reduce_mod_relation(&LaurentPoly2::sparse_relation(1 << m)).unwrap();
            assert!(r.is_zero(), "m = {m}");
        }
    }

    #[test]
    fn constant_survives() {
        let r = reduce_mod_relation(&LaurentPoly2::one()).unwrap();
        assert_eq!(r.numerator_exponents(), vec![0]);
        assert_eq!((r.pole_order_x(), r.pole_order_x1()), (0, 0));
    }

    #[test]
    fn sparse_cross_term_reduction() {
        // x^n + y^n + x^n y^n with y = 1 + x and n = 2^m gives 1 + x^n + x^{2n}.
        for m in 0..8 {
            let n = 1i64 << m;
            let q = p(&[(n, 0), (0, n), (n, n)]);
            let r = reduce_mod_relation(&q).unwrap();
            let n = n as usize;
            assert_eq!(r.numerator_exponents(), vec![0, n, 2 * n], "m = {m}");
            assert_eq!((r.pole_order_x(), r.pole_order_x1()), (0, 0));
        }
    }

    #[test]
    fn negative_powers_produce_poles() {
        // y^{-1} = (1+x)^{-1}
        let r = reduce_mod_relation(&p(&[(0, -1)])).unwrap();
        assert_eq!(r.numerator_exponents(), vec![0]);
        assert_eq!(r.pole_order_x1(), 1);
        // x^2 y^3 = x^2 (1+x)^3: zeros show up as negative pole orders.
        let r = reduce_mod_relation(&p(&[(2, 3)])).unwrap();
        assert_eq!((r.pole_order_x(), r.pole_order_x1()), (-2, -3));
    }

    #[test]
    fn degree_cap_is_a_resource_error() {
        let q = p(&[(0, 0), (DEGREE_CAP as i64 + 1, 0)]);
        assert!(matches!(
            reduce_mod_relation(&q),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn triviality_examples() {
        assert!(Character::new(LaurentPoly2::relation())
            .is_trivial_on_x()
            .unwrap());
        assert!(!Character::monomial(0, 0).is_trivial_on_x().unwrap());
        assert!(Character::new(LaurentPoly2::zero())
            .is_trivial_on_x()
            .unwrap());
    }

    #[test]
    fn integrals() {
        assert_eq!(
            character_integral(&Character::new(LaurentPoly2::zero())).unwrap(),
            int(1)
        );
        assert_eq!(
            character_integral(&Character::monomial(0, 0)).unwrap(),
            int(0)
        );
        // χ · S^{2^m}χ · T^{2^m}χ integrates to 1 for any χ.
        let chi = Character::new(p(&[(0, 0), (3, 1), (-2, 5)]));
        for m in 1..=8 {
            let n = 1 << m;
            let prod = chi.product(&chi.shifted(0, n)).product(&chi.shifted(n, 0));
            assert_eq!(character_integral(&prod).unwrap(), int(1), "m = {m}");
        }
    }

    #[test]
    fn set_correlation_examples() {
        let chi = Character::monomial(0, 0);
        assert_eq!(
            character_set_correlation(&[(chi.clone(), (0, 0))]).unwrap(),
            ratio(1, 2)
        );
        for m in 1..=6 {
            let n = 1 << m;
            let fwd = [
                (chi.clone(), (0, 0)),
                (chi.clone(), (0, n)),
                (chi.clone(), (n, 0)),
            ];
            assert_eq!(character_set_correlation(&fwd).unwrap(), int(0));
            let bwd = [
                (chi.clone(), (0, 0)),
                (chi.clone(), (0, -n)),
                (chi.clone(), (-n, 0)),
            ];
            assert_eq!(character_set_correlation(&bwd).unwrap(), ratio(1, 8));
        }
        assert!(character_set_correlation(&[]).is_err());
    }

    #[test]
    fn inclusion_exclusion_with_complement() {
        // μ(A1) = μ(A1 ∩ A2) + μ(A1 ∩ A2ᶜ); A2ᶜ = {χ2 = +1} = {(-χ2) = -1}, and
        // flipping the sign of χ2 flips the sign of every term containing it.
        let a1 = Character::new(p(&[(0, 0), (1, 2)]));
        let a2 = Character::new(p(&[(0, 1)]));
        let both =
            character_set_correlation(&[(a1.clone(), (0, 0)), (a2.clone(), (0, 0))]).unwrap();
        let i1 = character_integral(&a1).unwrap();
        let i2 = character_integral(&a2).unwrap();
        let i12 = character_integral(&a1.product(&a2)).unwrap();
        let with_complement = (int(1) - &i1 + &i2 - &i12) / int(4);
        let single = character_set_correlation(&[(a1, (0, 0))]).unwrap();
        assert_eq!(single, both + with_complement);
    }

    #[test]
    fn threshold_examples() {
        let chi = Character::monomial(0, 0);
        assert_eq!(min_mixing_threshold(&chi, &chi, &chi, 12).unwrap(), Some(1));

        // S^{-2}T^{-2}χ · S^{-2}χ · T^{-2}χ is x^{-2}y^{-2}(1 + x^2 + y^2): trivial at m = 1.
        let crafted = chi.shifted(-2, -2);
        assert!(backward_triple_product([&crafted, &chi, &chi], 2)
            .is_trivial_on_x()
            .unwrap());
        let m0 = min_mixing_threshold(&crafted, &chi, &chi, 12)
            .unwrap()
            .unwrap();
        assert!(m0 >= 2);

        // Trivial inputs are rejected.
        let trivial = Character::new(LaurentPoly2::relation());
        assert!(min_mixing_threshold(&trivial, &chi, &chi, 4).is_err());
    }

    #[test]
    fn linear_shift_reading_is_available() {
        let chi = Character::monomial(0, 0);
        let m0 = min_mixing_threshold_with(&chi, &chi, &chi, 10, ShiftSequence::Linear(2)).unwrap();
        // 1 + y^{-2m} + x^{-2m} is trivial exactly when 2m is a power of two.
        assert_eq!(m0, Some(1));
        for m in 1..=10u32 {
            let n = 2 * m as i64;
            let triv = backward_triple_product([&chi, &chi, &chi], n)
                .is_trivial_on_x()
                .unwrap();
            assert!(!triv);
            let fwd = Character::new(LaurentPoly2::sparse_relation(n))
                .is_trivial_on_x()
                .unwrap();
            assert_eq!(fwd, (n as u64).is_power_of_two(), "n = {n}");
        }
    }

    #[test]
    fn division_by_one_plus_x() {
        let a = Gf2Poly::from_exponents([0, 3, 7, 64, 65, 130]);
        let b = Gf2Poly::one_plus_x_pow(5);
        let mut prod = a.mul(&b);
        assert_eq!(prod.strip_one_plus_x(), 5 + a.clone().strip_one_plus_x());
    }

    #[test]
    fn literal_round_trip() {
        let q = LaurentPoly2::parse("[(0,0), (1,0), (0,1)]").unwrap();
        assert_eq!(q, LaurentPoly2::relation());
        assert_eq!(LaurentPoly2::parse(&q.to_literal()).unwrap(), q);
        assert!(LaurentPoly2::parse("[(0,0),(0,0)]").is_err());
        assert_eq!(q.to_string(), "1 + y + x");
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly2> {
        proptest::collection::vec((-64i64..=64, -64i64..=64), 0..=16)
            .prop_map(LaurentPoly2::from_terms)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn add_is_an_involution(q in arb_poly()) {
            prop_assert!(q.add(&q).is_zero());
        }

        #[test]
        fn reduction_is_a_ring_homomorphism(a in arb_poly(), b in arb_poly()) {
            let ra = reduce_mod_relation(&a).unwrap();
            let rb = reduce_mod_relation(&b).unwrap();
            prop_assert_eq!(reduce_mod_relation(&a.add(&b)).unwrap(), ra.add(&rb));
            prop_assert_eq!(reduce_mod_relation(&a.mul(&b)).unwrap(), ra.mul(&rb));
        }

        #[test]
        fn single_set_measure_is_zero_or_half(q in arb_poly()) {
            let chi = Character::new(q);
            let mu = character_set_correlation(&[(chi.clone(), (0, 0))]).unwrap();
            let expected = if chi.is_trivial_on_x().unwrap() { int(0) } else { ratio(1, 2) };
            prop_assert_eq!(mu, expected);
        }
    }
}
