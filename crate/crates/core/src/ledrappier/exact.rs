use num_bigint::BigInt;

use crate::bits::BitSet;
use crate::rational::int;
use crate::{Rational, Result};

use super::query::{CompiledQuery, SetSpec, Shift, WindowCap};

/// Exact Haar measure of `∩_i (shifted set_i)`.
///
/// Each cylinder constraint (and each character set, as a parity condition)
/// becomes an affine equation over F₂ in the row-0 bits; the solution set has
/// measure 0 if the system is inconsistent and `2^{-rank}` otherwise.
pub fn exact_cylinder_correlation(items: &[(SetSpec, Shift)], cap: WindowCap) -> Result<Rational> {
    let query = CompiledQuery::compile(items, cap)?;
    Ok(match affine_rank(&query) {
        None => int(0),
        Some(rank) => Rational::new(BigInt::from(1), BigInt::from(1) << rank),
    })
}

/// Rank of the system, or `None` when it is inconsistent.
fn affine_rank(query: &CompiledQuery) -> Option<usize> {
    let mut basis: Vec<(usize, BitSet, bool)> = Vec::new();
    for eq in &query.equations {
        let mut row = BitSet::from_indices(query.width, eq.columns.iter().copied());
        let mut rhs = eq.value;
        // Basis rows are kept reduced against earlier pivots, so one pass in
        // insertion order clears every pivot column of `row`.
        for (pivot, b, b_rhs) in &basis {
            if row.get(*pivot) {
                row.xor_with(b);
                rhs ^= b_rhs;
            }
        }
        match row.lowest_one() {
            Some(p) => basis.push((p, row, rhs)),
            None if rhs => return None,
            None => {}
        }
    }
    Some(basis.len())
}
