use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitSet;
use crate::{Error, Result};

/// Row-0 bit source: ChaCha8 keyed by `seed` (expanded with
/// `ChaCha8Rng::seed_from_u64`), one 64-bit stream id per sample index.
/// Row-0 word `k` of sample `i` is the `k`-th `u64` of stream `i`, so any
/// subset of row-0 words can be read without generating the others.
#[derive(Clone)]
pub struct RowSource {
    key: [u8; 32],
}

impl RowSource {
    pub fn new(seed: u64) -> Self {
        RowSource {
            key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
        }
    }

    pub fn sample(&self, index: u64) -> SampleStream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        SampleStream { rng, next_word: 0 }
    }
}

pub struct SampleStream {
    rng: ChaCha8Rng,
    next_word: u64,
}

impl SampleStream {
    /// Row-0 bits `64k .. 64k + 64`.
    pub fn word(&mut self, k: u64) -> u64 {
        if k != self.next_word {
            self.rng.set_word_pos(2 * k as u128);
        }
        self.next_word = k + 1;
        self.rng.next_u64()
    }
}

/// Finite patch of a configuration: row `s` holds cells `(z1, s)` for
/// `0 ≤ z1 < W − s`, `0 ≤ s ≤ H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigWindow {
    width: usize,
    rows: Vec<BitSet>,
}

impl ConfigWindow {
    /// Builds the window generated by `row0` up to height `height`.
    pub fn from_row0(row0: BitSet, height: usize) -> Result<Self> {
        let width = row0.len();
        if width <= height {
            return Err(Error::precondition(format!(
                "window width {width} must exceed height {height}"
            )));
        }
        let mut rows = Vec::with_capacity(height + 1);
        rows.push(row0);
        for s in 0..height {
            let prev = &rows[s];
            let len = width - s - 1;
            let words = (0..len.div_ceil(64))
                .map(|k| prev.window64(64 * k as i128) ^ prev.window64(64 * k as i128 + 1))
                .collect();
            rows.push(BitSet::from_words(words, len));
        }
        Ok(ConfigWindow { width, rows })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, s: usize) -> &BitSet {
        &self.rows[s]
    }

    /// Cell `(z1, z2)`; `None` outside the window.
    pub fn get(&self, z1: i64, z2: i64) -> Option<bool> {
        if z1 < 0 || z2 < 0 || z2 as usize >= self.rows.len() {
            return None;
        }
        let row = &self.rows[z2 as usize];
        ((z1 as usize) < row.len()).then(|| row.get(z1 as usize))
    }

    /// Checks `a(z) ⊕ a(z + (1,0)) ⊕ a(z + (0,1)) = 0` at every cell where all
    /// three terms are in the window.
    pub fn satisfies_local_rule(&self) -> bool {
        self.satisfies_rule_at_scale(1)
    }

    /// Checks `a(z) ⊕ a(z + (d,0)) ⊕ a(z + (0,d)) = 0` wherever defined.
    pub fn satisfies_rule_at_scale(&self, d: usize) -> bool {
        if d == 0 {
            return true;
        }
        for s in 0..self.rows.len().saturating_sub(d) {
            let row = &self.rows[s];
            let up = &self.rows[s + d];
            let len = up.len().min(row.len().saturating_sub(d));
            let mut k = 0;
            while k < len {
                let span = (len - k).min(64);
                let mask = if span == 64 {
                    u64::MAX
                } else {
                    (1u64 << span) - 1
                };
                let p = k as i128;
                if (row.window64(p) ^ row.window64(p + d as i128) ^ up.window64(p)) & mask != 0 {
                    return false;
                }
                k += 64;
            }
        }
        true
    }
}

/// Window `index` of the stream seeded by `seed`.
pub fn sample_window(width: usize, height: usize, seed: u64, index: u64) -> Result<ConfigWindow> {
    if width <= height {
        return Err(Error::precondition(format!(
            "window width {width} must exceed height {height}"
        )));
    }
    let mut stream = RowSource::new(seed).sample(index);
    let words = (0..width.div_ceil(64) as u64)
        .map(|k| stream.word(k))
        .collect();
    ConfigWindow::from_row0(BitSet::from_words(words, width), height)
}

/// A Haar-distributed window of width `W` and height `H` (`W > H`).
pub fn sample_config(width: usize, height: usize, seed: u64) -> Result<ConfigWindow> {
    sample_window(width, height, seed, 0)
}

/// Row-0 columns whose XOR is the cell `(z1, z2)`: `{z1 + i : binom(z2, i) odd}`.
pub fn cell_functional(z1: i64, z2: u64) -> Vec<i64> {
    let mut out = Vec::with_capacity(1 << z2.count_ones());
    let mut i = z2;
    loop {
        out.push(z1 + i as i64);
        if i == 0 {
            break;
        }
        i = (i - 1) & z2;
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_rule_example() {
        let row0 = BitSet::from_indices(3, [0, 2]); // 101
        let w = ConfigWindow::from_row0(row0, 1).unwrap();
        assert_eq!(w.get(0, 1), Some(true));
        assert_eq!(w.get(1, 1), Some(true));
        assert_eq!(w.get(2, 1), None);
    }

    #[test]
    fn rejects_short_base_row() {
        assert!(sample_config(4, 4, 1).is_err());
        assert!(sample_config(5, 4, 1).is_ok());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_config(200, 100, 7).unwrap();
        let b = sample_config(200, 100, 7).unwrap();
        let c = sample_config(200, 100, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn power_of_two_rule_on_samples() {
        for m in 0..7 {
            let n = 1usize << m;
            for seed in 0..20 {
                let w = sample_config(n + 1, n, seed).unwrap();
                let lhs = w.get(0, n as i64).unwrap();
                assert_eq!(lhs, w.get(0, 0).unwrap() ^ w.get(n as i64, 0).unwrap());
            }
        }
    }

    #[test]
    fn sampled_windows_satisfy_rules() {
        for seed in 0..10 {
            let w = sample_config(300, 129, seed).unwrap();
            assert!(w.satisfies_local_rule());
            for m in 0..=7 {
                assert!(w.satisfies_rule_at_scale(1 << m));
            }
        }
    }

    #[test]
    fn corrupted_window_fails_rule() {
        let mut w = sample_config(64, 10, 3).unwrap();
        let v = w.rows[5].get(7);
        w.rows[5].set(7, !v);
        assert!(!w.satisfies_local_rule());
    }

    #[test]
    fn functional_examples() {
        assert_eq!(cell_functional(0, 0), vec![0]);
        assert_eq!(cell_functional(0, 2), vec![0, 2]);
        assert_eq!(cell_functional(0, 3), vec![0, 1, 2, 3]);
        assert_eq!(cell_functional(5, 4), vec![5, 9]);
    }

    #[test]
    fn functional_of_height_three_matches_all_base_rows() {
        for bits in 0u32..16 {
            let row0 = BitSet::from_indices(4, (0..4).filter(|i| bits >> i & 1 == 1));
            let w = ConfigWindow::from_row0(row0.clone(), 3).unwrap();
            let xor = cell_functional(0, 3)
                .iter()
                .fold(false, |acc, &c| acc ^ row0.get(c as usize));
            assert_eq!(w.get(0, 3).unwrap(), xor);
        }
    }

    #[test]
    fn functional_matches_recursion_on_random_rows() {
        let width = 64;
        for seed in 0..100 {
            let w = sample_config(width, 20, seed).unwrap();
            for z2 in 0..=20u64 {
                for z1 in 0..(width as i64 - z2 as i64) {
                    let xor = cell_functional(z1, z2)
                        .iter()
                        .fold(false, |acc, &c| acc ^ w.get(c, 0).unwrap());
                    assert_eq!(w.get(z1, z2 as i64).unwrap(), xor);
                }
            }
        }
    }

    #[test]
    fn sparse_word_reads_match_sequential() {
        let src = RowSource::new(99);
        let mut seq = src.sample(3);
        let all: Vec<u64> = (0..10).map(|k| seq.word(k)).collect();
        let mut sparse = src.sample(3);
        assert_eq!(sparse.word(7), all[7]);
        assert_eq!(sparse.word(2), all[2]);
        assert_eq!(sparse.word(3), all[3]);
    }
}
