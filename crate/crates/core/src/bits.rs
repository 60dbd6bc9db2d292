//! Fixed-length bit vectors with the few word-level kernels the crate needs:
//! boolean algebra, unaligned 64-bit window reads and shifted-intersection
//! counting.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut b = BitSet::new(len);
        for i in indices {
            b.set(i, true);
        }
        b
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut b = BitSet { words, len };
        b.words.resize(len.div_ceil(64), 0);
        b.clear_tail();
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let m = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    /// Index of the highest set bit.
    pub fn highest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn lowest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn xor_with(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_with(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_with(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> BitSet {
        let mut out = BitSet {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.clear_tail();
        out
    }

    /// Parity of `popcount(self & mask)`.
    pub fn and_parity(&self, mask: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&mask.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Copy with a different length (truncating or zero-extending).
    pub fn resized(&self, len: usize) -> BitSet {
        BitSet::from_words(self.words.clone(), len)
    }

    /// Bits `pos .. pos + 64` as a word; positions outside `[0, len)` read as 0.
    #[inline]
    pub fn window64(&self, pos: i128) -> u64 {
        let len = self.len as i128;
        if pos >= len || pos <= -64 {
            return 0;
        }
        let mut w = if pos >= 0 {
            let p = pos as usize;
            let (wi, sh) = (p >> 6, p & 63);
            let lo = self.words[wi] >> sh;
            let hi = if sh != 0 && wi + 1 < self.words.len() {
                self.words[wi + 1] << (64 - sh)
            } else {
                0
            };
            lo | hi
        } else {
            // Negative start: the first -pos bits are outside the vector.
            let s = (-pos) as u32;
            self.words.first().copied().unwrap_or(0) << s
        };
        let remaining = len - pos;
        if remaining < 64 {
            w &= (1u64 << remaining) - 1;
        }
        w
    }

    /// Number of `u` in `[lo, hi)` such that `sets[i]` contains `u + offsets[i]`
    /// for every `i`.
    pub fn count_shifted_intersection(
        sets: &[&BitSet],
        offsets: &[i128],
        lo: i128,
        hi: i128,
    ) -> u64 {
        assert_eq!(sets.len(), offsets.len());
        assert!(!sets.is_empty());
        let mut total = 0u64;
        let mut u = lo;
        while u < hi {
            let span = (hi - u).min(64);
            let mut w = if span == 64 {
                u64::MAX
            } else {
                (1u64 << span) - 1
            };
            for (s, &o) in sets.iter().zip(offsets) {
                w &= s.window64(u + o);
                if w == 0 {
                    break;
                }
            }
            total += w.count_ones() as u64;
            u += 64;
        }
        total
    }

    /// Sets bits `lo .. hi`.
    pub fn set_range(&mut self, lo: usize, hi: usize) {
        assert!(
            lo <= hi && hi <= self.len,
            "range {lo}..{hi} out of 0..{}",
            self.len
        );
        let mut i = lo;
        while i < hi {
            if i & 63 == 0 && hi - i >= 64 {
                self.words[i >> 6] = u64::MAX;
                i += 64;
            } else {
                self.words[i >> 6] |= 1 << (i & 63);
                i += 1;
            }
        }
    }

    /// `self[offset + i] |= src[i]` for every bit of `src`.
    pub fn or_shifted(&mut self, src: &BitSet, offset: usize) {
        assert!(
            offset + src.len <= self.len,
            "shifted source overruns target"
        );
        let mut i = 0;
        while i < src.len {
            let w = src.window64(i as i128);
            let pos = offset + i;
            let (wi, sh) = (pos >> 6, pos & 63);
            self.words[wi] |= w << sh;
            if sh != 0 && wi + 1 < self.words.len() {
                self.words[wi + 1] |= w >> (64 - sh);
            }
            i += 64;
        }
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let r = self.len & 63;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSet[{}]{{", self.len)?;
        for (n, i) in self.iter_ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn window_reads_across_word_boundaries() {
        let b = BitSet::from_indices(130, [0, 63, 64, 65, 129]);
        assert_eq!(b.window64(0) & 1, 1);
        assert_eq!(b.window64(63) & 0b111, 0b111);
        assert_eq!(b.window64(-1), 0b10);
        assert_eq!(b.window64(129), 1);
        assert_eq!(b.window64(130), 0);
        assert_eq!(b.window64(-64), 0);
    }

    #[test]
    fn shifted_or_and_ranges() {
        let src = BitSet::from_indices(70, [0, 5, 63, 64, 69]);
        let mut dst = BitSet::new(200);
        dst.or_shifted(&src, 61);
        assert_eq!(
            dst.iter_ones().collect::<Vec<_>>(),
            vec![61, 66, 124, 125, 130]
        );
        let mut r = BitSet::new(150);
        r.set_range(3, 140);
        assert_eq!(r.count_ones(), 137);
        assert!(!r.get(2) && r.get(3) && r.get(139) && !r.get(140));
    }

    #[test]
    fn complement_respects_length() {
        let b = BitSet::from_indices(70, [1, 69]);
        let c = b.complement();
        assert_eq!(c.count_ones(), 68);
        assert!(!c.get(69));
    }

    proptest! {
        #[test]
        fn shifted_count_matches_naive(
            a in proptest::collection::vec(any::<bool>(), 1..200),
            b in proptest::collection::vec(any::<bool>(), 1..200),
            oa in -50i128..50, ob in -50i128..50,
            lo in -60i128..60, span in 0i128..300,
        ) {
            let sa = BitSet::from_indices(a.len(), a.iter().enumerate().filter(|x| *x.1).map(|x| x.0));
            let sb = BitSet::from_indices(b.len(), b.iter().enumerate().filter(|x| *x.1).map(|x| x.0));
            let hi = lo + span;
            let naive = (lo..hi).filter(|&u| {
                let pa = u + oa; let pb = u + ob;
                pa >= 0 && pb >= 0 && sa.get(pa as usize) && sb.get(pb as usize)
            }).count() as u64;
            prop_assert_eq!(BitSet::count_shifted_intersection(&[&sa, &sb], &[oa, ob], lo, hi), naive);
        }
    }
}
