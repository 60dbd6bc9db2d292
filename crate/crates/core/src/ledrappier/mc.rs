use rayon::prelude::*;

use crate::rational::{ratio, to_f64};
use crate::{Error, Rational, Result};

use super::query::{CompiledQuery, SetSpec, Shift, WindowCap};
use super::window::RowSource;

/// Samples per substream chunk; chunk `i` covers samples `[i·2^12, (i+1)·2^12)`.
pub const CHUNK_SAMPLES: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub hits: u64,
    pub samples: u64,
    pub estimate: Rational,
    pub stderr: f64,
}

impl McEstimate {
    /// `|estimate − exact| ≤ k · stderr`.
    pub fn within_sigmas(&self, exact: &Rational, k: f64) -> bool {
        let diff = (to_f64(&self.estimate) - to_f64(exact)).abs();
        if self.stderr == 0.0 {
            return &self.estimate == exact;
        }
        diff <= k * self.stderr
    }
}

/// Monte Carlo estimate of `μ(∩_i shifted set_i)` with the default window cap.
pub fn mc_correlation(items: &[(SetSpec, Shift)], samples: u64, seed: u64) -> Result<McEstimate> {
    mc_correlation_with(items, samples, seed, WindowCap::default())
}

/// Sample `i` is the configuration whose row 0 is stream `i` of
/// [`RowSource::new(seed)`](RowSource); only the row-0 words the query reads
/// are generated. Hit counts are merged by integer addition, so the result
/// does not depend on the number of worker threads.
pub fn mc_correlation_with(
    items: &[(SetSpec, Shift)],
    samples: u64,
    seed: u64,
    cap: WindowCap,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::precondition(
            "mc_correlation needs at least one sample",
        ));
    }
    let query = CompiledQuery::compile(items, cap)?;
    let plan = SparsePlan::new(&query);
    let source = RowSource::new(seed);
    let chunks = samples.div_ceil(CHUNK_SAMPLES);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK_SAMPLES;
            let hi = (lo + CHUNK_SAMPLES).min(samples);
            let mut buf = vec![0u64; plan.words.len()];
            (lo..hi).filter(|&i| plan.hit(&source, i, &mut buf)).count() as u64
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        hits,
        samples,
        estimate: ratio(hits, samples),
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

struct SparsePlan {
    /// Sorted row-0 word indices the query reads.
    words: Vec<u64>,
    /// Per equation: (slot in `words`, mask) pairs and the required parity.
    equations: Vec<(Vec<(usize, u64)>, bool)>,
}

impl SparsePlan {
    fn new(query: &CompiledQuery) -> Self {
        let mut words: Vec<u64> = query
            .equations
            .iter()
            .flat_map(|e| e.columns.iter().map(|&c| (c / 64) as u64))
            .collect();
        words.sort_unstable();
        words.dedup();
        let equations = query
            .equations
            .iter()
            .map(|e| {
                let mut masks: Vec<(usize, u64)> = Vec::new();
                for &c in &e.columns {
                    let slot = words.binary_search(&((c / 64) as u64)).unwrap();
                    match masks.last_mut() {
                        Some((s, m)) if *s == slot => *m ^= 1 << (c % 64),
                        _ => masks.push((slot, 1 << (c % 64))),
                    }
                }
                (masks, e.value)
            })
            .collect();
        SparsePlan { words, equations }
    }

    fn hit(&self, source: &RowSource, index: u64, buf: &mut [u64]) -> bool {
        let mut stream = source.sample(index);
        for (slot, &w) in buf.iter_mut().zip(&self.words) {
            *slot = stream.word(w);
        }
        self.equations.iter().all(|(masks, value)| {
            let parity = masks
                .iter()
                .fold(0u32, |acc, &(s, m)| acc ^ (buf[s] & m).count_ones())
                & 1;
            (parity == 1) == *value
        })
    }
}
