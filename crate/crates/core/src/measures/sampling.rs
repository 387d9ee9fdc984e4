//! Reproducible sampling of measure-typical points.
//!
//! A 64-bit seed expands to a ChaCha8 key. Chain `J(i)` reads stream `i` of
//! that key, one 64-bit draw per position in chain order, so the symbol at a
//! position depends only on `(seed, chain, position)` and longer samples
//! extend shorter ones.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::markov::MarkovParams;
use super::product::{BlockAssignment, MeasureSpec};
use crate::error::{Error, Result};
use crate::golden::{chain_length, ChainIndex};
use crate::word::BinaryWord;

/// Streams at or above this value are reserved for deriving child keys.
const CHILD_STREAMS: u64 = 1 << 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedKey([u8; 32]);

impl SeedKey {
    pub fn from_seed(seed: u64) -> Self {
        SeedKey(ChaCha8Rng::seed_from_u64(seed).get_seed())
    }

    /// Independent key for sub-task `index` (a trial, say).
    pub fn child(&self, index: u64) -> SeedKey {
        assert!(index < CHILD_STREAMS);
        let mut rng = ChaCha8Rng::from_seed(self.0);
        rng.set_stream(CHILD_STREAMS | index);
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        SeedKey(key)
    }

    pub fn stream(&self, id: u64) -> RandomStream {
        assert!(id < CHILD_STREAMS);
        let mut rng = ChaCha8Rng::from_seed(self.0);
        rng.set_stream(id);
        RandomStream(rng)
    }
}

pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Next symbol of a `mu(r)` chain whose previous symbol was `prev`.
    /// Always consumes exactly one draw.
    #[inline]
    fn next_symbol(&mut self, r: f64, prev: bool) -> bool {
        let u = self.next_unit();
        !prev && u >= r
    }
}

/// A word of length `k` with law `mu(r)` on length-`k` golden cylinders.
pub fn sample_chain(params: MarkovParams, k: usize, stream: &mut RandomStream) -> Result<BinaryWord> {
    if k == 0 {
        return Err(Error::Domain("chain length must be at least 1".into()));
    }
    let mut w = BinaryWord::with_capacity(k);
    let mut prev = false;
    for _ in 0..k {
        prev = stream.next_symbol(params.r(), prev);
        w.push(prev);
    }
    Ok(w)
}

/// Samples `x_1^n` under the product measure, chain by chain.
pub fn sample_word(assign: &BlockAssignment, n: usize, key: &SeedKey) -> BinaryWord {
    let mut w = BinaryWord::zeros(n);
    for i in (1..=n as u64).step_by(2) {
        let ci = ChainIndex::new(i).expect("odd");
        let r = assign.parameter(ci.block());
        let k = chain_length(n as u64, ci).expect("i <= n");
        let mut stream = key.stream(i);
        let mut prev = false;
        for shift in 0..k {
            prev = stream.next_symbol(r, prev);
            if prev {
                w.set((i << shift) as usize, true);
            }
        }
    }
    w
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledPoint {
    pub word: BinaryWord,
    pub seed: u64,
    pub measure: MeasureSpec,
}

pub fn sample_point(measure: &MeasureSpec, n: usize, seed: u64) -> Result<SampledPoint> {
    if n == 0 {
        return Err(Error::Domain("sample length must be at least 1".into()));
    }
    let word = sample_word(&measure.assignment(), n, &SeedKey::from_seed(seed));
    Ok(SampledPoint {
        word,
        seed,
        measure: measure.clone(),
    })
}
