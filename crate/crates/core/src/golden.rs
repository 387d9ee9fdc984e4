//! Combinatorics of the golden mean shift and of its multiplicative analogue.
//!
//! A sequence `(x_k)` lies in the multiplicative shift iff `x_k x_{2k} = 0`
//! for every `k`. Writing every index as `2^r i` with `i` odd splits the
//! positions into chains `J(i) = {i, 2i, 4i, ...}`; the constraint then says
//! that each chain, read in order, is an ordinary golden mean word (no `11`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::BinaryWord;

/// Start of a chain `J(i)`; always a positive odd integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct ChainIndex(u64);

impl ChainIndex {
    pub fn new(i: u64) -> Result<Self> {
        if i % 2 == 1 {
            Ok(ChainIndex(i))
        } else {
            Err(Error::InvalidChainIndex(i))
        }
    }

    /// The odd part of a positive position, i.e. the chain containing it.
    #[inline]
    pub fn of_position(pos: u64) -> Self {
        debug_assert!(pos > 0);
        ChainIndex(pos >> pos.trailing_zeros())
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// Dyadic block `floor(log2 i)`.
    #[inline]
    pub fn block(self) -> u32 {
        63 - self.0.leading_zeros()
    }
}

impl TryFrom<u64> for ChainIndex {
    type Error = Error;
    fn try_from(i: u64) -> Result<Self> {
        ChainIndex::new(i)
    }
}

impl From<ChainIndex> for u64 {
    fn from(c: ChainIndex) -> u64 {
        c.0
    }
}

impl fmt::Display for ChainIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Fibonacci numbers in the convention `F_1 = 1, F_2 = 2, F_{k+1} = F_{k-1} + F_k`.
#[derive(Clone, Debug)]
pub struct FibonacciTable {
    // values[k] = F_k, values[0] unused (set to 1 so that F_2 = F_0 + F_1)
    values: Vec<BigUint>,
}

impl FibonacciTable {
    pub fn up_to(k: usize) -> Self {
        let mut t = FibonacciTable {
            values: vec![BigUint::one(), BigUint::one(), BigUint::from(2u32)],
        };
        t.extend_to(k);
        t
    }

    pub fn extend_to(&mut self, k: usize) {
        while self.values.len() <= k {
            let n = self.values.len();
            let next = &self.values[n - 1] + &self.values[n - 2];
            self.values.push(next);
        }
    }

    /// `F_k` for `k >= 1`.
    pub fn get(&self, k: usize) -> &BigUint {
        assert!(k >= 1, "Fibonacci index starts at 1");
        &self.values[k]
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }
}

/// True iff `u` has no two adjacent 1s.
pub fn is_golden_word(u: &BinaryWord) -> bool {
    let mut prev = false;
    for b in u.iter() {
        if b && prev {
            return false;
        }
        prev = b;
    }
    true
}

/// True iff `u_k u_{2k} = 0` for every `k` with `2k <= |u|`.
pub fn is_multiplicative_prefix(u: &BinaryWord) -> bool {
    let n = u.len();
    (1..=n / 2).all(|k| !(u.get(k) && u.get(2 * k)))
}

/// Length of the restriction of a prefix of length `n` to the chain `J(i)`:
/// the unique `k` with `2^{k-1} i <= n < 2^k i`.
pub fn chain_length(n: u64, i: ChainIndex) -> Result<u32> {
    let i = i.get();
    if i > n {
        return Err(Error::EmptyRestriction {
            start: i,
            len: n as usize,
        });
    }
    let q = n / i;
    Ok(64 - q.leading_zeros())
}

/// The word `u_i u_{2i} u_{4i} ...` read along the chain `J(i)`.
pub fn restrict_to_chain(u: &BinaryWord, i: ChainIndex) -> Result<BinaryWord> {
    let k = chain_length(u.len() as u64, i)?;
    let start = i.get() as usize;
    Ok(BinaryWord::from_bits((0..k).map(|r| u.get(start << r))))
}

/// Inverse of [`restrict_to_chain`] over all chains: rebuilds a word of
/// length `n` from its chain restrictions.
pub fn interleave_chains(n: usize, chains: &BTreeMap<ChainIndex, BinaryWord>) -> Result<BinaryWord> {
    let mut w = BinaryWord::zeros(n);
    for (&i, word) in chains {
        let k = chain_length(n as u64, i)? as usize;
        if word.len() != k {
            return Err(Error::InvalidParameter(format!(
                "chain {i} has length {} but a prefix of length {n} needs {k}",
                word.len()
            )));
        }
        for r in 0..k {
            w.set((i.get() as usize) << r, word.get(r + 1));
        }
    }
    Ok(w)
}

/// Number of odd integers in `1..=m`.
#[inline]
pub(crate) fn odd_count_upto(m: u64) -> u64 {
    m.div_ceil(2)
}

/// The odd integers in the half-open interval `(a, b]`, ascending.
pub fn odd_indices_in(a: Rational64, b: Rational64) -> Result<Vec<ChainIndex>> {
    if a < Rational64::zero() || a >= b {
        return Err(Error::Domain(format!("need 0 <= a < b, got ({a}, {b}]")));
    }
    let lo = a.floor().to_integer() + 1;
    let hi = b.floor().to_integer();
    let first = if lo % 2 == 0 { lo + 1 } else { lo };
    Ok((first..=hi).step_by(2).map(|i| ChainIndex(i as u64)).collect())
}

/// Number of chains of each length in a prefix of length `n`.
///
/// Entry `k - 1` is the number of odd `i` with `n / 2^k < i <= n / 2^{k-1}`.
pub fn chain_length_counts(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 1u32;
    while k <= 64 && (n >> (k - 1)) > 0 {
        let hi = n >> (k - 1);
        let lo = if k < 64 { n >> k } else { 0 };
        out.push(odd_count_upto(hi) - odd_count_upto(lo));
        k += 1;
    }
    out
}

/// Map from each odd `i <= n` to the length of its chain inside `1..=n`.
pub fn chain_partition(n: u64) -> BTreeMap<ChainIndex, u32> {
    (1..=n)
        .step_by(2)
        .map(|i| {
            let c = ChainIndex(i);
            (c, chain_length(n, c).expect("i <= n"))
        })
        .collect()
}

/// Number of golden words of length `k`, namely `F_{k+1}`.
pub fn count_golden_words(k: usize) -> BigUint {
    FibonacciTable::up_to(k + 1).get(k + 1).clone()
}

/// Number of admissible words of length `n` in the multiplicative shift.
pub fn count_cylinders(n: u64) -> BigUint {
    let counts = chain_length_counts(n);
    let fib = FibonacciTable::up_to(counts.len() + 1);
    counts
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .fold(BigUint::one(), |acc, (idx, &a)| {
            let k = idx + 1;
            acc * num_traits::pow(fib.get(k + 1).clone(), a as usize)
        })
}

/// `log2(count_cylinders(n))` without materialising the big integer.
pub fn count_cylinders_log2(n: u64) -> f64 {
    let counts = chain_length_counts(n);
    let fib = FibonacciTable::up_to(counts.len() + 1);
    counts
        .iter()
        .enumerate()
        .map(|(idx, &a)| a as f64 * log2_biguint(fib.get(idx + 2)))
        .sum()
}

/// Base-2 logarithm of a positive big integer, to double precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log2 of zero");
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}
