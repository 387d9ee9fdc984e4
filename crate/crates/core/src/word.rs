//! Packed finite 0/1 words with 1-based logical indexing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

const LIMB_BITS: usize = 64;

/// A finite word over `{0, 1}`, stored one bit per symbol.
///
/// Positions are 1-based: `get(1)` is the first symbol `x_1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    limbs: Vec<u64>,
    len: usize,
}

impl BinaryWord {
    pub fn new() -> Self {
        Self::default()
    }

    /// The all-zero word of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self {
            limbs: vec![0; len.div_ceil(LIMB_BITS)],
            len,
        }
    }

    pub fn with_capacity(len: usize) -> Self {
        Self {
            limbs: Vec::with_capacity(len.div_ceil(LIMB_BITS)),
            len: 0,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut w = Self::new();
        for b in bits {
            w.push(b);
        }
        w
    }

    /// Word of length `len` whose symbol `x_{k+1}` is bit `k` of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut w = Self::zeros(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            w.limbs[0] = value & mask;
        }
        w
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at 1-based position `pos`.
    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos >= 1 && pos <= self.len, "position {pos} out of 1..={}", self.len);
        let k = pos - 1;
        (self.limbs[k / LIMB_BITS] >> (k % LIMB_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, bit: bool) {
        assert!(pos >= 1 && pos <= self.len, "position {pos} out of 1..={}", self.len);
        let k = pos - 1;
        let m = 1u64 << (k % LIMB_BITS);
        if bit {
            self.limbs[k / LIMB_BITS] |= m;
        } else {
            self.limbs[k / LIMB_BITS] &= !m;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(LIMB_BITS) {
            self.limbs.push(0);
        }
        self.len += 1;
        self.set(self.len, bit);
    }

    /// The prefix `x_1 … x_m`.
    pub fn prefix(&self, m: usize) -> BinaryWord {
        assert!(m <= self.len);
        let mut limbs = self.limbs[..m.div_ceil(LIMB_BITS)].to_vec();
        if !m.is_multiple_of(LIMB_BITS) {
            if let Some(last) = limbs.last_mut() {
                *last &= (1u64 << (m % LIMB_BITS)) - 1;
            }
        }
        BinaryWord { limbs, len: m }
    }

    /// Number of 1s among `x_1 … x_m`.
    pub fn count_ones_prefix(&self, m: usize) -> usize {
        assert!(m <= self.len);
        let full = m / LIMB_BITS;
        let mut total: usize = self.limbs[..full].iter().map(|l| l.count_ones() as usize).sum();
        let rem = m % LIMB_BITS;
        if rem != 0 {
            total += (self.limbs[full] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        total
    }

    /// Number of 0s among `x_1 … x_m`.
    pub fn count_zeros_prefix(&self, m: usize) -> usize {
        m - self.count_ones_prefix(m)
    }

    pub fn count_ones(&self) -> usize {
        self.count_ones_prefix(self.len)
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len).map(move |p| self.get(p))
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryWord(\"{self}\")")
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = BinaryWord::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                ' ' | '_' => {}
                other => return Err(Error::MalformedWord(format!("unexpected character {other:?} in {s:?}"))),
            }
        }
        Ok(w)
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_index() {
        let w: BinaryWord = "0100".parse().unwrap();
        assert_eq!(w.len(), 4);
        assert!(!w.get(1));
        assert!(w.get(2));
        assert_eq!(w.to_string(), "0100");
        assert_eq!(w.count_zeros(), 3);
    }

    #[test]
    fn empty_word() {
        let w: BinaryWord = "".parse().unwrap();
        assert!(w.is_empty());
        assert_eq!(w.to_string(), "");
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!("01x".parse::<BinaryWord>(), Err(Error::MalformedWord(_))));
    }

    #[test]
    fn from_u64_matches_positions() {
        let w = BinaryWord::from_u64(0b0110, 4);
        assert_eq!(w.to_string(), "0110");
    }

    proptest! {
        #[test]
        fn prefix_counts_agree(bits in proptest::collection::vec(any::<bool>(), 0..300), cut in 0usize..300) {
            let w = BinaryWord::from_bits(bits.iter().copied());
            let m = cut.min(bits.len());
            let expect = bits[..m].iter().filter(|b| **b).count();
            prop_assert_eq!(w.count_ones_prefix(m), expect);
            let p = w.prefix(m);
            prop_assert_eq!(p.count_ones(), expect);
            prop_assert_eq!(p.to_string(), w.to_string()[..m].to_string());
        }
    }
}
