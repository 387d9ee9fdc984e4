use serde::{Deserialize, Serialize};

use super::logprob::LogProb;
use crate::error::{Error, Result};
use crate::word::BinaryWord;

/// Parameters of `mu(r)`: initial law `(r, 1-r)`, transitions
/// `0 -> 0` with probability `r`, `0 -> 1` with `1 - r`, `1 -> 0` surely.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MarkovParams {
    r: f64,
}

impl MarkovParams {
    pub fn new(r: f64) -> Result<Self> {
        if r > 0.0 && r < 1.0 {
            Ok(MarkovParams { r })
        } else {
            Err(Error::InvalidParameter(format!(
                "Markov parameter must lie in (0, 1), got {r}"
            )))
        }
    }

    pub fn r(self) -> f64 {
        self.r
    }

    pub fn initial(self) -> [f64; 2] {
        [self.r, 1.0 - self.r]
    }

    /// Row-stochastic transition matrix, indexed `[from][to]`.
    pub fn transition(self) -> [[f64; 2]; 2] {
        [[self.r, 1.0 - self.r], [1.0, 0.0]]
    }

    #[inline]
    pub(crate) fn log2_r(self) -> f64 {
        self.r.log2()
    }

    #[inline]
    pub(crate) fn log2_1mr(self) -> f64 {
        (1.0 - self.r).log2()
    }
}

impl TryFrom<f64> for MarkovParams {
    type Error = Error;
    fn try_from(r: f64) -> Result<Self> {
        MarkovParams::new(r)
    }
}

impl From<MarkovParams> for f64 {
    fn from(m: MarkovParams) -> f64 {
        m.r
    }
}

/// `log2 mu(r)[u] = N_1(u) log2(1-r) + (N_0(u) - N_1(u_1..u_{k-1})) log2 r`.
pub fn markov_cylinder_logprob(params: MarkovParams, u: &BinaryWord) -> LogProb {
    let k = u.len();
    if k == 0 {
        return LogProb::ONE;
    }
    let mut prev = false;
    for b in u.iter() {
        if prev && b {
            return LogProb::ZERO;
        }
        prev = b;
    }
    let n1 = u.count_ones();
    let n0 = k - n1;
    let n1_head = n1 - usize::from(u.get(k));
    let free_zeros = n0 - n1_head;
    let mut v = 0.0;
    if n1 > 0 {
        v += n1 as f64 * params.log2_1mr();
    }
    if free_zeros > 0 {
        v += free_zeros as f64 * params.log2_r();
    }
    LogProb::new(v).expect("log of a probability")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden::is_golden_word;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    /// Oracle: product of initial and transition probabilities.
    fn chain_prob(m: MarkovParams, u: &BinaryWord) -> f64 {
        let init = m.initial();
        let t = m.transition();
        let bits: Vec<usize> = u.iter().map(usize::from).collect();
        let mut prob = init[bits[0]];
        for pair in bits.windows(2) {
            prob *= t[pair[0]][pair[1]];
        }
        prob
    }

    #[test]
    fn examples() {
        let m = MarkovParams::new(0.3).unwrap();
        assert_eq!(markov_cylinder_logprob(m, &w("0")).value(), 0.3f64.log2());
        assert_eq!(markov_cylinder_logprob(m, &w("10")).value(), 0.7f64.log2());
        assert!(markov_cylinder_logprob(m, &w("11")).is_zero());
        let v = markov_cylinder_logprob(m, &w("01")).value();
        assert!((v - (0.3f64.log2() + 0.7f64.log2())).abs() < 1e-15);
        assert!(MarkovParams::new(1.0).is_err());
    }

    #[test]
    fn rows_are_stochastic() {
        let t = MarkovParams::new(0.42).unwrap().transition();
        for row in t {
            assert_eq!(row.iter().sum::<f64>(), 1.0);
        }
        assert_eq!(t[1][1], 0.0);
    }

    #[test]
    fn agrees_with_transition_product() {
        let m = MarkovParams::new(0.61).unwrap();
        for k in 1..=12 {
            for v in 0u64..1 << k {
                let u = BinaryWord::from_u64(v, k);
                let lp = markov_cylinder_logprob(m, &u);
                let oracle = chain_prob(m, &u);
                assert_eq!(lp.is_zero(), !is_golden_word(&u));
                assert!((lp.prob() - oracle).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn normalized_and_consistent() {
        let m = MarkovParams::new(0.57).unwrap();
        for k in 1..=16 {
            let total: f64 = (0u64..1 << k)
                .map(|v| markov_cylinder_logprob(m, &BinaryWord::from_u64(v, k)).prob())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "k = {k}");
        }
        for k in 1..=12 {
            for v in 0u64..1 << k {
                let u = BinaryWord::from_u64(v, k);
                let mut u0 = u.clone();
                u0.push(false);
                let mut u1 = u.clone();
                u1.push(true);
                let lhs = markov_cylinder_logprob(m, &u).prob();
                let rhs = markov_cylinder_logprob(m, &u0).prob() + markov_cylinder_logprob(m, &u1).prob();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }
}
