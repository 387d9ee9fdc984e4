//! Product measures on the multiplicative shift: independent Markov laws on
//! the chains `J(i)`, with a parameter depending only on the dyadic block
//! `floor(log2 i)` of the chain start.

use serde::{Deserialize, Serialize};

use super::logprob::LogProb;
use super::markov::{markov_cylinder_logprob, MarkovParams};
use crate::analytics::p_f64;
use crate::error::{Error, Result};
use crate::golden::{chain_length, is_multiplicative_prefix, restrict_to_chain, ChainIndex};
use crate::word::BinaryWord;

/// Blocks with a stored parameter; chain starts are `u64`, so block < 64.
const BLOCKS: usize = 64;

/// How the parameter `p_k` of block `k >= 1` is chosen; block 0 always uses `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BlockRule {
    /// `p_k = p + delta / k`.
    Harmonic { delta: f64 },
    /// `p_k = p + delta / k^{1+gamma}`, or minus when `negative`.
    Power { delta: f64, gamma: f64, negative: bool },
    /// `p_k = values[k-1]`; blocks past the end use `p`.
    Explicit { values: Vec<f64> },
    /// Every block, block 0 included, uses `r`.
    Constant { r: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockRule", into = "BlockRule")]
pub struct BlockAssignment {
    rule: BlockRule,
    params: Vec<MarkovParams>,
    log2_r: Vec<f64>,
    log2_1mr: Vec<f64>,
}

impl BlockAssignment {
    pub fn new(rule: BlockRule) -> Result<Self> {
        let p = p_f64();
        let value = |k: usize| -> Result<f64> {
            if let BlockRule::Constant { r } = &rule {
                return Ok(*r);
            }
            if k == 0 {
                return Ok(p);
            }
            let kf = k as f64;
            Ok(match &rule {
                BlockRule::Harmonic { delta } => {
                    if !(*delta >= 0.0) {
                        return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
                    }
                    p + delta / kf
                }
                BlockRule::Power { delta, gamma, negative } => {
                    if !(*delta >= 0.0 && *gamma >= 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "delta and gamma must be >= 0, got {delta}, {gamma}"
                        )));
                    }
                    let step = delta / kf.powf(1.0 + gamma);
                    if *negative {
                        p - step
                    } else {
                        p + step
                    }
                }
                BlockRule::Explicit { values } => values.get(k - 1).copied().unwrap_or(p),
                BlockRule::Constant { r } => *r,
            })
        };
        let params = (0..BLOCKS)
            .map(|k| {
                let r = value(k)?;
                MarkovParams::new(r)
                    .map_err(|_| Error::InvalidParameter(format!("block {k} parameter {r} is outside (0, 1)")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockAssignment {
            log2_r: params.iter().map(|m| m.log2_r()).collect(),
            log2_1mr: params.iter().map(|m| m.log2_1mr()).collect(),
            rule,
            params,
        })
    }

    /// Every block uses `mu(p)`; the resulting measure is `P_mu`.
    pub fn uniform() -> Self {
        BlockAssignment::harmonic(0.0).expect("p lies in (0, 1)")
    }

    pub fn harmonic(delta: f64) -> Result<Self> {
        BlockAssignment::new(BlockRule::Harmonic { delta })
    }

    pub fn rule(&self) -> &BlockRule {
        &self.rule
    }

    pub fn params(&self, block: u32) -> MarkovParams {
        self.params[block as usize]
    }

    pub fn parameter(&self, block: u32) -> f64 {
        self.params[block as usize].r()
    }

    pub fn is_uniform(&self) -> bool {
        self.params.iter().all(|m| m.r() == self.params[0].r())
    }
}

impl TryFrom<BlockRule> for BlockAssignment {
    type Error = Error;
    fn try_from(rule: BlockRule) -> Result<Self> {
        BlockAssignment::new(rule)
    }
}

impl From<BlockAssignment> for BlockRule {
    fn from(a: BlockAssignment) -> BlockRule {
        a.rule
    }
}

/// Which product measure a sampled point or report refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "snake_case")]
pub enum MeasureSpec {
    Pmu,
    Pdelta { assignment: BlockAssignment },
}

impl MeasureSpec {
    pub fn pdelta(delta: f64) -> Result<Self> {
        Ok(MeasureSpec::Pdelta {
            assignment: BlockAssignment::harmonic(delta)?,
        })
    }

    pub fn assignment(&self) -> BlockAssignment {
        match self {
            MeasureSpec::Pmu => BlockAssignment::uniform(),
            MeasureSpec::Pdelta { assignment } => assignment.clone(),
        }
    }
}

/// Incremental evaluation of `log2 P[x_1^m]` for growing `m`.
///
/// A position `j` contributes `log2 (1 - p_b)` for a 1, `log2 p_b` for a 0
/// not forced by `x_{j/2} = 1`, nothing for a forced 0, where `b` is the
/// block of the chain through `j`. Counts are kept per block so the value
/// at any prefix is an exact integer combination of the block logs.
#[derive(Clone, Debug)]
pub struct PrefixScanner<'a> {
    assign: &'a BlockAssignment,
    free_zeros: [u64; BLOCKS],
    ones: [u64; BLOCKS],
    pos: usize,
    zero: bool,
}

impl<'a> PrefixScanner<'a> {
    pub fn new(assign: &'a BlockAssignment) -> Self {
        PrefixScanner {
            assign,
            free_zeros: [0; BLOCKS],
            ones: [0; BLOCKS],
            pos: 0,
            zero: false,
        }
    }

    /// Number of positions consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    /// Consumes positions up to `m` of `x`.
    pub fn advance_to(&mut self, x: &BinaryWord, m: usize) {
        assert!(m <= x.len(), "prefix {m} longer than word {}", x.len());
        while self.pos < m {
            self.pos += 1;
            let j = self.pos;
            let b = ChainIndex::of_position(j as u64).block() as usize;
            let forced = j.is_multiple_of(2) && x.get(j / 2);
            if x.get(j) {
                if forced {
                    self.zero = true;
                } else {
                    self.ones[b] += 1;
                }
            } else if !forced {
                self.free_zeros[b] += 1;
            }
        }
    }

    pub fn logprob(&self) -> LogProb {
        if self.zero {
            return LogProb::ZERO;
        }
        let mut v = 0.0;
        for b in 0..BLOCKS {
            if self.free_zeros[b] > 0 {
                v += self.free_zeros[b] as f64 * self.assign.log2_r[b];
            }
            if self.ones[b] > 0 {
                v += self.ones[b] as f64 * self.assign.log2_1mr[b];
            }
        }
        LogProb::new(v).expect("log of a probability")
    }
}

/// `log2 P[u]` for the product measure with the given block parameters.
pub fn prefix_logprob(assign: &BlockAssignment, u: &BinaryWord) -> LogProb {
    let mut scan = PrefixScanner::new(assign);
    scan.advance_to(u, u.len());
    scan.logprob()
}

/// `log2 P_delta[u]`.
pub fn pdelta_logprob(assign: &BlockAssignment, u: &BinaryWord) -> LogProb {
    prefix_logprob(assign, u)
}

/// `log2 P_mu[u]` with `mu = mu(p)`.
pub fn pmu_logprob(p: f64, u: &BinaryWord) -> Result<LogProb> {
    let assign = BlockAssignment::new(BlockRule::Constant { r: p })?;
    Ok(prefix_logprob(&assign, u))
}

/// One factor of the chain product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainTerm {
    pub chain: u64,
    pub restriction: BinaryWord,
    pub block: u32,
    pub parameter: f64,
    pub logprob: LogProb,
}

/// The factors `mu(p_{b(i)})[u|J(i)]` over odd `i <= |u|`.
pub fn chain_breakdown(assign: &BlockAssignment, u: &BinaryWord) -> Vec<ChainTerm> {
    (1..=u.len() as u64)
        .step_by(2)
        .map(|i| {
            let ci = ChainIndex::new(i).expect("odd");
            let restriction = restrict_to_chain(u, ci).expect("i <= |u|");
            let block = ci.block();
            let params = assign.params(block);
            ChainTerm {
                chain: i,
                logprob: markov_cylinder_logprob(params, &restriction),
                restriction,
                block,
                parameter: params.r(),
            }
        })
        .collect()
}

/// Reference evaluation as a sum over chain restrictions.
pub fn pdelta_logprob_by_chains(assign: &BlockAssignment, u: &BinaryWord) -> LogProb {
    chain_breakdown(assign, u).into_iter().map(|t| t.logprob).sum()
}

/// `log2 P_mu[u] - (n + N_0(u_1..u_{n/2}) - N_0(u)/2) log2 p`, which vanishes
/// identically because `1 - p = p^{3/2}`.
pub fn pmu_identity_gap(u: &BinaryWord) -> Result<f64> {
    let n = u.len();
    if n % 2 == 1 {
        return Err(Error::OddLength(n));
    }
    if !is_multiplicative_prefix(u) {
        return Err(Error::Inadmissible);
    }
    let p = p_f64();
    let lp = prefix_logprob(&BlockAssignment::uniform(), u).value();
    let exponent = n as f64 + u.count_zeros_prefix(n / 2) as f64 - u.count_zeros() as f64 / 2.0;
    Ok(lp - exponent * p.log2())
}

/// Comparison of the block-form parameters with the indexing `mu_{l-k}`
/// read off the length-dependent formula, where `2^{l-1} < n <= 2^l` and
/// `k` is the chain length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiteralDiagnostic {
    pub n: u64,
    pub ell: u32,
    /// Chains whose length exceeds `l` and hence fall outside the product.
    pub omitted_chains: Vec<u64>,
    /// `(i, block, l - k)` for chains where the two indices differ.
    pub index_mismatches: Vec<(u64, u32, u32)>,
}

fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

pub fn literal_indexing_diagnostic(n: u64) -> Result<LiteralDiagnostic> {
    if n == 0 {
        return Err(Error::Domain("prefix length must be positive".into()));
    }
    let ell = ceil_log2(n);
    let mut d = LiteralDiagnostic {
        n,
        ell,
        omitted_chains: vec![],
        index_mismatches: vec![],
    };
    for i in (1..=n).step_by(2) {
        let ci = ChainIndex::new(i)?;
        let k = chain_length(n, ci)?;
        if k > ell {
            d.omitted_chains.push(i);
        } else if ell - k != ci.block() {
            d.index_mismatches.push((i, ci.block(), ell - k));
        }
    }
    Ok(d)
}

/// `log2` of the length-dependent formula taken literally: chains of length
/// `k <= l` get `mu_{l-k}`, longer chains are absent, and `n = 1` is the
/// empty product.
pub fn pdelta_literal_logprob(assign: &BlockAssignment, u: &BinaryWord) -> Result<LogProb> {
    let n = u.len() as u64;
    if n == 0 {
        return Ok(LogProb::ONE);
    }
    let ell = ceil_log2(n);
    let mut total = LogProb::ONE;
    for i in (1..=n).step_by(2) {
        let ci = ChainIndex::new(i)?;
        let k = chain_length(n, ci)?;
        if k <= ell {
            let r = restrict_to_chain(u, ci)?;
            total = total + markov_cylinder_logprob(assign.params(ell - k), &r);
        }
    }
    Ok(total)
}
