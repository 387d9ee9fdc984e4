//! Log-domain evaluation of the Markov measures `mu(r)` on golden words and
//! of the chain product measures on the multiplicative shift, and sampling
//! from them.

pub mod logprob;
pub mod markov;
pub mod product;
pub mod sampling;

pub use logprob::LogProb;
pub use markov::{markov_cylinder_logprob, MarkovParams};
pub use product::{
    chain_breakdown, literal_indexing_diagnostic, pdelta_literal_logprob, pdelta_logprob, pdelta_logprob_by_chains,
    pmu_identity_gap, pmu_logprob, prefix_logprob, BlockAssignment, BlockRule, ChainTerm, LiteralDiagnostic,
    MeasureSpec, PrefixScanner,
};
pub use sampling::{sample_chain, sample_point, sample_word, RandomStream, SampledPoint, SeedKey};
