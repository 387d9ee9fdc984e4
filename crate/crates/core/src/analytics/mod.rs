//! Exact and certified analysis: entropy polynomials, dimension constants,
//! the sign of `tau`, expectation formulas and gauges.

pub mod constants;
pub mod entropy;
pub mod expectation;
pub mod gauge;
pub mod interval;
pub mod poly;
pub mod series;
pub mod tau;

pub use constants::{dim_minkowski, hausdorff_dim, p_f64, s_f64, solve_p, MinkowskiDimension};
pub use entropy::{a_closed, a_series, binary_entropy, partition_entropy, EntropyUnit, SeriesValue};
pub use expectation::{expected_zero_count_chain, expected_zero_count_prefix};
pub use gauge::{gauge_log2, Gauge, GaugeDescriptor, MonotoneFn};
pub use interval::{CertifiedInterval, IntervalRecord};
pub use poly::{entropy_poly, EntropyPolynomial};
pub use tau::{
    derivative_series_at_p, hf_derivative_at, tau_certify, tau_certify_with, tau_gamma, SignVerdict, TauCertificate,
    TauGamma, TauRecord, TAU_TERMS,
};
