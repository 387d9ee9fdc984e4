//! Derivative series at `p` and the certified sign of
//! `tau = sum_k k (H F_{k-1})'(p) / 2^{k+1}`.
//!
//! Tail estimates use `|F_n(p)| < 3 + 3n/2`, `|F'_n(p)| < 3n + 6`, `H(p) < 0.7`
//! and `|H'(p)| < 0.3`. The last two hold for the natural-log entropy, so the
//! certified sums are computed in nats; a change of unit rescales every term by
//! the positive constant `1 / ln 2` and leaves signs unchanged.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::constants::solve_p;
use super::entropy::{binary_entropy_derivative_interval, binary_entropy_interval, EntropyUnit};
use super::interval::{certified_sign, rat, rat_int, rational_from_f64, CertifiedInterval, IntervalRecord};
use super::poly::{entropy_polys_upto, EntropyPolynomial, Poly};
use super::series::half_dyadic_tail_sum;
use crate::error::{Error, Result};

/// Number of explicitly summed terms in the certificate for `tau`.
pub const TAU_TERMS: usize = 12;

fn check_half_open(x: &CertifiedInterval) -> Result<()> {
    if x.lo() > &rat(1, 2) && x.hi() < &rat_int(1) {
        Ok(())
    } else {
        Err(Error::Domain(format!("enclosure {x} is not inside (1/2, 1)")))
    }
}

fn dyadic_weight(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << (k + 1))
}

struct EntropyAt {
    h: CertifiedInterval,
    dh: CertifiedInterval,
}

impl EntropyAt {
    fn new(x: &CertifiedInterval, unit: EntropyUnit) -> Result<Self> {
        Ok(EntropyAt {
            h: binary_entropy_interval(x, unit)?,
            dh: binary_entropy_derivative_interval(x, unit)?,
        })
    }

    fn hf_derivative(&self, f: &EntropyPolynomial, x: &CertifiedInterval) -> CertifiedInterval {
        let fv = f.eval_interval(x);
        let dfv = f.derivative().eval_interval(x);
        &(&self.h * &dfv) + &(&self.dh * &fv)
    }
}

/// Enclosure of `(H F_{k-1})'(x) = H(x) F'_{k-1}(x) + H'(x) F_{k-1}(x)`.
pub fn hf_derivative_at(k: usize, x: &CertifiedInterval, unit: EntropyUnit) -> Result<CertifiedInterval> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    check_half_open(x)?;
    let f = entropy_polys_upto(k - 1).pop().expect("non-empty");
    Ok(EntropyAt::new(x, unit)?.hf_derivative(&f, x))
}

/// Enclosures of `H(p)` and `|H'(p)|` in nats, after checking the numeric
/// premises of the tail estimates.
fn certified_tail_premises() -> Result<EntropyAt> {
    let at = EntropyAt::new(&solve_p(), EntropyUnit::Nats)?;
    if !(at.h.hi() < &rat(7, 10) && at.h.is_positive()) {
        return Err(Error::CertificationFailure(format!("H(p) = {} not below 0.7", at.h)));
    }
    if !(at.dh.abs_upper() < rat(3, 10)) {
        return Err(Error::CertificationFailure(format!(
            "|H'(p)| = {} not below 0.3",
            at.dh
        )));
    }
    Ok(at)
}

/// `sum_{k > terms} (0.7 (3k + 3) + 0.3 (3k + 3) / 2) / 2^{k+1}`.
pub fn derivative_series_tail(terms: usize) -> BigRational {
    // 0.7 * 3 + 0.15 * 3 = 2.55 per unit of (k + 1)
    let q = Poly::new(vec![rat(255, 100), rat(255, 100)]);
    half_dyadic_tail_sum(&q, terms as u64 + 1)
}

/// Enclosure of `sum_k (H F_{k-1})'(p) / 2^{k+1}` (nats): the first `terms`
/// terms in interval arithmetic, widened by [`derivative_series_tail`].
pub fn derivative_series_at_p(terms: usize) -> Result<CertifiedInterval> {
    if terms == 0 {
        return Err(Error::Domain("need at least one term".into()));
    }
    let p = solve_p();
    let at = certified_tail_premises()?;
    let polys = entropy_polys_upto(terms - 1);
    let mut sum = CertifiedInterval::from_int(0);
    for (idx, f) in polys.iter().enumerate() {
        let k = idx + 1;
        sum = &sum + &at.hf_derivative(f, &p).scale(&dyadic_weight(k));
    }
    Ok(&sum + &CertifiedInterval::symmetric(derivative_series_tail(terms)))
}

/// `sum_{k > terms} 3k(k+1) / 2^{k+1}`, exactly.
pub fn tau_tail_bound(terms: usize) -> BigRational {
    half_dyadic_tail_sum(&Poly::from_ints(&[0, 3, 3]), terms as u64 + 1)
}

/// Enclosure of `sum_{k <= terms} k (H F_{k-1})'(p) / 2^{k+1}`.
pub fn tau_partial(terms: usize, unit: EntropyUnit) -> Result<CertifiedInterval> {
    let p = solve_p();
    let at = EntropyAt::new(&p, unit)?;
    let polys = entropy_polys_upto(terms.saturating_sub(1));
    let mut sum = CertifiedInterval::from_int(0);
    for (idx, f) in polys.iter().enumerate().take(terms) {
        let k = idx + 1;
        let w = dyadic_weight(k) * rat_int(k as i64);
        sum = &sum + &at.hf_derivative(f, &p).scale(&w);
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SignVerdict {
    Positive,
    Negative,
    Unknown,
}

impl std::fmt::Display for SignVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignVerdict::Positive => "POSITIVE",
            SignVerdict::Negative => "NEGATIVE",
            SignVerdict::Unknown => "UNKNOWN",
        })
    }
}

/// Outcome of the positivity certificate for `tau`.
#[derive(Clone, Debug)]
pub struct TauCertificate {
    /// Number of explicitly summed terms.
    pub terms: usize,
    /// Enclosure of the first twelve terms (nats).
    pub partial: CertifiedInterval,
    /// Enclosure of `sum_{k >= 13} 3k(k+1)/2^{k+1}` (a point interval).
    pub tail_bound: CertifiedInterval,
    /// `partial.lo - tail_bound.hi`.
    pub lower_bound: BigRational,
    pub sign: SignVerdict,
}

impl TauCertificate {
    pub fn lower_bound_f64(&self) -> f64 {
        self.lower_bound.to_f64().unwrap()
    }

    pub fn record(&self) -> TauRecord {
        TauRecord {
            unit: EntropyUnit::Nats,
            terms: self.terms,
            partial: IntervalRecord::from(&self.partial),
            tail_bound: IntervalRecord::from(&self.tail_bound),
            lower_bound: self.lower_bound.to_string(),
            lower_bound_approx: self.lower_bound_f64(),
            sign: self.sign,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauRecord {
    pub unit: EntropyUnit,
    pub terms: usize,
    pub partial: IntervalRecord,
    pub tail_bound: IntervalRecord,
    pub lower_bound: String,
    pub lower_bound_approx: f64,
    pub sign: SignVerdict,
}

/// Certify `tau > 0`: twelve terms in interval arithmetic minus the exact
/// crude tail bound.
pub fn tau_certify() -> Result<TauCertificate> {
    tau_certify_with(TAU_TERMS)
}

/// As [`tau_certify`] with `terms` explicit terms; few terms leave the tail
/// bound too large and the certification fails.
pub fn tau_certify_with(terms: usize) -> Result<TauCertificate> {
    if terms == 0 {
        return Err(Error::Domain("need at least one term".into()));
    }
    certified_tail_premises()?;
    let partial = tau_partial(terms, EntropyUnit::Nats)?;
    let tail = tau_tail_bound(terms);
    let lower_bound = partial.lo() - &tail;
    if !lower_bound.is_positive() {
        return Err(Error::CertificationFailure(format!(
            "partial sum {partial} does not dominate tail bound {}",
            tail.to_f64().unwrap()
        )));
    }
    Ok(TauCertificate {
        terms,
        partial,
        tail_bound: CertifiedInterval::point(tail),
        lower_bound,
        sign: SignVerdict::Positive,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauGamma {
    pub gamma: f64,
    pub terms: usize,
    pub value: f64,
    pub tail_bound: f64,
    pub sign: SignVerdict,
}

/// Enclosure of `k^{1+gamma}` from the libm power, widened by a few ulps.
fn power_weight(k: usize, exponent: f64) -> CertifiedInterval {
    let w = (k as f64).powf(exponent);
    let slack = 8.0 * f64::EPSILON * w;
    CertifiedInterval::new(rational_from_f64(w - slack), rational_from_f64(w + slack)).expect("ordered")
}

/// `tau_gamma = sum_k k^{1+gamma} (H F_{k-1})'(p) / 2^{k+1}` (nats).
///
/// The tail uses `k^{1+gamma} <= k^d` with `d = ceil(1 + gamma)`.
pub fn tau_gamma(gamma: f64, terms: usize) -> Result<TauGamma> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    if terms == 0 {
        return Err(Error::Domain("need at least one term".into()));
    }
    let p = solve_p();
    let at = certified_tail_premises()?;
    let polys = entropy_polys_upto(terms - 1);
    let mut sum = CertifiedInterval::from_int(0);
    for (idx, f) in polys.iter().enumerate() {
        let k = idx + 1;
        let term = at.hf_derivative(f, &p).scale(&dyadic_weight(k));
        sum = &sum + &(&term * &power_weight(k, 1.0 + gamma));
    }
    let degree = (1.0 + gamma).ceil() as usize;
    // 2.55 (k + 1) k^degree
    let mut coeffs = vec![rat_int(0); degree + 2];
    coeffs[degree] = rat(255, 100);
    coeffs[degree + 1] = rat(255, 100);
    let tail = half_dyadic_tail_sum(&Poly::new(coeffs), terms as u64 + 1);
    let enclosure = &sum + &CertifiedInterval::symmetric(tail.clone());
    let sign = match certified_sign(&enclosure) {
        Some(Ordering::Greater) => SignVerdict::Positive,
        Some(Ordering::Less) => SignVerdict::Negative,
        _ => SignVerdict::Unknown,
    };
    Ok(TauGamma {
        gamma,
        terms,
        value: sum.mid_f64(),
        tail_bound: tail.to_f64().unwrap(),
        sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hf_derivative_k1_is_entropy_slope() {
        let p = solve_p();
        let d = hf_derivative_at(1, &p, EntropyUnit::Nats).unwrap();
        assert!(d.within(-0.281198, 1e-5));
        assert!(d.abs_upper() < rat(3, 10));
        let h = binary_entropy_derivative_interval(&p, EntropyUnit::Nats).unwrap();
        assert!(h.is_subset_of(&d) || d.is_subset_of(&h));
        assert!(hf_derivative_at(2, &CertifiedInterval::from_ratio(1, 4), EntropyUnit::Nats).is_err());
    }

    #[test]
    fn derivative_series_contains_zero() {
        for k in [12, 20, 40, 60] {
            let iv = derivative_series_at_p(k).unwrap();
            assert!(iv.contains_zero(), "K = {k}: {iv}");
        }
        assert!(derivative_series_at_p(40).unwrap().width_f64() < 1e-6);
    }

    #[test]
    fn derivative_tail_monotone() {
        let t: Vec<_> = (1..50).map(derivative_series_tail).collect();
        assert!(t.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn consecutive_partials_differ_by_one_term() {
        let p = solve_p();
        let at = EntropyAt::new(&p, EntropyUnit::Nats).unwrap();
        let f1 = &entropy_polys_upto(1)[1];
        let k2 = at.hf_derivative(f1, &p).scale(&(dyadic_weight(2) * rat_int(2)));
        let one = tau_partial(1, EntropyUnit::Nats).unwrap();
        let two = tau_partial(2, EntropyUnit::Nats).unwrap();
        let sum = &one + &k2;
        assert!(sum.within(two.mid_f64(), 1e-15));
        assert!(sum.is_subset_of(&two.hull(&sum)) && (&sum - &two).contains_zero());
    }

    #[test]
    fn tau_is_certified_positive() {
        assert!(matches!(tau_certify_with(3), Err(Error::CertificationFailure(_))));
        assert_eq!(tau_certify_with(20).unwrap().sign, SignVerdict::Positive);
        let c = tau_certify().unwrap();
        assert_eq!(c.sign, SignVerdict::Positive);
        assert!(c.partial.within(0.187469, 1e-5));
        assert!(c.tail_bound.hi() < &rat(1, 10));
        assert!(c.lower_bound_f64() > 0.08);
    }

    #[test]
    fn tau_gamma_behaviour() {
        let base = tau_partial(TAU_TERMS, EntropyUnit::Nats).unwrap().mid_f64();
        let near0 = tau_gamma(1e-9, TAU_TERMS).unwrap();
        assert!((near0.value - base).abs() < 1e-7);
        assert_eq!(tau_gamma(1.0, 12).unwrap().sign, SignVerdict::Positive);
        let tails: Vec<f64> = (5..30).map(|k| tau_gamma(0.5, k).unwrap().tail_bound).collect();
        assert!(tails.windows(2).all(|w| w[1] < w[0]));
        assert!(tau_gamma(0.0, 12).is_err());
    }
}
