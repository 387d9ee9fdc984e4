//! The dyadic telescoping sum behind the upper bound for `psi`-gauges.
//!
//! With `b_j = (log2 P_mu[x_1^{2^j}] - log2 psi(2^{-2^j})) / 2^j`,
//! `b_1 + ... + b_l = (s/2)(N_0(x_1^{2^l}) / 2^l - N_0(x_1^1)) + sum_{j <= l} 1/((ln 2) g(j))`
//! holds for every admissible point.

use serde::{Deserialize, Serialize};

use super::stats::least_squares;
use crate::analytics::{s_f64, Gauge, MonotoneFn};
use crate::error::{Error, Result};
use crate::measures::{sample_word, BlockAssignment, PrefixScanner, SeedKey};
use crate::word::BinaryWord;

/// Largest supported `ell_max`; the sampled prefix has length `2^ell_max`.
pub const MAX_ELL: u32 = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SeriesVerdict {
    Bounded,
    Divergent,
    Inconclusive,
}

impl std::fmt::Display for SeriesVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SeriesVerdict::Bounded => "BOUNDED",
            SeriesVerdict::Divergent => "DIVERGENT",
            SeriesVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeRow {
    pub j: u32,
    pub b_j: f64,
    pub partial_sum: f64,
    pub closed_form: f64,
    pub gauge_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeReport {
    pub g: String,
    pub seed: u64,
    pub ell_max: u32,
    pub rows: Vec<TelescopeRow>,
    pub max_gap: f64,
    /// `2^m / g(2^m)` for `m = 1..=60`; the condensed form of `sum 1/g(j)`.
    pub condensation: Vec<f64>,
    pub verdict: SeriesVerdict,
}

const CONDENSATION_TERMS: u32 = 60;

/// Terms `2^m / g(2^m)` whose sum converges iff `sum_j 1/g(j)` does.
pub fn condensation_terms(g: &MonotoneFn) -> Vec<f64> {
    (1..=CONDENSATION_TERMS)
        .map(|m| {
            let t = 2f64.powi(m as i32);
            t / g.eval(t)
        })
        .collect()
}

/// Classifies `sum a_m` from its first terms: geometric decay or a fitted
/// power-law exponent above 1.05 means BOUNDED, an exponent at most 1.02
/// means DIVERGENT.
pub fn classify_condensed(a: &[f64]) -> SeriesVerdict {
    if a.len() < 40 || a.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return SeriesVerdict::Inconclusive;
    }
    let tail = &a[a.len() - 20..];
    if tail.windows(2).all(|w| w[1] / w[0] <= 0.9) {
        return SeriesVerdict::Bounded;
    }
    let start = a.len() / 3;
    let xs: Vec<f64> = (start..a.len()).map(|m| ((m + 1) as f64).ln()).collect();
    let ys: Vec<f64> = a[start..].iter().map(|v| v.ln()).collect();
    match least_squares(&xs, &ys) {
        Ok(fit) if -fit.slope > 1.05 => SeriesVerdict::Bounded,
        Ok(fit) if -fit.slope <= 1.02 => SeriesVerdict::Divergent,
        _ => SeriesVerdict::Inconclusive,
    }
}

/// Telescoping check on a supplied point `x` of length at least `2^ell_max`.
pub fn telescoping_on(x: &BinaryWord, g: &MonotoneFn, ell_max: u32, seed: u64) -> Result<TelescopeReport> {
    if !(2..=MAX_ELL).contains(&ell_max) {
        return Err(Error::InvalidParameter(format!(
            "ell_max must lie in 2..={MAX_ELL}, got {ell_max}"
        )));
    }
    if x.len() < 1 << ell_max {
        return Err(Error::InvalidParameter("point shorter than 2^ell_max".into()));
    }
    let s = s_f64();
    let gauge = Gauge::PsiG { s, g: g.clone() };
    let assign = BlockAssignment::uniform();
    let mut scan = PrefixScanner::new(&assign);
    let z1 = x.count_zeros_prefix(1) as f64;
    let mut rows = Vec::with_capacity(ell_max as usize);
    let mut partial = 0.0;
    let mut gauge_sum = 0.0;
    let mut max_gap: f64 = 0.0;
    for j in 1..=ell_max {
        let n = 1usize << j;
        scan.advance_to(x, n);
        let lp = scan.logprob();
        if lp.is_zero() {
            return Err(Error::Inadmissible);
        }
        let b_j = (lp.value() - gauge.log2_at_unchecked(n as f64)) / n as f64;
        partial += b_j;
        gauge_sum += 1.0 / (std::f64::consts::LN_2 * g.eval(j as f64));
        let zn = x.count_zeros_prefix(n) as f64;
        let closed_form = s / 2.0 * (zn / n as f64 - z1) + gauge_sum;
        max_gap = max_gap.max((partial - closed_form).abs());
        rows.push(TelescopeRow {
            j,
            b_j,
            partial_sum: partial,
            closed_form,
            gauge_sum,
        });
    }
    let condensation = condensation_terms(g);
    Ok(TelescopeReport {
        g: g.label().to_string(),
        seed,
        ell_max,
        rows,
        max_gap,
        verdict: classify_condensed(&condensation),
        condensation,
    })
}

/// Samples a `P_mu`-typical point of length `2^ell_max` and runs [`telescoping_on`].
pub fn upper_bound_telescoping(g: &MonotoneFn, ell_max: u32, seed: u64) -> Result<TelescopeReport> {
    if !(2..=MAX_ELL).contains(&ell_max) {
        return Err(Error::InvalidParameter(format!(
            "ell_max must lie in 2..={MAX_ELL}, got {ell_max}"
        )));
    }
    let x = sample_word(&BlockAssignment::uniform(), 1 << ell_max, &SeedKey::from_seed(seed));
    telescoping_on(&x, g, ell_max, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_holds_on_samples() {
        for seed in 0..5 {
            let r = upper_bound_telescoping(&MonotoneFn::power(1.0), 16, seed).unwrap();
            assert!(r.max_gap < 1e-8, "gap {}", r.max_gap);
            assert_eq!(r.rows.len(), 16);
        }
    }

    #[test]
    fn identity_holds_on_fixed_points() {
        let g = MonotoneFn::power(1.5);
        let zeros = BinaryWord::zeros(1 << 10);
        assert!(telescoping_on(&zeros, &g, 10, 0).unwrap().max_gap < 1e-10);
        // ones exactly at odd positions: every chain reads 1 0 0 ...
        let odd_ones = BinaryWord::from_bits((1..=1 << 10).map(|j| j % 2 == 1));
        assert!(telescoping_on(&odd_ones, &g, 10, 0).unwrap().max_gap < 1e-10);
        let bad = BinaryWord::from_bits((1..=1 << 10).map(|j| j <= 2));
        assert_eq!(telescoping_on(&bad, &g, 10, 0), Err(Error::Inadmissible));
    }

    #[test]
    fn harmonic_gauge_grows_without_bound() {
        let r = upper_bound_telescoping(&MonotoneFn::power(1.0), 20, 1).unwrap();
        assert_eq!(r.verdict, SeriesVerdict::Divergent);
        let harmonic: f64 = (1..=20).map(|j| 1.0 / j as f64).sum::<f64>() / std::f64::consts::LN_2;
        assert!((r.rows[19].gauge_sum - harmonic).abs() < 1e-12);
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify_condensed(&condensation_terms(&MonotoneFn::power(2.0))),
            SeriesVerdict::Bounded
        );
        let tlogt = MonotoneFn::new("t log t", |t: f64| t * t.max(2.0).log2());
        assert_eq!(
            classify_condensed(&condensation_terms(&tlogt)),
            SeriesVerdict::Divergent
        );
        let tlog2t = MonotoneFn::new("t log^2 t", |t: f64| t * t.max(2.0).log2().powi(2));
        assert_eq!(classify_condensed(&condensation_terms(&tlog2t)), SeriesVerdict::Bounded);
        assert_eq!(classify_condensed(&[1.0; 10]), SeriesVerdict::Inconclusive);
    }

    #[test]
    fn rejects_bad_ell() {
        assert!(upper_bound_telescoping(&MonotoneFn::power(1.0), 1, 0).is_err());
        assert!(upper_bound_telescoping(&MonotoneFn::power(1.0), 40, 0).is_err());
    }
}
