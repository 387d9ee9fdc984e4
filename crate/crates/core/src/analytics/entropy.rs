//! Binary entropy, partition entropies of the Markov measures and the series
//! `A(r) = H(r) sum_k F_{k-1}(r) / 2^{k+1}`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::interval::{ln2, rat, rat_int, CertifiedInterval};
use super::poly::{entropy_poly, entropy_polys_upto, Poly};
use super::series::half_dyadic_tail_sum;
use crate::error::{Error, Result};

/// Logarithm base for entropies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    Bits,
    Nats,
}

impl EntropyUnit {
    /// Multiplier taking a value in nats to this unit.
    pub fn nats_factor(self) -> f64 {
        match self {
            EntropyUnit::Bits => std::f64::consts::LOG2_E,
            EntropyUnit::Nats => 1.0,
        }
    }

    fn convert_nats(self, x: CertifiedInterval) -> CertifiedInterval {
        match self {
            EntropyUnit::Bits => x.div(ln2()).expect("ln 2 > 0"),
            EntropyUnit::Nats => x,
        }
    }
}

fn check_open_unit(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability must lie in (0, 1), got {r}")))
    }
}

fn check_open_unit_interval(x: &CertifiedInterval) -> Result<()> {
    if x.lo() > &rat_int(0) && x.hi() < &rat_int(1) {
        Ok(())
    } else {
        Err(Error::Domain(format!("enclosure {x} is not inside (0, 1)")))
    }
}

/// `H(r) = -r log2 r - (1-r) log2 (1-r)`.
pub fn binary_entropy(r: f64) -> Result<f64> {
    binary_entropy_in(r, EntropyUnit::Bits)
}

pub fn binary_entropy_in(r: f64, unit: EntropyUnit) -> Result<f64> {
    check_open_unit(r)?;
    let nats = -r * r.ln() - (1.0 - r) * (1.0 - r).ln();
    Ok(nats * unit.nats_factor())
}

/// Enclosure of `H(x)` over an enclosure `x` of a point in `(0, 1)`.
pub fn binary_entropy_interval(x: &CertifiedInterval, unit: EntropyUnit) -> Result<CertifiedInterval> {
    check_open_unit_interval(x)?;
    let one = CertifiedInterval::from_int(1);
    let y = &one - x;
    let nats = -(&(x * &x.ln()?) + &(&y * &y.ln()?));
    Ok(unit.convert_nats(nats))
}

/// Enclosure of `H'(x) = log((1-x)/x)`.
pub fn binary_entropy_derivative_interval(x: &CertifiedInterval, unit: EntropyUnit) -> Result<CertifiedInterval> {
    check_open_unit_interval(x)?;
    let one = CertifiedInterval::from_int(1);
    let ratio = (&one - x).div(x)?;
    Ok(unit.convert_nats(ratio.ln()?))
}

/// Entropy in bits of the length-`k` cylinder partition under `mu(r)`,
/// computed as `H(r) F_{k-1}(r)`.
pub fn partition_entropy(r: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("partition length must be at least 1".into()));
    }
    Ok(binary_entropy(r)? * entropy_poly(k - 1).eval_f64(r))
}

/// `A(r) = 2 H(r) / (3 - r)` in bits.
pub fn a_closed(r: f64) -> Result<f64> {
    Ok(2.0 * binary_entropy(r)? / (3.0 - r))
}

/// Partial sum of a series together with a bound on what was left out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Linear bound `a + b n` on `|F_n(r)|`.
///
/// On `(1/2, 1)` the closed form gives `F_n < 3 + 3n/2`; on all of `(0, 1)`
/// the numerator lies in `(0, 2n + 4)` and `(x - 2)^2 > 1`.
pub(crate) fn entropy_poly_bound(r: f64) -> (BigRational, BigRational) {
    if r > 0.5 {
        (rat_int(3), rat(3, 2))
    } else {
        (rat_int(4), rat_int(2))
    }
}

/// `sum_{k >= start} (a + b (k - 1)) / 2^{k+1}`.
pub(crate) fn linear_tail(a: &BigRational, b: &BigRational, start: u64) -> BigRational {
    let q = Poly::new(vec![a - b, b.clone()]);
    half_dyadic_tail_sum(&q, start)
}

/// `sum_{k <= terms} H(r) F_{k-1}(r) / 2^{k+1}` with a rigorous tail bound.
pub fn a_series(r: f64, terms: usize) -> Result<SeriesValue> {
    check_open_unit(r)?;
    if terms == 0 {
        return Err(Error::Domain("need at least one term".into()));
    }
    let h = binary_entropy(r)?;
    let polys = entropy_polys_upto(terms - 1);
    let mut value = 0.0;
    let mut scale = 0.25;
    for f in &polys {
        value += h * f.eval_f64(r) * scale;
        scale *= 0.5;
    }
    let (a, b) = entropy_poly_bound(r);
    let tail = linear_tail(&a, &b, terms as u64 + 1).to_f64().unwrap() * h;
    // allowance for the floating-point evaluation of the partial sum
    let rounding = 16.0 * f64::EPSILON * terms as f64 * value.abs().max(1.0);
    Ok(SeriesValue {
        value,
        tail_bound: tail + rounding,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden::is_golden_word;
    use crate::word::BinaryWord;

    #[test]
    fn entropy_basics() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        for r in [0.1, 0.3, 0.49] {
            assert!((binary_entropy(r).unwrap() - binary_entropy(1.0 - r).unwrap()).abs() < 1e-15);
        }
        assert!(binary_entropy(0.0).is_err());
        assert!(binary_entropy(1.0).is_err());
        assert!(partition_entropy(1.5, 2).is_err());
    }

    /// Oracle: Shannon entropy of the length-k cylinders by enumeration.
    fn brute_entropy(r: f64, k: usize) -> f64 {
        (0u64..1 << k)
            .map(|v| BinaryWord::from_u64(v, k))
            .filter(is_golden_word)
            .map(|u| {
                let mut prob = 1.0;
                let mut prev = false;
                for b in u.iter() {
                    prob *= match (prev, b) {
                        (true, _) => 1.0,
                        (false, true) => 1.0 - r,
                        (false, false) => r,
                    };
                    prev = b;
                }
                -prob * prob.log2()
            })
            .sum()
    }

    #[test]
    fn partition_entropy_small_cases() {
        let r = 0.37;
        assert!((partition_entropy(r, 1).unwrap() - binary_entropy(r).unwrap()).abs() < 1e-15);
        assert!((partition_entropy(r, 2).unwrap() - binary_entropy(r).unwrap() * (1.0 + r)).abs() < 1e-15);
        assert!((partition_entropy(0.5, 3).unwrap() - brute_entropy(0.5, 3)).abs() < 1e-12);
    }

    #[test]
    fn partition_entropy_matches_enumeration() {
        for r in [0.3, 0.5, 0.7, 0.569_840_290_998_053_2] {
            for k in 1..=12 {
                let d = (partition_entropy(r, k).unwrap() - brute_entropy(r, k)).abs();
                assert!(d < 1e-9, "r = {r}, k = {k}, diff = {d}");
            }
        }
    }

    #[test]
    fn a_closed_at_half() {
        assert!((a_closed(0.5).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn a_series_within_tail_on_grid() {
        for j in 1..100 {
            let r = j as f64 / 100.0;
            let s = a_series(r, 40).unwrap();
            let closed = a_closed(r).unwrap();
            assert!((closed - s.value).abs() <= s.tail_bound, "r = {r}");
        }
    }

    #[test]
    fn tail_bound_decreases_with_terms() {
        let t: Vec<f64> = (5..40).map(|k| a_series(0.6, k).unwrap().tail_bound).collect();
        assert!(t.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn interval_entropy_agrees() {
        let x = CertifiedInterval::from_ratio(3, 10);
        let h = binary_entropy_interval(&x, EntropyUnit::Bits).unwrap();
        assert!(h.within(binary_entropy(0.3).unwrap(), 1e-15));
        let hn = binary_entropy_interval(&x, EntropyUnit::Nats).unwrap();
        assert!(hn.within(binary_entropy_in(0.3, EntropyUnit::Nats).unwrap(), 1e-15));
        let d = binary_entropy_derivative_interval(&x, EntropyUnit::Bits).unwrap();
        assert!(d.within((0.7f64 / 0.3).log2(), 1e-14));
        assert!(binary_entropy_interval(&CertifiedInterval::from_int(1), EntropyUnit::Bits).is_err());
    }
}
