//! Certified dimension constants.
//!
//! `p` is the root in `(0, 1)` of `p^3 = (1 - p)^2`, i.e. of
//! `x^3 - x^2 + 2x - 1`; the Hausdorff dimension is `s = -log2 p` and the
//! Minkowski dimension is `sum_k 2^{-k-1} log2 F_{k+1}`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::interval::{rat, CertifiedInterval};
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::golden::FibonacciTable;

/// Bits of width of the certified enclosure of `p`.
pub const P_ENCLOSURE_BITS: u32 = 128;

/// `x^3 - x^2 + 2x - 1`, the expanded form of `x^3 - (1 - x)^2`.
pub fn golden_cubic() -> Poly {
    Poly::from_ints(&[-1, 2, -1, 1])
}

fn bisect_root(f: &Poly, mut lo: BigRational, mut hi: BigRational, bits: u32) -> Result<CertifiedInterval> {
    let f_lo = f.eval_rational(&lo);
    let f_hi = f.eval_rational(&hi);
    if f_lo.is_zero() {
        return Ok(CertifiedInterval::point(lo));
    }
    if f_hi.is_zero() {
        return Ok(CertifiedInterval::point(hi));
    }
    if f_lo.is_positive() == f_hi.is_positive() {
        return Err(Error::CertificationFailure(format!("no sign change on [{lo}, {hi}]")));
    }
    let lo_negative = f_lo.is_negative();
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    while &hi - &lo > target {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        let v = f.eval_rational(&mid);
        if v.is_zero() {
            return Ok(CertifiedInterval::point(mid));
        }
        if v.is_negative() == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    CertifiedInterval::new(lo, hi)
}

/// Enclosure of `p` of width at most `2^-128`, with certified sign change.
pub fn solve_p() -> CertifiedInterval {
    static P: OnceLock<CertifiedInterval> = OnceLock::new();
    P.get_or_init(|| {
        bisect_root(&golden_cubic(), rat(1, 2), rat(1, 1), P_ENCLOSURE_BITS)
            .expect("the cubic changes sign on [1/2, 1]")
    })
    .clone()
}

/// Nearest double to the midpoint of [`solve_p`].
pub fn p_f64() -> f64 {
    static P: OnceLock<f64> = OnceLock::new();
    *P.get_or_init(|| solve_p().mid_f64())
}

/// Enclosure of `s = -log2 p`.
pub fn hausdorff_dim() -> CertifiedInterval {
    static S: OnceLock<CertifiedInterval> = OnceLock::new();
    S.get_or_init(|| -solve_p().log2().expect("p > 0")).clone()
}

pub fn s_f64() -> f64 {
    static S: OnceLock<f64> = OnceLock::new();
    *S.get_or_init(|| hausdorff_dim().mid_f64())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiDimension {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
    #[serde(skip)]
    pub enclosure: Option<CertifiedInterval>,
}

/// `(K + 2) 2^{-K-1}`, which bounds `sum_{k > K} k 2^{-k-1}`.
pub fn minkowski_tail(terms: usize) -> BigRational {
    BigRational::new(BigInt::from(terms as u64 + 2), BigInt::one() << (terms + 1))
}

/// Partial sum of the Minkowski dimension series, truncated where the tail
/// bound (from `log2 F_{k+1} <= k`) drops below `tol`.
pub fn dim_minkowski(tol: f64) -> Result<MinkowskiDimension> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let tol_q = super::interval::rational_from_f64(tol);
    let mut terms = 1usize;
    while minkowski_tail(terms) >= tol_q {
        terms += 1;
    }
    let fib = FibonacciTable::up_to(terms + 1);
    let mut partial = CertifiedInterval::from_int(0);
    for k in 1..=terms {
        let f = CertifiedInterval::point(BigRational::from_integer(BigInt::from(fib.get(k + 1).clone())));
        let term = f
            .log2()?
            .scale(&BigRational::new(BigInt::one(), BigInt::one() << (k + 1)));
        partial = &partial + &term;
    }
    let tail = minkowski_tail(terms);
    let enclosure = CertifiedInterval::new(partial.lo().clone(), partial.hi() + &tail)?;
    Ok(MinkowskiDimension {
        value: partial.mid_f64(),
        tail_bound: tail.to_f64().unwrap(),
        terms,
        enclosure: Some(enclosure),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::entropy::a_closed;

    #[test]
    fn cubic_is_expanded_golden_equation() {
        let x = Poly::x();
        let one_minus_x = Poly::from_ints(&[1, -1]);
        assert_eq!(&x.pow(3) - &one_minus_x.pow(2), golden_cubic());
        // derivative 3x^2 - 2x + 2 has negative discriminant: the real root is unique
        let d = golden_cubic().derivative();
        assert_eq!(d, Poly::from_ints(&[2, -2, 3]));
        let c: Vec<i64> = [0, 1, 2]
            .iter()
            .map(|&i| d.coeffs()[i].to_integer().try_into().unwrap())
            .collect();
        assert!(c[1] * c[1] - 4 * c[2] * c[0] < 0);
    }

    #[test]
    fn p_enclosure() {
        let p = solve_p();
        let f = golden_cubic();
        assert!(f.eval_rational(p.lo()).is_negative());
        assert!(f.eval_rational(p.hi()).is_positive());
        assert!(p.width() <= BigRational::new(BigInt::one(), BigInt::one() << 80usize));
        assert!(p.within(0.56984, 1e-5));
        let m = p_f64();
        assert!((m.powi(3) - (1.0 - m).powi(2)).abs() < 2f64.powi(-52));
        // at the exact midpoint the residual is far below 2^-70
        let mid = p.midpoint();
        let resid = f.eval_rational(&mid).abs();
        assert!(resid < BigRational::new(BigInt::one(), BigInt::one() << 70usize));
    }

    #[test]
    fn dimension_constants() {
        let s = hausdorff_dim();
        assert!(s.within(0.81137, 1e-5));
        assert!(s.is_subset_of(&CertifiedInterval::new(rat(81, 100), rat(82, 100)).unwrap()));
        let m = dim_minkowski(1e-6).unwrap();
        assert!(m.tail_bound < 1e-6);
        assert!((m.value - 0.82429).abs() < 1e-5);
        assert!(s.certainly_lt(m.enclosure.as_ref().unwrap()));
        assert!(dim_minkowski(0.0).is_err());
    }

    #[test]
    fn wider_tolerance_still_encloses() {
        let tight = dim_minkowski(1e-9).unwrap().enclosure.unwrap();
        let loose = dim_minkowski(1e-2).unwrap().enclosure.unwrap();
        assert!(tight.is_subset_of(&loose));
    }

    #[test]
    fn a_closed_peaks_at_p() {
        // grid then golden-section refinement
        let (mut best, mut arg) = (f64::MIN, 0.0);
        for j in 1..1000 {
            let r = j as f64 / 1000.0;
            let v = a_closed(r).unwrap();
            if v > best {
                best = v;
                arg = r;
            }
        }
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (arg - 1e-3, arg + 1e-3);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if a_closed(c).unwrap() > a_closed(d).unwrap() {
                b = d;
            } else {
                a = c;
            }
        }
        let argmax = 0.5 * (a + b);
        assert!((a_closed(argmax).unwrap() - s_f64()).abs() < 1e-6);
        assert!((argmax - p_f64()).abs() < 1e-4);
        assert!((a_closed(p_f64()).unwrap() - s_f64()).abs() < 1e-12);
    }
}
