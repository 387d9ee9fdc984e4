//! Closed intervals with exact rational endpoints.
//!
//! Every operation returns an interval that contains the exact image of its
//! inputs. Endpoints are snapped outward to dyadic rationals with
//! [`PRECISION_BITS`] fractional bits so that sizes stay bounded through long
//! computations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional bits kept on interval endpoints after each rounded operation.
pub const PRECISION_BITS: u32 = 192;

#[derive(Clone, PartialEq, Eq)]
pub struct CertifiedInterval {
    lo: BigRational,
    hi: BigRational,
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn round_down(q: &BigRational, bits: u32) -> BigRational {
    let scale = pow2(bits);
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.floor().to_integer(), scale)
}

fn round_up(q: &BigRational, bits: u32) -> BigRational {
    let scale = pow2(bits);
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.ceil().to_integer(), scale)
}

fn min_max(vals: [BigRational; 4]) -> (BigRational, BigRational) {
    let mut lo = vals[0].clone();
    let mut hi = vals[0].clone();
    for v in &vals[1..] {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    (lo, hi)
}

impl CertifiedInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(q: BigRational) -> Self {
        Self { lo: q.clone(), hi: q }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::point(rat(n, d))
    }

    /// Degenerate interval at the exact value of `x`.
    pub fn from_f64(x: f64) -> Self {
        Self::point(rational_from_f64(x))
    }

    /// `[-r, r]`.
    pub fn symmetric(r: BigRational) -> Self {
        let r = r.abs();
        Self { lo: -r.clone(), hi: r }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Exact containment test for the binary value of `x`.
    pub fn contains_f64(&self, x: f64) -> bool {
        self.contains(&rational_from_f64(x))
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    /// True iff the interval meets `[x - tol, x + tol]`.
    pub fn within(&self, x: f64, tol: f64) -> bool {
        let a = rational_from_f64(x) - rational_from_f64(tol);
        let b = rational_from_f64(x) + rational_from_f64(tol);
        self.lo <= b && a <= self.hi
    }

    pub fn is_subset_of(&self, other: &CertifiedInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Certified `self < other`.
    pub fn certainly_lt(&self, other: &CertifiedInterval) -> bool {
        self.hi < other.lo
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn hull(&self, other: &CertifiedInterval) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Snap endpoints outward to multiples of `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        Self {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    fn rounded(self) -> Self {
        self.round_out(PRECISION_BITS)
    }

    pub fn abs_upper(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if q.is_negative() {
            Self { lo: b, hi: a }
        } else {
            Self { lo: a, hi: b }
        }
        .rounded()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::Domain(format!("reciprocal of interval containing zero: {self}")));
        }
        Ok(Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
        .rounded())
    }

    pub fn div(&self, other: &CertifiedInterval) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = CertifiedInterval::from_int(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Natural logarithm; requires a strictly positive interval.
    pub fn ln(&self) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(Error::Domain(format!("ln of non-positive interval {self}")));
        }
        let lo = ln_rational(&self.lo).lo;
        let hi = ln_rational(&self.hi).hi;
        Ok(Self { lo, hi })
    }

    pub fn log2(&self) -> Result<Self> {
        self.ln()?.div(ln2())
    }

    /// Endpoints as `(numerator/denominator, numerator/denominator)` strings.
    pub fn rational_strings(&self) -> (String, String) {
        (self.lo.to_string(), self.hi.to_string())
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

impl fmt::Debug for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CertifiedInterval{self}")
    }
}

impl Add for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn add(self, rhs: &CertifiedInterval) -> CertifiedInterval {
        CertifiedInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
        .rounded()
    }
}

impl Sub for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn sub(self, rhs: &CertifiedInterval) -> CertifiedInterval {
        CertifiedInterval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
        .rounded()
    }
}

impl Mul for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn mul(self, rhs: &CertifiedInterval) -> CertifiedInterval {
        let (lo, hi) = min_max([
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ]);
        CertifiedInterval { lo, hi }.rounded()
    }
}

impl Neg for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn neg(self) -> CertifiedInterval {
        CertifiedInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CertifiedInterval {
            type Output = CertifiedInterval;
            fn $m(self, rhs: CertifiedInterval) -> CertifiedInterval {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CertifiedInterval> for CertifiedInterval {
            type Output = CertifiedInterval;
            fn $m(self, rhs: &CertifiedInterval) -> CertifiedInterval {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CertifiedInterval {
    type Output = CertifiedInterval;
    fn neg(self) -> CertifiedInterval {
        -&self
    }
}

/// Enclosure of `2 atanh(z) = ln((1+z)/(1-z))` for rational `|z| <= 1/3`.
fn two_atanh(z: &BigRational) -> CertifiedInterval {
    debug_assert!(z.abs() <= rat(1, 3));
    if z.is_zero() {
        return CertifiedInterval::from_int(0);
    }
    let z_iv = CertifiedInterval::point(z.clone());
    let z2 = &z_iv * &z_iv;
    let z2_hi = z2.hi.clone();
    let mut power = z_iv.round_out(PRECISION_BITS);
    let mut sum = CertifiedInterval::from_int(0);
    let target = BigRational::new(BigInt::one(), pow2(PRECISION_BITS + 4));
    let mut j: i64 = 0;
    loop {
        let term = power.scale(&rat(1, 2 * j + 1));
        sum = &sum + &term;
        power = &power * &z2;
        j += 1;
        // |tail| <= |z|^{2j+1} / ((2j+1)(1 - z^2))
        let tail = power.abs_upper() / (rat_int(2 * j + 1) * (rat_int(1) - &z2_hi));
        if tail < target {
            let widened = &sum + &CertifiedInterval::symmetric(tail);
            return widened.scale(&rat_int(2));
        }
    }
}

/// Enclosure of `ln 2`.
pub fn ln2() -> &'static CertifiedInterval {
    static LN2: OnceLock<CertifiedInterval> = OnceLock::new();
    LN2.get_or_init(|| two_atanh(&rat(1, 3)))
}

/// Enclosure of `ln q` for a positive rational `q`.
pub fn ln_rational(q: &BigRational) -> CertifiedInterval {
    assert!(q.is_positive(), "ln of non-positive rational");
    if q.is_one() {
        return CertifiedInterval::from_int(0);
    }
    // q = 2^e m with m in [2/3, 4/3], so |(m-1)/(m+1)| <= 1/5
    let mut e: i64 = q.numer().bits() as i64 - q.denom().bits() as i64;
    let scale_by = |e: i64| -> BigRational {
        if e >= 0 {
            q / BigRational::from_integer(pow2(e as u32))
        } else {
            q * BigRational::from_integer(pow2((-e) as u32))
        }
    };
    let mut m = scale_by(e);
    while m > rat(4, 3) {
        e += 1;
        m = scale_by(e);
    }
    while m < rat(2, 3) {
        e -= 1;
        m = scale_by(e);
    }
    let z = (&m - rat_int(1)) / (&m + rat_int(1));
    let ln_m = two_atanh(&z);
    &ln_m + &ln2().scale(&rat_int(e))
}

/// Sign of an interval, or `None` if it straddles zero.
pub fn certified_sign(x: &CertifiedInterval) -> Option<Ordering> {
    if x.is_positive() {
        Some(Ordering::Greater)
    } else if x.is_negative() {
        Some(Ordering::Less)
    } else if x.lo.is_zero() && x.hi.is_zero() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

/// Machine-readable form: exact endpoints plus decimal approximations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub lo: String,
    pub hi: String,
    pub lo_approx: f64,
    pub hi_approx: f64,
    pub width: f64,
}

impl From<&CertifiedInterval> for IntervalRecord {
    fn from(iv: &CertifiedInterval) -> Self {
        let (lo, hi) = iv.rational_strings();
        IntervalRecord {
            lo,
            hi,
            lo_approx: iv.lo_f64(),
            hi_approx: iv.hi_f64(),
            width: iv.width_f64(),
        }
    }
}

impl IntervalRecord {
    pub fn to_interval(&self) -> Result<CertifiedInterval> {
        let parse = |s: &str| -> Result<BigRational> {
            s.parse::<BigRational>()
                .map_err(|e| Error::InvalidParameter(format!("bad rational {s:?}: {e}")))
        };
        CertifiedInterval::new(parse(&self.lo)?, parse(&self.hi)?)
    }
}
