//! Exact polynomials with rational coefficients, restricted to what the
//! entropy polynomials `F_k` need.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::interval::{rat_int, CertifiedInterval};

/// Dense polynomial; `coeffs[j]` multiplies `x^j`. No trailing zeros.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| rat_int(v)).collect())
    }

    pub fn constant(c: i64) -> Self {
        Poly::from_ints(&[c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(1), |acc, _| &acc * self)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * rat_int(j as i64))
                .collect(),
        )
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap())
    }

    /// Horner evaluation in interval arithmetic.
    pub fn eval_interval(&self, x: &CertifiedInterval) -> CertifiedInterval {
        self.coeffs.iter().rev().fold(CertifiedInterval::from_int(0), |acc, c| {
            &(&acc * x) + &CertifiedInterval::point(c.clone())
        })
    }

    /// Euclidean division `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.coeffs[dd].clone();
        if self.coeffs.len() <= dd {
            return (Poly::default(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.coeffs.len() - dd];
        for j in (0..quot.len()).rev() {
            let c = &rem[j + dd] / &lead;
            for (t, dc) in divisor.coeffs.iter().enumerate() {
                rem[j + t] = &rem[j + t] - &c * dc;
            }
            quot[j] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|j| self.coeffs.get(j).unwrap_or(&z) + rhs.coeffs.get(j).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|j| self.coeffs.get(j).unwrap_or(&z) - rhs.coeffs.get(j).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::default();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{j}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// `F_k(x)` with `H^{mu(r)}(alpha_{k+1}) = H(r) F_k(r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyPolynomial {
    k: usize,
    poly: Poly,
}

impl EntropyPolynomial {
    pub fn index(&self) -> usize {
        self.k
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.poly.eval_f64(x)
    }

    pub fn eval_interval(&self, x: &CertifiedInterval) -> CertifiedInterval {
        self.poly.eval_interval(x)
    }

    pub fn derivative(&self) -> Poly {
        self.poly.derivative()
    }
}

/// `F_0, ..., F_k` from `F_k = 1 + x F_{k-1} + (1 - x) F_{k-2}`.
pub fn entropy_polys_upto(k: usize) -> Vec<EntropyPolynomial> {
    let one = Poly::constant(1);
    let x = Poly::x();
    let one_minus_x = Poly::from_ints(&[1, -1]);
    let mut out: Vec<Poly> = vec![one.clone(), Poly::from_ints(&[1, 1])];
    while out.len() <= k {
        let n = out.len();
        let next = &(&one + &(&x * &out[n - 1])) + &(&one_minus_x * &out[n - 2]);
        out.push(next);
    }
    out.truncate(k + 1);
    out.into_iter()
        .enumerate()
        .map(|(k, poly)| EntropyPolynomial { k, poly })
        .collect()
}

pub fn entropy_poly(k: usize) -> EntropyPolynomial {
    entropy_polys_upto(k).pop().expect("non-empty")
}

/// Exact quotient `((x-1)^{k+2} - (k+2)x + (2k+3)) / (x-2)^2`, together with
/// the division remainder (which must vanish).
pub fn entropy_poly_closed_form(k: usize) -> (Poly, Poly) {
    let x_minus_1 = Poly::from_ints(&[-1, 1]);
    let kk = k as i64;
    let linear = Poly::from_ints(&[2 * kk + 3, -(kk + 2)]);
    let numerator = &x_minus_1.pow(k as u32 + 2) + &linear;
    let denominator = Poly::from_ints(&[-2, 1]).pow(2);
    numerator.div_rem(&denominator)
}

/// Value of `F_k(1)` implied by the recurrence.
pub fn entropy_poly_at_one(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k as u64 + 1))
}
