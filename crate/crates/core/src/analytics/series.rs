//! Exact sums of `q(k) / 2^k` over infinite tails, `q` a polynomial in `k`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::interval::rat_int;
use super::poly::Poly;

/// `sum_{m >= 0} m^i / 2^m` for `i = 0..=d`.
///
/// Shifting the summation index gives `a_i = sum_{l < i} C(i, l) a_l`, `a_0 = 2`.
fn moment_sums(d: usize) -> Vec<BigRational> {
    let mut a = vec![rat_int(2)];
    for i in 1..=d {
        let s = (0..i).fold(BigRational::zero(), |acc, l| {
            acc + BigRational::from_integer(binomial(BigInt::from(i), BigInt::from(l))) * &a[l]
        });
        a.push(s);
    }
    a
}

/// `sum_{k >= start} q(k) / 2^k`, exactly.
pub fn dyadic_tail_sum(q: &Poly, start: u64) -> BigRational {
    let d = q.degree();
    let a = moment_sums(d);
    let start_q = BigRational::from_integer(BigInt::from(start));
    // q(m + start) = sum_j c_j sum_i C(j, i) start^{j-i} m^i
    let mut total = BigRational::zero();
    for (j, c) in q.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (i, a_i) in a.iter().enumerate().take(j + 1) {
            let bin = BigRational::from_integer(binomial(BigInt::from(j), BigInt::from(i)));
            let pow = num_traits::pow(start_q.clone(), j - i);
            total += c * bin * pow * a_i;
        }
    }
    total / BigRational::from_integer(BigInt::one() << start as usize)
}

/// `sum_{k >= start} q(k) / 2^{k+1}`, the normalisation used by the entropy series.
pub fn half_dyadic_tail_sum(q: &Poly, start: u64) -> BigRational {
    dyadic_tail_sum(q, start) / rat_int(2)
}
