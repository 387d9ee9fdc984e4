//! Expected number of zeros under the product measure.

use super::constants::p_f64;
use crate::error::{Error, Result};
use crate::golden::chain_length_counts;

/// `L_k = E[N_0(u)]` for `u` of length `k` under `mu(r)`:
/// `k/(2-r) - (1 - (r-1)^k) (r-1)^2 / (2-r)^2`.
pub fn expected_zero_count_chain(r: f64, k: u32) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {r}")));
    }
    if k == 0 {
        return Err(Error::Domain("chain length must be at least 1".into()));
    }
    let q = r - 1.0;
    let d = 2.0 - r;
    Ok(k as f64 / d - (1.0 - q.powi(k as i32)) * q * q / (d * d))
}

/// `E[N_0(x_1^n)]` under `P_mu` with parameter `r`, summed over the chain
/// partition of `1..=n`.
pub fn expected_zero_count_prefix_with(r: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("prefix length must be at least 1".into()));
    }
    chain_length_counts(n)
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(idx, &a)| Ok(a as f64 * expected_zero_count_chain(r, idx as u32 + 1)?))
        .sum()
}

/// `E[N_0(x_1^n)]` under `P_mu` with `mu = mu(p)`.
pub fn expected_zero_count_prefix(n: u64) -> Result<f64> {
    expected_zero_count_prefix_with(p_f64(), n)
}

/// `E[N_0(x_1^{2n})]/2 - E[N_0(x_1^n)]`.
pub fn expectation_doubling_gap(n: u64) -> Result<f64> {
    Ok(expected_zero_count_prefix(2 * n)? / 2.0 - expected_zero_count_prefix(n)?)
}

/// Smallest `C` with `|gap(n)| <= C (log2 n)^2` for all `2 <= n <= n_max`.
pub fn fit_doubling_gap_constant(n_max: u64) -> Result<f64> {
    let mut c: f64 = 0.0;
    for n in 2..=n_max {
        let l = (n as f64).log2();
        c = c.max(expectation_doubling_gap(n)?.abs() / (l * l));
    }
    Ok(c)
}
