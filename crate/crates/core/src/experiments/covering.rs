//! Uniform covers by level-`n` cylinders and box-counting estimates.

use serde::{Deserialize, Serialize};

use super::stats::{theil_sen, TrendFit, TrendVerdict};
use crate::analytics::{gauge_log2, Gauge, GaugeDescriptor};
use crate::error::{Error, Result};
use crate::golden::count_cylinders_log2;

/// `log2` of the sum of `gauge(2^-n)` over all admissible level-`n` cylinders.
pub fn covering_sum(gauge: &Gauge, n: u64) -> Result<f64> {
    Ok(count_cylinders_log2(n) + gauge_log2(gauge, n)?)
}

/// `log2(#admissible words of length n) / n`.
pub fn box_dimension_estimate(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("box dimension estimate needs n >= 2, got {n}")));
    }
    Ok(count_cylinders_log2(n) / n as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub gauge: GaugeDescriptor,
    pub n_grid: Vec<u64>,
    pub log2_sums: Vec<f64>,
    /// `max |log2 sum| / (log2 n)^2` over the grid.
    pub polylog_constant: f64,
    pub trend: TrendFit,
    pub verdict: TrendVerdict,
}

pub fn covering_series(gauge: &Gauge, n_grid: &[u64]) -> Result<CoverReport> {
    let log2_sums = n_grid
        .iter()
        .map(|&n| covering_sum(gauge, n))
        .collect::<Result<Vec<_>>>()?;
    let polylog_constant = n_grid
        .iter()
        .zip(&log2_sums)
        .map(|(&n, v)| v.abs() / (n as f64).log2().powi(2))
        .fold(0.0, f64::max);
    let xs: Vec<f64> = n_grid.iter().map(|&n| (n as f64).log2()).collect();
    let trend = theil_sen(&xs, &log2_sums)?;
    Ok(CoverReport {
        gauge: gauge.descriptor(),
        n_grid: n_grid.to_vec(),
        log2_sums,
        polylog_constant,
        verdict: trend.verdict,
        trend,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimReport {
    pub n_grid: Vec<u64>,
    pub estimates: Vec<f64>,
    pub reference: f64,
    pub abs_errors: Vec<f64>,
    /// Trend of the absolute error; DECREASING means convergence.
    pub trend: TrendFit,
    pub verdict: TrendVerdict,
}

/// Box-counting estimates on a grid against a reference value of `dim_M`.
pub fn box_dimension_series(n_grid: &[u64], reference: f64) -> Result<BoxDimReport> {
    let estimates = n_grid
        .iter()
        .map(|&n| box_dimension_estimate(n))
        .collect::<Result<Vec<_>>>()?;
    let abs_errors: Vec<f64> = estimates.iter().map(|e| (e - reference).abs()).collect();
    let xs: Vec<f64> = n_grid.iter().map(|&n| (n as f64).log2()).collect();
    let trend = theil_sen(&xs, &abs_errors)?;
    Ok(BoxDimReport {
        n_grid: n_grid.to_vec(),
        estimates,
        reference,
        abs_errors,
        verdict: trend.verdict,
        trend,
    })
}
