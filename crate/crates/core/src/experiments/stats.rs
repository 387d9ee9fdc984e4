//! Summary statistics and trend fits used by the experiment reports.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Sample quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: u64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(n: u64, xs: &[f64]) -> Self {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        Summary {
            n,
            median: quantile(&v, 0.5),
            q1: quantile(&v, 0.25),
            q3: quantile(&v, 0.75),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            max: v[v.len() - 1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TrendVerdict {
    Decreasing,
    Increasing,
    Inconclusive,
}

impl std::fmt::Display for TrendVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrendVerdict::Decreasing => "DECREASING",
            TrendVerdict::Increasing => "INCREASING",
            TrendVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Theil–Sen slope with Sen's rank-based confidence interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub confidence: f64,
    pub points: usize,
    pub verdict: TrendVerdict,
}

/// Median of pairwise slopes; the 95% band is Sen's interval from the
/// normal approximation to Kendall's `S` (no tie correction), with ranks
/// rounded outward.
pub fn theil_sen(xs: &[f64], ys: &[f64]) -> Result<TrendFit> {
    let m = xs.len();
    if m != ys.len() || m < 3 {
        return Err(Error::InvalidParameter(format!(
            "trend fit needs at least 3 paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let mut slopes = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            if xs[j] == xs[i] {
                return Err(Error::InvalidParameter("repeated abscissa".into()));
            }
            slopes.push((ys[j] - ys[i]) / (xs[j] - xs[i]));
        }
    }
    slopes.sort_by(f64::total_cmp);
    let n_pairs = slopes.len() as f64;
    let slope = quantile(&slopes, 0.5);
    let mf = m as f64;
    let var_s = mf * (mf - 1.0) * (2.0 * mf + 5.0) / 18.0;
    let c = Z95 * var_s.sqrt();
    let lower_rank = ((n_pairs - c) / 2.0).floor().max(1.0) as usize;
    let upper_rank = (((n_pairs + c) / 2.0).ceil() + 1.0).min(n_pairs) as usize;
    let slope_lo = slopes[lower_rank - 1];
    let slope_hi = slopes[upper_rank - 1];
    let residuals: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - slope * x).collect();
    let verdict = if slope_hi < 0.0 {
        TrendVerdict::Decreasing
    } else if slope_lo > 0.0 {
        TrendVerdict::Increasing
    } else {
        TrendVerdict::Inconclusive
    };
    Ok(TrendFit {
        slope,
        intercept: median(&residuals),
        slope_lo,
        slope_hi,
        confidence: 0.95,
        points: m,
        verdict,
    })
}

/// Ordinary least squares with a Student-t interval on the slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let m = xs.len();
    if m != ys.len() || m < 3 {
        return Err(Error::InvalidParameter(format!(
            "regression needs at least 3 paired points, got {m}"
        )));
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("constant abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_se = (sse / (mf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, mf - 2.0)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    Ok(LinearFit {
        slope,
        intercept,
        slope_se,
        slope_lo: slope - t * slope_se,
        slope_hi: slope + t * slope_se,
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        points: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        let s = Summary::of(8, &[4.0, 1.0, 3.0, 2.0]);
        assert_eq!((s.q1, s.median, s.q3, s.mean), (1.75, 2.5, 3.25, 2.5));
    }

    #[test]
    fn theil_sen_exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let f = theil_sen(&xs, &ys).unwrap();
        assert_eq!(f.slope, -2.0);
        assert_eq!(f.intercept, 3.0);
        assert_eq!(f.verdict, TrendVerdict::Decreasing);
        let flat = theil_sen(&xs, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(flat.verdict, TrendVerdict::Inconclusive);
        assert!(theil_sen(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn theil_sen_resists_outlier() {
        let xs: Vec<f64> = (0..12).map(f64::from).collect();
        let mut ys: Vec<f64> = xs.iter().map(|x| 0.5 * x).collect();
        ys[11] = -100.0;
        let f = theil_sen(&xs, &ys).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert_eq!(f.verdict, TrendVerdict::Increasing);
    }

    #[test]
    fn verdict_depends_only_on_ordering() {
        // pairwise slope signs, hence the verdict, survive a monotone change of abscissa
        let xs: Vec<f64> = (1..15).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x: &f64| (x * 1.7).sin() + 0.3 * x).collect();
        let a = theil_sen(&xs, &ys).unwrap();
        let b = theil_sen(&xs.iter().map(|x| x.exp2()).collect::<Vec<_>>(), &ys).unwrap();
        assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn least_squares_line() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 3.1, 4.9, 7.0, 9.0];
        let f = least_squares(&xs, &ys).unwrap();
        assert!((f.slope - 1.99).abs() < 1e-9);
        assert!(f.slope_lo < f.slope && f.slope < f.slope_hi);
        assert!(f.r_squared > 0.99);
    }
}
