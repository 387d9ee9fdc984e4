//! Density trajectories `d_n = log2 P[x_1^n] - log2 gauge(2^-n)` along
//! sampled points.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{theil_sen, Summary, TrendFit, TrendVerdict};
use crate::analytics::{gauge_log2, partition_entropy, s_f64, tau_certify, Gauge, GaugeDescriptor};
use crate::error::{Error, Result};
use crate::measures::{sample_word, BlockAssignment, MeasureSpec, PrefixScanner, SeedKey};

/// Default dyadic grid `2^4, ..., 2^20`.
pub fn default_n_grid() -> Vec<u64> {
    (4..=20).map(|e| 1u64 << e).collect()
}

/// Default seed list `0, ..., count - 1` shifted by `base`.
pub fn seed_list(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

/// Frequency over seeds of the event that `log2 P_delta[x_1^n]` exceeds
/// `-n sum_{k <= l/2} H^{mu_{l-k}}(alpha_k) / 2^{k+1} + b_eps n^{1-eps}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationEvent {
    pub n: u64,
    pub threshold: f64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub experiment: String,
    pub measure: MeasureSpec,
    pub gauge: GaugeDescriptor,
    pub n_grid: Vec<u64>,
    pub seeds: Vec<u64>,
    /// `series[s][j]` is the statistic for `seeds[s]` at `n_grid[j]`.
    pub series: Vec<Vec<f64>>,
    pub summary: Vec<Summary>,
    /// Fit of the median against `log2 n`.
    pub trend: TrendFit,
    pub verdict: TrendVerdict,
    /// Largest deviation from `log2 P_mu + ns = s (N_0(x_1^n)/2 - N_0(x_1^{n/2}))`
    /// over even grid points; only for uniform block parameters.
    pub identity_max_gap: Option<f64>,
    /// Whether the median strictly decreases over `n >= 2^12`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone_beyond_4096: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deviation_events: Vec<DeviationEvent>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

struct SeedRun {
    values: Vec<f64>,
    logprobs: Vec<f64>,
    gap: f64,
}

fn run_seed(
    assign: &BlockAssignment,
    gauge: &Gauge,
    n_grid: &[u64],
    seed: u64,
    check_identity: bool,
) -> Result<SeedRun> {
    let n_max = *n_grid.last().expect("non-empty grid") as usize;
    let word = sample_word(assign, n_max, &SeedKey::from_seed(seed));
    let mut scan = PrefixScanner::new(assign);
    let s = s_f64();
    let mut run = SeedRun {
        values: Vec::with_capacity(n_grid.len()),
        logprobs: Vec::with_capacity(n_grid.len()),
        gap: 0.0,
    };
    for &n in n_grid {
        scan.advance_to(&word, n as usize);
        let lp = scan.logprob();
        if lp.is_zero() {
            return Err(Error::Inadmissible);
        }
        let lp = lp.value();
        if check_identity && n % 2 == 0 {
            let z = word.count_zeros_prefix(n as usize) as f64;
            let zh = word.count_zeros_prefix(n as usize / 2) as f64;
            let gap = (lp + n as f64 * s - s * (z / 2.0 - zh)).abs();
            run.gap = run.gap.max(gap);
        }
        run.logprobs.push(lp);
        run.values.push(lp - gauge_log2(gauge, n)?);
    }
    Ok(run)
}

fn check_grid(n_grid: &[u64], seeds: &[u64]) -> Result<()> {
    if n_grid.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidParameter("grid and seed list must be non-empty".into()));
    }
    if n_grid[0] < 4 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "grid must be strictly ascending with n >= 4".into(),
        ));
    }
    Ok(())
}

fn run_all(
    experiment: &str,
    measure: &MeasureSpec,
    gauge: &Gauge,
    n_grid: &[u64],
    seeds: &[u64],
) -> Result<(TrajectoryReport, Vec<Vec<f64>>)> {
    check_grid(n_grid, seeds)?;
    let assign = measure.assignment();
    let check_identity = assign.is_uniform() && assign.parameter(0) == crate::analytics::p_f64();
    let runs = seeds
        .par_iter()
        .map(|&seed| run_seed(&assign, gauge, n_grid, seed, check_identity))
        .collect::<Result<Vec<_>>>()?;
    let summary: Vec<Summary> = n_grid
        .iter()
        .enumerate()
        .map(|(j, &n)| Summary::of(n, &runs.iter().map(|r| r.values[j]).collect::<Vec<_>>()))
        .collect();
    let xs: Vec<f64> = n_grid.iter().map(|&n| (n as f64).log2()).collect();
    let medians: Vec<f64> = summary.iter().map(|s| s.median).collect();
    let trend = theil_sen(&xs, &medians)?;
    let gap = runs.iter().map(|r| r.gap).fold(0.0, f64::max);
    let logprobs = runs.iter().map(|r| r.logprobs.clone()).collect();
    Ok((
        TrajectoryReport {
            experiment: experiment.to_string(),
            measure: measure.clone(),
            gauge: gauge.descriptor(),
            n_grid: n_grid.to_vec(),
            seeds: seeds.to_vec(),
            series: runs.into_iter().map(|r| r.values).collect(),
            summary,
            verdict: trend.verdict,
            trend,
            identity_max_gap: check_identity.then_some(gap),
            monotone_beyond_4096: None,
            deviation_events: vec![],
            notes: vec![],
        },
        logprobs,
    ))
}

/// Samples one point per seed up to `max(n_grid)` and records `d_n` on the grid.
pub fn density_trajectory(
    measure: &MeasureSpec,
    gauge: &Gauge,
    n_grid: &[u64],
    seeds: &[u64],
) -> Result<TrajectoryReport> {
    Ok(run_all("density", measure, gauge, n_grid, seeds)?.0)
}

/// Certified lower bound for `tau` with entropies in bits.
pub fn tau_bits_lower() -> f64 {
    static T: OnceLock<f64> = OnceLock::new();
    *T.get_or_init(|| {
        tau_certify()
            .map(|c| c.lower_bound_f64() / std::f64::consts::LN_2)
            .unwrap_or(0.0)
    })
}

/// `b_eps = sum_{k >= 1} 2^{-(k+1) eps}`.
pub fn b_epsilon(eps: f64) -> f64 {
    2f64.powf(-2.0 * eps) / (1.0 - 2f64.powf(-eps))
}

fn deviation_threshold(assign: &BlockAssignment, n: u64, eps: f64) -> Result<f64> {
    let ell = if n <= 1 { 0 } else { 64 - (n - 1).leading_zeros() };
    let mut sum = 0.0;
    for k in 1..=ell / 2 {
        let r = assign.parameter(ell - k);
        sum += partition_entropy(r, k as usize)? / 2f64.powi(k as i32 + 1);
    }
    Ok(-(n as f64) * sum + b_epsilon(eps) * (n as f64).powf(1.0 - eps))
}

/// `S_n = log2 P_delta[x_1^n] + ns + cn/(log2 n)^2` along `P_delta`-typical points.
///
/// The verdict is the trend of the median `S_n`, except that it is forced to
/// INCONCLUSIVE unless `c` is certifiably below `tau delta`.
pub fn lower_bound_trajectory(
    delta: f64,
    c: f64,
    n_grid: &[u64],
    seeds: &[u64],
    epsilon: f64,
) -> Result<TrajectoryReport> {
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("c must be >= 0, got {c}")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    let measure = MeasureSpec::pdelta(delta)?;
    let gauge = Gauge::Phi { s: s_f64(), c };
    let (mut report, logprobs) = run_all("lower", &measure, &gauge, n_grid, seeds)?;
    let tail: Vec<f64> = report
        .summary
        .iter()
        .filter(|s| s.n >= 1 << 12)
        .map(|s| s.median)
        .collect();
    report.monotone_beyond_4096 = Some(tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0]));
    let tau = tau_bits_lower();
    if !(c < tau * delta) {
        report.verdict = TrendVerdict::Inconclusive;
        report.notes.push(format!(
            "c = {c} is not below tau * delta = {} (certified tau >= {tau} bits)",
            tau * delta
        ));
    }
    let assign = measure.assignment();
    for (j, &n) in n_grid.iter().enumerate() {
        let threshold = deviation_threshold(&assign, n, epsilon)?;
        let hits = logprobs.iter().filter(|lp| lp[j] > threshold).count();
        report.deviation_events.push(DeviationEvent {
            n,
            threshold,
            frequency: hits as f64 / seeds.len() as f64,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::MonotoneFn;
    use crate::golden::is_multiplicative_prefix;
    use crate::measures::{pdelta_logprob, sample_point};

    #[test]
    fn pure_s_reduces_to_zero_count_identity() {
        let s = s_f64();
        let grid: Vec<u64> = vec![4, 6, 10, 64, 100, 1000, 4096];
        let seeds = seed_list(5, 8);
        let r = density_trajectory(&MeasureSpec::Pmu, &Gauge::PureS { s }, &grid, &seeds).unwrap();
        assert!(r.identity_max_gap.unwrap() < 1e-8);
        for (si, &seed) in seeds.iter().enumerate() {
            let x = sample_point(&MeasureSpec::Pmu, 4096, seed).unwrap().word;
            assert!(is_multiplicative_prefix(&x));
            for (j, &n) in grid.iter().enumerate() {
                let u = x.prefix(n as usize);
                let direct = pdelta_logprob(&BlockAssignment::uniform(), &u).value() + n as f64 * s;
                let via = s * (u.count_zeros() as f64 / 2.0 - x.count_zeros_prefix(n as usize / 2) as f64);
                assert!((r.series[si][j] - direct).abs() < 1e-8);
                assert!((direct - via).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn lower_bound_identity_at_zero_parameters() {
        let grid: Vec<u64> = (4..=12).map(|e| 1 << e).collect();
        let r = lower_bound_trajectory(0.0, 0.0, &grid, &seed_list(0, 10), 0.25).unwrap();
        assert!(r.identity_max_gap.unwrap() < 1e-8);
        assert_eq!(r.verdict, TrendVerdict::Inconclusive);
        assert!(r.series.iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn large_c_is_inconclusive() {
        let grid: Vec<u64> = (4..=10).map(|e| 1 << e).collect();
        let r = lower_bound_trajectory(0.05, 0.5, &grid, &seed_list(0, 10), 0.25).unwrap();
        assert_eq!(r.verdict, TrendVerdict::Inconclusive);
        assert!(!r.notes.is_empty());
        assert_eq!(r.deviation_events.len(), grid.len());
        assert!(r.deviation_events.iter().all(|e| (0.0..=1.0).contains(&e.frequency)));
    }

    #[test]
    fn reproducible() {
        let grid: Vec<u64> = (4..=11).map(|e| 1 << e).collect();
        let g = Gauge::PsiG {
            s: s_f64(),
            g: MonotoneFn::power(1.0),
        };
        let a = density_trajectory(&MeasureSpec::pdelta(0.05).unwrap(), &g, &grid, &seed_list(3, 6)).unwrap();
        let b = density_trajectory(&MeasureSpec::pdelta(0.05).unwrap(), &g, &grid, &seed_list(3, 6)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.identity_max_gap.is_none());
    }

    #[test]
    fn psi_one_drifts_up() {
        let grid: Vec<u64> = (4..=14).map(|e| 1 << e).collect();
        let g = Gauge::PsiTheta { s: s_f64(), theta: 1.0 };
        let r = density_trajectory(&MeasureSpec::Pmu, &g, &grid, &seed_list(0, 20)).unwrap();
        assert_eq!(r.verdict, TrendVerdict::Increasing);
    }

    #[test]
    fn rejects_bad_grids() {
        let g = Gauge::PureS { s: 0.8 };
        assert!(density_trajectory(&MeasureSpec::Pmu, &g, &[2, 8], &[1]).is_err());
        assert!(density_trajectory(&MeasureSpec::Pmu, &g, &[8, 8], &[1]).is_err());
        assert!(density_trajectory(&MeasureSpec::Pmu, &g, &[8, 16, 32], &[]).is_err());
        assert!(lower_bound_trajectory(0.05, 0.002, &[8, 16, 32], &[1], 0.7).is_err());
    }

    #[test]
    fn b_epsilon_matches_series() {
        let direct: f64 = (1..200).map(|k| 2f64.powf(-(k as f64 + 1.0) * 0.25)).sum();
        assert!((b_epsilon(0.25) - direct).abs() < 1e-9);
    }
}
