//! Report envelopes for persisted experiment runs.
//!
//! CSV reports start with `# ` header lines carrying the library version and
//! the run configuration, followed by the columns
//! `experiment,n,statistic,value,seed_count,config_hash`. JSON reports carry
//! the same rows plus the full experiment output under `details`.
//! Neither contains timestamps, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::covering::{BoxDimReport, CoverReport};
use crate::experiments::deviation::{rederive_verdict, CheckVerdict, DeviationReport};
use crate::experiments::stats::{median, theil_sen, TrendVerdict};
use crate::experiments::telescoping::{classify_condensed, TelescopeReport};
use crate::experiments::trajectory::{tau_bits_lower, TrajectoryReport};
use crate::measures::{BlockRule, MeasureSpec};
use crate::VERSION;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Plain,
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: impl Into<String>, format: OutputFormat) -> Self {
        RunConfig {
            command: command.into(),
            params: BTreeMap::new(),
            seed: None,
            format,
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable parameter"),
        );
        self
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("serializable config");
        let digest = Sha256::digest(json.as_bytes());
        format!("{digest:x}")[..16].to_string()
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidParameter(format!("`{}` is stochastic and needs --seed", self.command)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub n: u64,
    pub statistic: String,
    pub value: f64,
    pub seed_count: u64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub library_version: String,
    pub config: RunConfig,
    pub experiment: String,
    pub verdict: String,
    pub rows: Vec<Row>,
    pub details: Value,
}

struct RowSink<'a> {
    experiment: &'a str,
    hash: String,
    rows: Vec<Row>,
}

impl RowSink<'_> {
    fn push(&mut self, n: u64, statistic: impl Into<String>, value: f64, seed_count: u64) {
        self.rows.push(Row {
            experiment: self.experiment.to_string(),
            n,
            statistic: statistic.into(),
            value,
            seed_count,
            config_hash: self.hash.clone(),
        });
    }
}

impl Report {
    fn assemble(config: &RunConfig, experiment: &str, verdict: String, sink: RowSink<'_>, details: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            library_version: VERSION.to_string(),
            config: config.clone(),
            experiment: experiment.to_string(),
            verdict,
            rows: sink.rows,
            details,
        }
    }

    fn sink<'a>(config: &RunConfig, experiment: &'a str) -> RowSink<'a> {
        RowSink {
            experiment,
            hash: config.hash(),
            rows: vec![],
        }
    }

    pub fn from_trajectory(config: &RunConfig, r: &TrajectoryReport) -> Self {
        let mut sink = Report::sink(config, &r.experiment);
        let seeds = r.seeds.len() as u64;
        for s in &r.summary {
            sink.push(s.n, "median", s.median, seeds);
            sink.push(s.n, "q1", s.q1, seeds);
            sink.push(s.n, "q3", s.q3, seeds);
            sink.push(s.n, "mean", s.mean, seeds);
            sink.push(s.n, "min", s.min, seeds);
            sink.push(s.n, "max", s.max, seeds);
        }
        for e in &r.deviation_events {
            sink.push(e.n, "deviation_event_frequency", e.frequency, seeds);
        }
        let details = serde_json::to_value(r).expect("serializable");
        Report::assemble(config, &r.experiment, r.verdict.to_string(), sink, details)
    }

    pub fn from_telescope(config: &RunConfig, r: &TelescopeReport) -> Self {
        let mut sink = Report::sink(config, "telescope");
        for row in &r.rows {
            let n = 1u64 << row.j;
            sink.push(n, "b_j", row.b_j, 1);
            sink.push(n, "partial_sum", row.partial_sum, 1);
            sink.push(n, "closed_form", row.closed_form, 1);
            sink.push(n, "gauge_sum", row.gauge_sum, 1);
        }
        let details = serde_json::to_value(r).expect("serializable");
        Report::assemble(config, "telescope", r.verdict.to_string(), sink, details)
    }

    /// Several deviation reports of one kind; the verdict is PASS iff all pass.
    pub fn from_deviation(config: &RunConfig, experiment: &str, reports: &[DeviationReport]) -> Self {
        let mut sink = Report::sink(config, experiment);
        for r in reports {
            let tag = match &r.distribution {
                Some(d) => {
                    serde_json::to_value(d).expect("serializable")["kind"]
                        .as_str()
                        .unwrap_or("")
                        .to_string()
                        + ","
                }
                None => String::new(),
            };
            for c in &r.cells {
                sink.push(c.n, format!("frequency[{tag}t={}]", c.t), c.frequency, c.trials);
                sink.push(c.n, format!("bound[{tag}t={}]", c.t), c.bound, c.trials);
                sink.push(c.n, format!("allowance[{tag}t={}]", c.t), c.allowance, c.trials);
            }
        }
        let verdict = combine_checks(reports.iter().map(|r| r.verdict));
        let details = serde_json::to_value(reports).expect("serializable");
        Report::assemble(config, experiment, verdict.to_string(), sink, details)
    }

    pub fn from_cover(config: &RunConfig, r: &CoverReport) -> Self {
        let mut sink = Report::sink(config, "cover");
        for (&n, v) in r.n_grid.iter().zip(&r.log2_sums) {
            sink.push(n, "log2_covering_sum", *v, 0);
        }
        let details = serde_json::to_value(r).expect("serializable");
        Report::assemble(config, "cover", r.verdict.to_string(), sink, details)
    }

    pub fn from_boxdim(config: &RunConfig, r: &BoxDimReport) -> Self {
        let mut sink = Report::sink(config, "boxdim");
        for ((&n, e), a) in r.n_grid.iter().zip(&r.estimates).zip(&r.abs_errors) {
            sink.push(n, "estimate", *e, 0);
            sink.push(n, "abs_error", *a, 0);
        }
        let details = serde_json::to_value(r).expect("serializable");
        Report::assemble(config, "boxdim", r.verdict.to_string(), sink, details)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# mgshift {} schema {}", self.library_version, self.schema_version);
        let _ = writeln!(
            out,
            "# config {}",
            serde_json::to_string(&self.config).expect("serializable")
        );
        let _ = writeln!(out, "# verdict {}", self.verdict);
        out.push_str("experiment,n,statistic,value,seed_count,config_hash\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.experiment,
                r.n,
                csv_field(&r.statistic),
                r.value,
                r.seed_count,
                r.config_hash
            );
        }
        out
    }

    pub fn to_plain(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment {} (mgshift {})", self.experiment, self.library_version);
        let _ = writeln!(out, "config hash {}", self.config.hash());
        let mut last_n = None;
        for r in &self.rows {
            if last_n != Some(r.n) {
                let _ = write!(out, "{}n = {}:", if last_n.is_some() { "\n" } else { "" }, r.n);
                last_n = Some(r.n);
            }
            let _ = write!(out, " {}={:.6}", r.statistic, r.value);
        }
        if last_n.is_some() {
            out.push('\n');
        }
        let _ = writeln!(out, "verdict {}", self.verdict);
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Plain => self.to_plain(),
        }
    }

    /// One-line summary printed after a run.
    pub fn verdict_line(&self) -> String {
        format!("{}: {}", self.experiment, self.verdict)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn combine_checks(it: impl Iterator<Item = CheckVerdict>) -> CheckVerdict {
    let mut any = false;
    for v in it {
        any = true;
        if v == CheckVerdict::Fail {
            return CheckVerdict::Fail;
        }
    }
    if any {
        CheckVerdict::Pass
    } else {
        CheckVerdict::Fail
    }
}

fn from_details<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidParameter(format!("malformed report details: {e}")))
}

/// Parses a JSON report and recomputes its verdict from the raw data in
/// `details` (per-seed series, cells, condensed terms).
pub fn verdict_from_json(json: &str) -> Result<String> {
    let report: Report =
        serde_json::from_str(json).map_err(|e| Error::InvalidParameter(format!("malformed report: {e}")))?;
    let verdict = match report.experiment.as_str() {
        "density" | "lower" => {
            let t: TrajectoryReport = from_details(&report.details)?;
            let medians: Vec<f64> = (0..t.n_grid.len())
                .map(|j| median(&t.series.iter().map(|s| s[j]).collect::<Vec<_>>()))
                .collect();
            let xs: Vec<f64> = t.n_grid.iter().map(|&n| (n as f64).log2()).collect();
            let mut v = theil_sen(&xs, &medians)?.verdict;
            if report.experiment == "lower" {
                let delta = match &t.measure {
                    MeasureSpec::Pdelta { assignment } => match assignment.rule() {
                        BlockRule::Harmonic { delta } => *delta,
                        _ => 0.0,
                    },
                    MeasureSpec::Pmu => 0.0,
                };
                let c = t.gauge.c.unwrap_or(f64::INFINITY);
                if !(c < tau_bits_lower() * delta) {
                    v = TrendVerdict::Inconclusive;
                }
            }
            v.to_string()
        }
        "telescope" => {
            let t: TelescopeReport = from_details(&report.details)?;
            classify_condensed(&t.condensation).to_string()
        }
        "hoeffding" | "ldev2" => {
            let rs: Vec<DeviationReport> = from_details(&report.details)?;
            combine_checks(rs.iter().map(rederive_verdict)).to_string()
        }
        "cover" => {
            let c: CoverReport = from_details(&report.details)?;
            let xs: Vec<f64> = c.n_grid.iter().map(|&n| (n as f64).log2()).collect();
            theil_sen(&xs, &c.log2_sums)?.verdict.to_string()
        }
        "boxdim" => {
            let b: BoxDimReport = from_details(&report.details)?;
            let xs: Vec<f64> = b.n_grid.iter().map(|&n| (n as f64).log2()).collect();
            let errs: Vec<f64> = b.estimates.iter().map(|e| (e - b.reference).abs()).collect();
            theil_sen(&xs, &errs)?.verdict.to_string()
        }
        other => return Err(Error::InvalidParameter(format!("unknown experiment `{other}`"))),
    };
    Ok(verdict)
}
