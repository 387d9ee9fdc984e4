//! `mgshift`: certified constants, measure queries and experiment runs for
//! the multiplicative golden mean shift.
//!
//! Exit codes: 0 success, 1 certification failure, 2 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mgshift::analytics::{
    dim_minkowski, hausdorff_dim, s_f64, solve_p, tau_certify_with, Gauge, IntervalRecord, MonotoneFn, TAU_TERMS,
};
use mgshift::experiments::deviation::{
    default_hoeffding_n_grid, default_hoeffding_t_grid, default_ldev2_n_grid, default_ldev2_t_grid, DEFAULT_TRIALS,
};
use mgshift::experiments::trajectory::default_n_grid;
use mgshift::experiments::{
    box_dimension_series, covering_series, density_trajectory, hoeffding_check, lower_bound_trajectory, seed_list,
    upper_bound_telescoping, zero_count_deviation_check, BoundedDistribution,
};
use mgshift::measures::{chain_breakdown, prefix_logprob, sample_point, BlockAssignment, BlockRule, MeasureSpec};
use mgshift::report::{OutputFormat, Report, RunConfig, SCHEMA_VERSION};
use mgshift::{BinaryWord, Error, VERSION};

#[derive(Parser)]
#[command(
    name = "mgshift",
    version,
    about = "Rigorous numerics for the multiplicative golden mean shift"
)]
struct Cli {
    /// Base seed; required by stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Truncation tolerance for dim_M (default 1e-6; 1e-15 for cover and boxdim).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Plain,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
            Format::Plain => OutputFormat::Plain,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Certified enclosures of p, the Hausdorff dimension and the Minkowski dimension.
    Dims,
    /// Certify tau > 0.
    Tau {
        /// Explicitly summed terms.
        #[arg(long, default_value_t = TAU_TERMS)]
        terms: usize,
    },
    /// log2 probability of a cylinder, with a per-chain breakdown.
    Measure(MeasureArgs),
    /// Sample a typical prefix.
    Sample(SampleArgs),
    /// Run an experiment and persist its report.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("which").required(true).args(["mu", "pmu", "pdelta"])))]
struct MeasureArgs {
    /// Product of mu(R) on every chain.
    #[arg(long, value_name = "R")]
    mu: Option<f64>,
    /// Product of mu(p) on every chain.
    #[arg(long)]
    pmu: bool,
    /// Block product with p_k = p + DELTA/k.
    #[arg(long, value_name = "DELTA")]
    pdelta: Option<f64>,
    /// Word over {0, 1}.
    word: String,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    /// Sample from P_delta instead of P_mu.
    #[arg(long, value_name = "DELTA")]
    pdelta: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Density,
    Lower,
    Telescope,
    Hoeffding,
    Ldev2,
    Cover,
    Boxdim,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Density => "density",
            Kind::Lower => "lower",
            Kind::Telescope => "telescope",
            Kind::Hoeffding => "hoeffding",
            Kind::Ldev2 => "ldev2",
            Kind::Cover => "cover",
            Kind::Boxdim => "boxdim",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GaugeKind {
    PureS,
    Phi,
    PsiTheta,
    PhiGamma,
    PsiG,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistKind {
    All,
    Rademacher,
    Cylinder,
}

#[derive(Args)]
struct ExperimentArgs {
    kind: Kind,
    /// Block perturbation of P_delta (density default 0, lower default 0.05).
    #[arg(long)]
    delta: Option<f64>,
    /// Gauge coefficient (lower default 0.002).
    #[arg(long)]
    c: Option<f64>,
    /// Log exponent of psi_theta (default 1).
    #[arg(long)]
    theta: Option<f64>,
    /// Extra log exponent of phi_gamma (default 0.1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Gauge family for density and cover.
    #[arg(long, value_enum)]
    gauge: Option<GaugeKind>,
    /// Exponent of the gauge (density default s, cover default dim_M).
    #[arg(long)]
    exponent: Option<f64>,
    /// g(t) = t^A for psi_g gauges and the telescoping sum.
    #[arg(long, value_name = "A")]
    g_power: Option<f64>,
    /// Comma-separated prefix lengths.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    /// Comma-separated deviation levels.
    #[arg(long, value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
    /// Number of seeds (seed, seed + 1, ...).
    #[arg(long)]
    seeds: Option<usize>,
    /// Monte Carlo trials per cell (default 100000).
    #[arg(long)]
    trials: Option<u64>,
    /// Deviation-event exponent in (0, 1/2) (default 0.25).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Telescoping runs to n = 2^ELL_MAX (default 20).
    #[arg(long)]
    ell_max: Option<u32>,
    /// Largest prefix length for boxdim.
    #[arg(long)]
    n: Option<u64>,
    /// Step distribution for hoeffding (default all).
    #[arg(long, value_enum)]
    dist: Option<DistKind>,
    /// Cylinder length for the centred cylinder-mass distribution.
    #[arg(long)]
    k: Option<usize>,
}

enum Failure {
    Certification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CertificationFailure(m) => Failure::Certification(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Certification(m)) => {
            eprintln!("certification failure: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let format = OutputFormat::from(cli.format);
    match &cli.command {
        Command::Dims => cmd_dims(cli, format),
        Command::Tau { terms } => cmd_tau(cli, format, *terms),
        Command::Measure(m) => cmd_measure(cli, format, m),
        Command::Sample(s) => cmd_sample(cli, format, s),
        Command::Experiment(e) => cmd_experiment(cli, format, e),
    }
}

/// Writes `body` to `--out` (then prints `summary`) or to stdout.
fn emit(cli: &Cli, body: &str, summary: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => {
            print!("{body}");
            if !summary.is_empty() {
                eprintln!("{summary}");
            }
        }
    }
    Ok(())
}

fn envelope(config: &RunConfig, fields: Value) -> String {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "library_version": VERSION,
        "config": config,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, fields) {
        dst.extend(src);
    }
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn csv_header(config: &RunConfig) -> String {
    format!(
        "# mgshift {VERSION} schema {SCHEMA_VERSION}\n# config {}\n",
        serde_json::to_string(config).expect("serializable")
    )
}

fn tolerance(cli: &Cli) -> CliResult<f64> {
    let tol = cli.tol.unwrap_or(1e-6);
    if tol > 0.0 {
        Ok(tol)
    } else {
        Err(usage(format!("--tol must be positive, got {tol}")))
    }
}

fn cmd_dims(cli: &Cli, format: OutputFormat) -> CliResult<()> {
    let tol = tolerance(cli)?;
    let config = RunConfig::new("dims", format).with("tol", tol);
    let p = solve_p();
    let s = hausdorff_dim();
    let dm = dim_minkowski(tol)?;
    let dm_iv = dm.enclosure.clone().expect("enclosure is always produced");
    if !s.certainly_lt(&dm_iv) {
        return Err(Failure::Certification("dim_H < dim_M could not be certified".into()));
    }
    let rows = [
        ("p", IntervalRecord::from(&p)),
        ("s", IntervalRecord::from(&s)),
        ("dim_m", IntervalRecord::from(&dm_iv)),
    ];
    let body = match format {
        OutputFormat::Json => envelope(
            &config,
            json!({
                "p": rows[0].1,
                "s": rows[1].1,
                "dim_m": rows[2].1,
                "dim_m_value": dm.value,
                "dim_m_tail_bound": dm.tail_bound,
                "dim_m_terms": dm.terms,
                "hausdorff_below_minkowski": true,
            }),
        ),
        OutputFormat::Csv => {
            let mut out = csv_header(&config);
            out.push_str("quantity,lo,hi,lo_approx,hi_approx,width\n");
            for (name, r) in &rows {
                let _ = writeln!(
                    out,
                    "{name},{},{},{},{},{}",
                    r.lo, r.hi, r.lo_approx, r.hi_approx, r.width
                );
            }
            out
        }
        OutputFormat::Plain => {
            let mut out = String::new();
            for (name, r) in &rows {
                let _ = writeln!(
                    out,
                    "{name:<6} in [{:.12}, {:.12}]  width {:.3e}",
                    r.lo_approx, r.hi_approx, r.width
                );
            }
            let _ = writeln!(
                out,
                "dim_m  ~ {:.10} ({} terms, tail <= {:.3e})",
                dm.value, dm.terms, dm.tail_bound
            );
            out.push_str("s < dim_m CERTIFIED\n");
            out
        }
    };
    emit(cli, &body, "")
}

fn cmd_tau(cli: &Cli, format: OutputFormat, terms: usize) -> CliResult<()> {
    let config = RunConfig::new("tau", format).with("terms", terms);
    let cert = tau_certify_with(terms)?;
    let rec = cert.record();
    let margin = cert.lower_bound_f64();
    let bits = margin / std::f64::consts::LN_2;
    let body = match format {
        OutputFormat::Json => envelope(
            &config,
            json!({ "tau": rec, "verdict": "POSITIVE", "margin_bits": bits }),
        ),
        OutputFormat::Csv => {
            let mut out = csv_header(&config);
            out.push_str("quantity,lo,hi,lo_approx,hi_approx,width\n");
            for (name, r) in [("partial", &rec.partial), ("tail_bound", &rec.tail_bound)] {
                let _ = writeln!(
                    out,
                    "{name},{},{},{},{},{}",
                    r.lo, r.hi, r.lo_approx, r.hi_approx, r.width
                );
            }
            let _ = writeln!(out, "lower_bound,{},,{},,", rec.lower_bound, rec.lower_bound_approx);
            out
        }
        OutputFormat::Plain => format!(
            "partial sum k <= {terms} (nats): [{:.9}, {:.9}]\n\
             tail bound k > {terms}: {:.9}\n\
             certified lower bound: {:.9} ({:.9} in bits)\n\
             tau > 0 CERTIFIED (margin {:.6})\n",
            rec.partial.lo_approx, rec.partial.hi_approx, rec.tail_bound.hi_approx, margin, bits, margin
        ),
    };
    emit(cli, &body, "")
}

fn cmd_measure(cli: &Cli, format: OutputFormat, m: &MeasureArgs) -> CliResult<()> {
    let word: BinaryWord = m.word.parse()?;
    let (label, assign) = if let Some(r) = m.mu {
        (format!("mu({r})"), BlockAssignment::new(BlockRule::Constant { r })?)
    } else if let Some(d) = m.pdelta {
        (format!("P_delta({d})"), BlockAssignment::harmonic(d)?)
    } else {
        ("P_mu".to_string(), BlockAssignment::uniform())
    };
    let config = RunConfig::new("measure", format)
        .with("measure", &label)
        .with("word", word.to_string());
    let lp = prefix_logprob(&assign, &word);
    let terms = chain_breakdown(&assign, &word);
    let shown = |v: mgshift::measures::LogProb| -> Value {
        if v.is_zero() {
            json!("ZERO")
        } else {
            json!(v.value())
        }
    };
    let body = match format {
        OutputFormat::Json => envelope(
            &config,
            json!({
                "log2_probability": shown(lp),
                "chains": terms.iter().map(|t| json!({
                    "chain": t.chain,
                    "restriction": t.restriction.to_string(),
                    "block": t.block,
                    "parameter": t.parameter,
                    "log2_probability": shown(t.logprob),
                })).collect::<Vec<_>>(),
            }),
        ),
        OutputFormat::Csv => {
            let mut out = csv_header(&config);
            out.push_str("chain,restriction,block,parameter,log2_probability\n");
            for t in &terms {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    t.chain, t.restriction, t.block, t.parameter, t.logprob
                );
            }
            let _ = writeln!(out, "total,{},,,{}", word, lp);
            out
        }
        OutputFormat::Plain => {
            let mut out = format!("{label} [{word}]: log2 P = {lp}\n");
            out.push_str("chain  restriction  block  parameter  log2 factor\n");
            for t in &terms {
                let _ = writeln!(
                    out,
                    "{:<6} {:<12} {:<6} {:<10.8} {}",
                    t.chain,
                    t.restriction.to_string(),
                    t.block,
                    t.parameter,
                    t.logprob
                );
            }
            out
        }
    };
    emit(cli, &body, "")
}

fn cmd_sample(cli: &Cli, format: OutputFormat, s: &SampleArgs) -> CliResult<()> {
    let measure = match s.pdelta {
        Some(d) => MeasureSpec::pdelta(d)?,
        None => MeasureSpec::Pmu,
    };
    let mut config = RunConfig::new("sample", format)
        .with("n", s.n)
        .with("measure", &measure);
    config.seed = cli.seed;
    let seed = config.require_seed()?;
    let point = sample_point(&measure, s.n, seed)?;
    let lp = prefix_logprob(&measure.assignment(), &point.word);
    let body = match format {
        OutputFormat::Json => envelope(
            &config,
            json!({ "word": point.word, "zeros": point.word.count_zeros(), "log2_probability": lp.value() }),
        ),
        OutputFormat::Csv => format!(
            "{}n,zeros,log2_probability,word\n{},{},{},{}\n",
            csv_header(&config),
            s.n,
            point.word.count_zeros(),
            lp,
            point.word
        ),
        OutputFormat::Plain => format!("{}\n", point.word),
    };
    emit(cli, &body, "")
}

/// dim_M reference for cover and boxdim; tighter than the `dims` default.
fn reference_dimension(cli: &Cli) -> CliResult<f64> {
    let tol = match cli.tol {
        Some(_) => tolerance(cli)?,
        None => 1e-15,
    };
    Ok(dim_minkowski(tol)?.value)
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn gauge_from(e: &ExperimentArgs, default: GaugeKind, default_exponent: f64) -> CliResult<(Gauge, RunConfig)> {
    let kind = e.gauge.unwrap_or(default);
    let s = e.exponent.unwrap_or(default_exponent);
    let cfg = RunConfig::new("", OutputFormat::Plain).with("exponent", s);
    let (g, cfg) = match kind {
        GaugeKind::PureS => (Gauge::PureS { s }, cfg.with("gauge", "pure_s")),
        GaugeKind::Phi => {
            let c = positive("c", e.c.unwrap_or(0.002))?;
            (Gauge::Phi { s, c }, cfg.with("gauge", "phi").with("c", c))
        }
        GaugeKind::PsiTheta => {
            let theta = e.theta.unwrap_or(1.0);
            (
                Gauge::PsiTheta { s, theta },
                cfg.with("gauge", "psi_theta").with("theta", theta),
            )
        }
        GaugeKind::PhiGamma => {
            let c = positive("c", e.c.unwrap_or(0.002))?;
            let gamma = positive("gamma", e.gamma.unwrap_or(0.1))?;
            (
                Gauge::PhiGamma { s, c, gamma },
                cfg.with("gauge", "phi_gamma").with("c", c).with("gamma", gamma),
            )
        }
        GaugeKind::PsiG => {
            let a = positive("g-power", e.g_power.unwrap_or(1.0))?;
            (
                Gauge::PsiG {
                    s,
                    g: MonotoneFn::power(a),
                },
                cfg.with("gauge", "psi_g").with("g_power", a),
            )
        }
    };
    Ok((g, cfg))
}

fn cmd_experiment(cli: &Cli, format: OutputFormat, e: &ExperimentArgs) -> CliResult<()> {
    let kind = e.kind;
    let mut config = RunConfig::new(format!("experiment {}", kind.name()), format);
    config.seed = cli.seed;
    let seeds = |config: &RunConfig| -> CliResult<Vec<u64>> {
        let count = e.seeds.unwrap_or(100);
        if count == 0 {
            return Err(usage("--seeds must be at least 1"));
        }
        Ok(seed_list(config.require_seed()?, count))
    };
    let trials = e.trials.unwrap_or(DEFAULT_TRIALS);
    let report = match kind {
        Kind::Density => {
            let delta = e.delta.unwrap_or(0.0);
            let measure = MeasureSpec::pdelta(delta)?;
            let (gauge, gcfg) = gauge_from(e, GaugeKind::PsiTheta, s_f64())?;
            let n_grid = e.n_grid.clone().unwrap_or_else(default_n_grid);
            let seeds = seeds(&config)?;
            config.params.extend(gcfg.params);
            config = config
                .with("delta", delta)
                .with("n_grid", &n_grid)
                .with("seeds", seeds.len());
            Report::from_trajectory(&config, &density_trajectory(&measure, &gauge, &n_grid, &seeds)?)
        }
        Kind::Lower => {
            let delta = e.delta.unwrap_or(0.05);
            let c = e.c.unwrap_or(0.002);
            let eps = e.epsilon.unwrap_or(0.25);
            let n_grid = e.n_grid.clone().unwrap_or_else(default_n_grid);
            let seeds = seeds(&config)?;
            config = config
                .with("delta", delta)
                .with("c", c)
                .with("epsilon", eps)
                .with("n_grid", &n_grid)
                .with("seeds", seeds.len());
            Report::from_trajectory(&config, &lower_bound_trajectory(delta, c, &n_grid, &seeds, eps)?)
        }
        Kind::Telescope => {
            let a = positive("g-power", e.g_power.unwrap_or(1.0))?;
            let ell = e.ell_max.unwrap_or(20);
            let seed = config.require_seed()?;
            config = config.with("g_power", a).with("ell_max", ell);
            Report::from_telescope(&config, &upper_bound_telescoping(&MonotoneFn::power(a), ell, seed)?)
        }
        Kind::Hoeffding => {
            let t_grid = e.t_grid.clone().unwrap_or_else(default_hoeffding_t_grid);
            let n_grid = e.n_grid.clone().unwrap_or_else(default_hoeffding_n_grid);
            let k = e.k.unwrap_or(4);
            let dists = match e.dist.unwrap_or(DistKind::All) {
                DistKind::All => vec![
                    BoundedDistribution::Rademacher,
                    BoundedDistribution::CenteredCylinderLog { k },
                ],
                DistKind::Rademacher => vec![BoundedDistribution::Rademacher],
                DistKind::Cylinder => vec![BoundedDistribution::CenteredCylinderLog { k }],
            };
            let seed = config.require_seed()?;
            config = config
                .with("t_grid", &t_grid)
                .with("n_grid", &n_grid)
                .with("trials", trials)
                .with("distributions", &dists);
            let reports = dists
                .iter()
                .enumerate()
                .map(|(i, d)| hoeffding_check(d, &t_grid, &n_grid, trials, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>, _>>()?;
            Report::from_deviation(&config, "hoeffding", &reports)
        }
        Kind::Ldev2 => {
            let t_grid = e.t_grid.clone().unwrap_or_else(default_ldev2_t_grid);
            let n_grid = e.n_grid.clone().unwrap_or_else(default_ldev2_n_grid);
            let seed = config.require_seed()?;
            config = config
                .with("t_grid", &t_grid)
                .with("n_grid", &n_grid)
                .with("trials", trials);
            let r = zero_count_deviation_check(&t_grid, &n_grid, trials, seed)?;
            Report::from_deviation(&config, "ldev2", &[r])
        }
        Kind::Cover => {
            let dm = reference_dimension(cli)?;
            let (gauge, gcfg) = gauge_from(e, GaugeKind::PureS, dm)?;
            let n_grid = e.n_grid.clone().unwrap_or_else(default_n_grid);
            config.params.extend(gcfg.params);
            config = config.with("n_grid", &n_grid);
            Report::from_cover(&config, &covering_series(&gauge, &n_grid)?)
        }
        Kind::Boxdim => {
            let n = e.n.unwrap_or(1 << 16);
            if n < 8 {
                return Err(usage("--n must be at least 8"));
            }
            let mut n_grid: Vec<u64> = (1..64).map(|j| 1u64 << j).take_while(|&m| m < n).collect();
            n_grid.push(n);
            let dm = reference_dimension(cli)?;
            config = config.with("n", n).with("reference", dm);
            let r = box_dimension_series(&n_grid, dm)?;
            let mut report = Report::from_boxdim(&config, &r);
            report.verdict = format!(
                "{} (estimate {:.6} at n = {n})",
                report.verdict,
                r.estimates.last().unwrap()
            );
            report
        }
    };
    emit(cli, &report.render(format), &report.verdict_line())
}
