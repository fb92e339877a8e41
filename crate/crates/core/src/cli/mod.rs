//! The `roy-detect` command line: CDF grids, ROC profiles, high-dimensional
//! power tables, Monte Carlo sample dumps and the validation suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric or I/O failure,
//! 3 validation failure.

mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::asymptotic::{asymptotic_power_with, edge_params, spike_params, HighDimParams, SpikeRegime, Tw2Table};
use crate::detector::{default_pf_grid, log_pf_grid, roc_closed_form_nm, roc_curve, DetectorConfig};
use crate::error::Error;
use crate::fdist::{central_lmax_cdf, effective_dims, noncentral_lmax_cdf, ModelDims};
use crate::montecarlo::{empirical_cdf, RngSpec, Statistic};
use crate::specfun::SeriesControl;
use crate::validate::run_validation;

pub use output::{Cell, OutputRecord, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "roy-detect", version, about = "Largest-root detection with complex F-matrices")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the CDF of λ_max(S⁻¹R) on a t-grid.
    Cdf(CdfArgs),
    /// ROC profile P_D(P_F) of the largest-root detector.
    Roc(RocArgs),
    /// High-dimensional edge, spike and power parameters per m.
    Asymptotic(AsymptoticArgs),
    /// Monte Carlo sample dump, optionally with a KS distance to the exact CDF.
    Simulate(SimulateArgs),
    /// Run the bundled cross-check suite.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Spacing {
    Linear,
    Log,
}

#[derive(Args, Debug)]
struct DimArgs {
    /// Dimension m of the observation vectors.
    #[arg(long)]
    m: usize,
    /// Noise-only sample count n (S ~ CW_m(n, I)).
    #[arg(long)]
    n: usize,
    /// Signal-bearing sample count p (R ~ CW_m(p, I, Ω)).
    #[arg(long)]
    p: usize,
}

#[derive(Args, Debug)]
struct CdfArgs {
    #[command(flatten)]
    dims: DimArgs,
    /// Non-centrality θ; absent means the central CDF.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    t_min: f64,
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RocArgs {
    #[command(flatten)]
    dims: DimArgs,
    /// Signal strength γ.
    #[arg(long)]
    gamma: f64,
    /// `default` (0.01..0.99), `lin:LO:HI:N`, `log:LO:HI:N`, or a comma list.
    #[arg(long, default_value = "default")]
    pf_grid: String,
    /// Use the explicit n = m formula instead of threshold inversion.
    #[arg(long)]
    closed_form: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct AsymptoticArgs {
    #[arg(long)]
    c1: f64,
    #[arg(long)]
    c2: f64,
    #[arg(long)]
    gamma_bar: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Comma-separated sensor counts.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
    m_list: Vec<usize>,
    /// Alternative TW₂ table file.
    #[arg(long)]
    tw2_table: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Raw,
    Rescaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KsAgainst {
    Analytic,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    dims: DimArgs,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, value_enum, default_value_t = Which::Raw)]
    which: Which,
    #[arg(long, value_enum)]
    ks_against: Option<KsAgainst>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Alternative TW₂ table file.
    #[arg(long)]
    tw2_table: Option<PathBuf>,
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERIC, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_)
            | Error::InvalidDims(_)
            | Error::Domain(_)
            | Error::ClosedFormUnavailable { .. }
            | Error::SubcriticalRequest { .. }
            | Error::TableFormat(_) => EXIT_USAGE,
            Error::NonConvergence { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NumericalBreakdown { .. }
            | Error::BracketFailure { .. } => EXIT_NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn model_dims(d: &DimArgs) -> CliResult<ModelDims> {
    Ok(ModelDims::new(d.m, d.n, d.p)?)
}

fn emit(rec: &OutputRecord, out_args: &OutputArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match out_args.format {
        Format::Csv => rec.to_csv(),
        Format::Json => rec.to_json(),
    };
    match &out_args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::numeric(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::numeric(format!("cannot write output: {e}"))),
    }
}

fn grid(lo: f64, hi: f64, points: usize, spacing: Spacing) -> CliResult<Vec<f64>> {
    if points < 2 {
        return Err(CliError::usage("--points must be at least 2"));
    }
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::usage(format!("need 0 <= t-min < t-max (got {lo}, {hi})")));
    }
    let step = |k: usize| k as f64 / (points - 1) as f64;
    Ok(match spacing {
        Spacing::Linear => (0..points).map(|k| lo + (hi - lo) * step(k)).collect(),
        Spacing::Log => {
            if lo <= 0.0 {
                return Err(CliError::usage("log spacing needs t-min > 0"));
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..points).map(|k| if k + 1 == points { hi } else { (a + (b - a) * step(k)).exp() }).collect()
        }
    })
}

fn cmd_cdf(a: &CdfArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let d = model_dims(&a.dims)?;
    let theta = a.theta.filter(|&th| th != 0.0);
    if let Some(th) = theta {
        if !(th > 0.0 && th.is_finite()) {
            return Err(CliError::usage(format!("--theta must be finite and >= 0, got {th}")));
        }
    }
    let ts = grid(a.t_min, a.t_max, a.points, a.spacing)?;
    let ctl = SeriesControl::default();
    let values: Vec<CliResult<f64>> = ts
        .par_iter()
        .map(|&t| {
            let v = match theta {
                None => central_lmax_cdf(&d, t),
                Some(th) => noncentral_lmax_cdf(&d, th, t, &ctl),
            };
            v.map_err(|e| {
                let mut err = CliError::from(e);
                err.message = format!("at t = {t}: {}", err.message);
                err
            })
        })
        .collect();
    let mut p = vec![
        ("m", d.m.to_string()),
        ("n", d.n.to_string()),
        ("p", d.p.to_string()),
        ("t_min", fmt_f64(a.t_min)),
        ("t_max", fmt_f64(a.t_max)),
        ("points", a.points.to_string()),
        ("spacing", format!("{:?}", a.spacing).to_lowercase()),
    ];
    if let Some(th) = a.theta {
        p.push(("theta", fmt_f64(th)));
    }
    let mut rec = OutputRecord::new("cdf", params(&p), &["t", "cdf"]);
    for (t, v) in ts.iter().zip(values) {
        rec.rows.push(vec![Cell::from(*t), Cell::from(v?)]);
    }
    emit(&rec, &a.output, stdout)
}

fn parse_pf_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::usage(format!("cannot parse --pf-grid '{spec}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let g = if spec == "default" {
        default_pf_grid()
    } else if let Some(rest) = spec.strip_prefix("lin:").or_else(|| spec.strip_prefix("log:")) {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if spec.starts_with("log:") {
            log_pf_grid(lo, hi, n)?
        } else {
            if n < 2 {
                return Err(bad());
            }
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        }
    } else {
        spec.split(',').map(num).collect::<CliResult<Vec<f64>>>()?
    };
    if g.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Err(CliError::usage("false-alarm grid values must lie in (0, 1)"));
    }
    Ok(g)
}

fn cmd_roc(a: &RocArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let d = model_dims(&a.dims)?;
    let cfg = DetectorConfig::new(d, a.gamma)?;
    let pf = parse_pf_grid(&a.pf_grid)?;
    let mut rec = OutputRecord::new(
        "roc",
        params(&[
            ("m", d.m.to_string()),
            ("n", d.n.to_string()),
            ("p", d.p.to_string()),
            ("gamma", fmt_f64(a.gamma)),
            ("pf_grid", a.pf_grid.clone()),
            ("closed_form", a.closed_form.to_string()),
        ]),
        &["pf", "pd", "threshold"],
    );
    if a.closed_form {
        if d.n != d.m {
            return Err(Error::ClosedFormUnavailable { m: d.m, n: d.n }.into());
        }
        let e = effective_dims(&d)?;
        let ctl = SeriesControl::default();
        let rows: Vec<CliResult<Vec<Cell>>> = pf
            .par_iter()
            .map(|&f| {
                let pd = roc_closed_form_nm(d.m, d.p, a.gamma, f, &ctl)?;
                // P_F = 1 − x^{mp}, so x = (1 − P_F)^{1/(mp)}, t = x/(1 − x), ξ = t/κ.
                let x = (1.0 - f).powf(1.0 / (e.m * e.p) as f64);
                let threshold = x / (1.0 - x) / d.kappa();
                Ok(vec![Cell::from(f), Cell::from(pd), Cell::from(threshold)])
            })
            .collect();
        for r in rows {
            rec.rows.push(r?);
        }
    } else {
        for pt in roc_curve(&cfg, &pf)? {
            rec.rows.push(vec![Cell::from(pt.pf), Cell::from(pt.pd), Cell::from(pt.threshold)]);
        }
    }
    emit(&rec, &a.output, stdout)
}

fn load_table(path: &Option<PathBuf>) -> CliResult<std::borrow::Cow<'static, Tw2Table>> {
    Ok(match path {
        Some(p) => std::borrow::Cow::Owned(Tw2Table::from_path(p)?),
        None => std::borrow::Cow::Borrowed(Tw2Table::bundled()),
    })
}

fn cmd_asymptotic(a: &AsymptoticArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let h = HighDimParams::new(a.c1, a.c2, a.gamma_bar)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    if a.m_list.is_empty() || a.m_list.contains(&0) {
        return Err(CliError::usage("--m-list needs positive integers"));
    }
    let table = load_table(&a.tw2_table)?;
    let e = edge_params(&h)?;
    let s = spike_params(&h)?;
    let m_list: Vec<String> = a.m_list.iter().map(usize::to_string).collect();
    let mut p = vec![
        ("c1", fmt_f64(a.c1)),
        ("c2", fmt_f64(a.c2)),
        ("gamma_bar", fmt_f64(a.gamma_bar)),
        ("alpha", fmt_f64(a.alpha)),
        ("m_list", m_list.join(";")),
    ];
    if let Some(path) = &a.tw2_table {
        p.push(("tw2_table", path.display().to_string()));
    }
    let mut rec = OutputRecord::new(
        "asymptotic",
        params(&p),
        &["m", "mu", "sigma0", "gamma_p", "regime", "nu", "sigma1", "pd"],
    );
    for &m in &a.m_list {
        let (regime, nu, sigma1, pd) = match s.regime {
            SpikeRegime::Supercritical => (
                "Supercritical",
                Cell::from(s.nu()?),
                Cell::from(s.sigma1()?),
                Cell::from(asymptotic_power_with(&h, m, a.alpha, &table)?),
            ),
            SpikeRegime::Subcritical => ("Subcritical", Cell::Empty, Cell::Empty, Cell::Empty),
        };
        rec.rows.push(vec![
            Cell::from(m),
            Cell::from(e.mu),
            Cell::from(e.sigma0),
            Cell::from(e.gamma_p),
            Cell::from(regime),
            nu,
            sigma1,
            pd,
        ]);
    }
    emit(&rec, &a.output, stdout)
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let d = model_dims(&a.dims)?;
    if a.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    if !(a.theta >= 0.0 && a.theta.is_finite()) {
        return Err(CliError::usage(format!("--theta must be finite and >= 0, got {}", a.theta)));
    }
    let which = match a.which {
        Which::Raw => Statistic::Raw,
        Which::Rescaled => Statistic::Rescaled,
    };
    let spec = RngSpec::new(a.seed, a.stream);
    let e = empirical_cdf(&d, a.theta, a.trials, &spec, which)?;
    let mut p = vec![
        ("m", d.m.to_string()),
        ("n", d.n.to_string()),
        ("p", d.p.to_string()),
        ("theta", fmt_f64(a.theta)),
        ("trials", a.trials.to_string()),
        ("seed", a.seed.to_string()),
        ("stream", a.stream.to_string()),
        ("which", format!("{:?}", a.which).to_lowercase()),
    ];
    if a.ks_against.is_some() {
        p.push(("ks_against", "analytic".into()));
    }
    let column = match which {
        Statistic::Raw => "lambda_max",
        Statistic::Rescaled => "lambda_hat_max",
    };
    let mut rec = OutputRecord::new("simulate", params(&p), &[column]);
    if a.ks_against.is_some() {
        // λ̂ = λ/κ, so P(λ̂ ≤ s) = F(κ s).
        let scale = if which == Statistic::Rescaled { d.kappa() } else { 1.0 };
        let ctl = SeriesControl::default();
        let cdf: Vec<CliResult<f64>> = e
            .samples()
            .par_iter()
            .map(|&v| {
                let t = scale * v;
                let r = if a.theta == 0.0 {
                    central_lmax_cdf(&d, t)
                } else {
                    noncentral_lmax_cdf(&d, a.theta, t, &ctl)
                };
                r.map_err(|err| {
                    let mut c = CliError::from(err);
                    c.message = format!("at t = {t}: {}", c.message);
                    c
                })
            })
            .collect();
        let cdf = cdf.into_iter().collect::<CliResult<Vec<f64>>>()?;
        let ks = e.ks_from_values(&cdf);
        rec.summary.insert("ks_distance".into(), format!("{ks:.16e}"));
        rec.summary
            .insert("ks_bound_1pct".into(), format!("{:.16e}", 1.63 / (a.trials as f64).sqrt()));
    }
    for v in e.samples() {
        rec.rows.push(vec![Cell::from(*v)]);
    }
    emit(&rec, &a.output, stdout)
}

fn cmd_validate(a: &ValidateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let table = match load_table(&a.tw2_table) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stdout, "[FAIL] tw2-calibration: {}", e.message);
            return Err(CliError { code: EXIT_VALIDATION, message: "validation failed".into() });
        }
    };
    let report = run_validation(&table);
    let _ = writeln!(stdout, "{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError { code: EXIT_VALIDATION, message: "validation failed".into() })
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Cdf(a) => cmd_cdf(a, stdout),
        Command::Roc(a) => cmd_roc(a, stdout),
        Command::Asymptotic(a) => cmd_asymptotic(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Validate(a) => cmd_validate(a, stdout),
    }
}

/// Parses `args` (program name first) and runs the command, returning the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buf)),
            Err(e) => Err(CliError::numeric(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli, &mut buf),
    };
    let written = stdout.write_all(&buf);
    let result = result.and(written.map_err(|e| CliError::numeric(format!("cannot write output: {e}"))));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
