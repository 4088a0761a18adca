//! Command-line front end for the `tardos` crate.
//!
//! [`Cli`] is the parsed argument tree; [`run`] executes it. Single objects
//! are emitted as JSON, tables as CSV. Files are written through a temporary
//! file in the target directory and renamed into place, so a failed command
//! never leaves a partial output behind.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use tardos::codec::{from_bytes, to_bytes, Generator};
use tardos::montecarlo::{
    appendix_b_oracle, campaign_row_on, innocent_moment_oracle, trace, CampaignRow, ParamSource, TrialConfig,
};
use tardos::params::{
    asymptotic_params, check_constraints, gamma, integral_adjust, optimize, optimize_generic, sweep, AsymptoticParams,
    ConstraintSlack, ParamSet, SchemeContext, SchemeParams,
};
use tardos::{forge, verify_marking, BitVector, Strategy, Variant};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "TARDOS_THREADS";

/// Tolerance on the innocent-score moments checked by `verify`.
pub const MOMENT_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "tardos", version, about = "Symmetric Tardos fingerprinting codes")]
pub struct Cli {
    /// Worker threads (default: TARDOS_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal-codelength parameters for a coalition bound.
    Optimize(OptimizeArgs),
    /// Optimal d_ell over a grid of coalition bounds and eta values (CSV).
    Sweep(SweepArgs),
    /// Draw a codebook and write it in binary form.
    Generate(GenerateArgs),
    /// Forge a pirate copy from a coalition's codewords.
    Attack(AttackArgs),
    /// Score every user against a forgery and report the accused.
    Trace(TraceArgs),
    /// Monte Carlo campaign over variants and strategies (CSV).
    Simulate(SimulateArgs),
    /// Check the quadrature identities behind the score analysis.
    Verify(VerifyArgs),
    /// Large-c closed-form parameters.
    Asymptotic(AsymptoticArgs),
}

/// Error targets. Either `--eta` or `--eps2` (with `--eps1` and `--n`) fixes eta.
#[derive(Debug, Clone, Args)]
pub struct ErrorTargets {
    #[arg(long)]
    pub eta: Option<f64>,
    /// Soundness error: chance of accusing any innocent user.
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Completeness error: chance of accusing no colluder.
    #[arg(long)]
    pub eps2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Largest coalition the code must withstand.
    #[arg(long)]
    pub c: u64,
    /// Number of users; with --eps1 this also derives the concrete scheme.
    #[arg(long)]
    pub n: Option<u64>,
    #[command(flatten)]
    pub targets: ErrorTargets,
    #[arg(long, default_value = "symmetric")]
    pub variant: Variant,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Explicit coalition bounds; overrides the log-spaced range.
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    pub c_min: u64,
    #[arg(long, default_value_t = 1000)]
    pub c_max: u64,
    /// Number of log-spaced points between --c-min and --c-max.
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.2,0.1,0.01")]
    pub eta: Vec<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scheme parameters: an `optimize` report or a bare scheme object (JSON).
    #[arg(long, conflicts_with_all = ["c", "ell"])]
    pub params: Option<PathBuf>,
    /// Derive the scheme by optimizing for this coalition bound.
    #[arg(long, conflicts_with = "ell")]
    pub c: Option<u64>,
    #[command(flatten)]
    pub targets: ErrorTargets,
    #[arg(long, default_value = "symmetric")]
    pub variant: Variant,
    /// Raw codelength, bypassing the parameter derivation (needs --delta).
    #[arg(long, requires = "delta")]
    pub ell: Option<u64>,
    #[arg(long, requires = "ell")]
    pub delta: Option<f64>,
    /// Also write the derived scheme as JSON here.
    #[arg(long)]
    pub scheme_out: Option<PathBuf>,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    /// Colluding user indices.
    #[arg(long, value_delimiter = ',', required = true)]
    pub coalition: Vec<usize>,
    #[arg(long)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coalition bound the code was built for; recorded in the sidecar.
    #[arg(long)]
    pub c: Option<u64>,
    /// Forgery as one line of ASCII bits; metadata goes to `<output>.json`.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    /// File holding the forgery as ASCII bits.
    #[arg(long)]
    pub forgery: PathBuf,
    #[arg(long, required_unless_present = "params", conflicts_with = "params")]
    pub z: Option<f64>,
    /// Take the threshold and score variant from a scheme or `optimize` report.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Score variant when --z is given.
    #[arg(long, default_value = "symmetric")]
    pub variant: Variant,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub c: u64,
    #[arg(long, default_value_t = 0.1)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.1, conflicts_with = "eta")]
    pub eps2: f64,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Score variants to run (default: both).
    #[arg(long = "variant", value_delimiter = ',')]
    pub variants: Vec<Variant>,
    /// Strategies to run (default: all six).
    #[arg(long = "strategy", value_delimiter = ',')]
    pub strategies: Vec<Strategy>,
    /// Colluders per trial; defaults to --c.
    #[arg(long)]
    pub coalition_size: Option<usize>,
    /// Reuse one codebook across all trials of a row.
    #[arg(long)]
    pub shared_codebook: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    #[arg(long)]
    pub c: u64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent flags; exit code 2.
    Usage(String),
    /// The computation itself failed; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tardos::Error> for CliError {
    fn from(e: tardos::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failure(msg: impl Into<String>) -> CliError {
    CliError::Failure(msg.into())
}

/// Thread count from the flag, else [`THREADS_ENV`], else `None` (all cores).
pub fn thread_count(flag: Option<usize>, env: Option<&str>) -> CliResult<Option<usize>> {
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
        (None, None) => return Ok(None),
    };
    if n == 0 {
        return Err(usage("thread count must be at least 1"));
    }
    Ok(Some(n))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let env = std::env::var(THREADS_ENV).ok();
    let threads = thread_count(cli.threads, env.as_deref())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| failure(e.to_string()))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Optimize(a) => cmd_optimize(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Asymptotic(a) => cmd_asymptotic(a),
    }
}

/// Writes `bytes` to `path` by way of a temporary sibling file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(p, bytes).map_err(|e| failure(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value).map_err(|e| failure(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| failure(e.to_string()))?;
    }
    w.into_inner().map_err(|e| failure(e.to_string()))
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| failure(format!("{}: {e}", path.display())))
}

fn check_unit(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--{name} must lie in (0, 1), got {v}")))
    }
}

fn check_c(c: u64) -> CliResult<()> {
    if c >= 2 {
        Ok(())
    } else {
        Err(usage(format!("--c must be at least 2, got {c}")))
    }
}

fn check_eta(eta: f64) -> CliResult<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--eta must lie in (0, 1], got {eta}")))
    }
}

impl ErrorTargets {
    fn validate(&self, n: Option<u64>) -> CliResult<()> {
        if let Some(e) = self.eta {
            check_eta(e)?;
        }
        for (name, v) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if let Some(v) = v {
                check_unit(name, v)?;
            }
        }
        if self.eps2.is_some() && (self.eps1.is_none() || n.is_none()) {
            return Err(usage("--eps2 needs --eps1 and --n to derive eta"));
        }
        if self.eta.is_none() && self.eps2.is_none() {
            return Err(usage("give --eta or --eps2"));
        }
        if let Some(n) = n {
            if n < 2 {
                return Err(usage(format!("--n must be at least 2, got {n}")));
            }
        }
        Ok(())
    }

    /// Full context when `n` and `eps1` are known.
    fn context(&self, n: Option<u64>, c: u64) -> CliResult<Option<SchemeContext<f64>>> {
        match (n, self.eps1) {
            (Some(n), Some(eps1)) => Ok(Some(SchemeContext::resolve(n, c, eps1, self.eps2, self.eta)?)),
            _ => Ok(None),
        }
    }
}

fn optimize_for(c: u64, eta: f64, variant: Variant) -> CliResult<ParamSet<f64>> {
    Ok(match variant {
        Variant::Symmetric => optimize(c, eta)?,
        Variant::Asymmetric => optimize_generic(c, eta, variant)?,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub c: u64,
    pub eta: f64,
    pub variant: Variant,
    pub params: ParamSet<f64>,
    pub slack: ConstraintSlack<f64>,
    /// Present when `n` and `eps1` were given.
    pub scheme: Option<SchemeReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeReport {
    /// Integral-length scheme; `ell0`, `z0` and `delta` are the unrounded derivation.
    #[serde(flatten)]
    pub params: SchemeParams<f64>,
    pub alpha: f64,
    pub beta: f64,
    /// Slacks of the septuple describing the rounded scheme.
    pub adjusted_slack: ConstraintSlack<f64>,
}

/// Optimizes and, when the context is complete, derives the integral scheme.
pub fn optimize_report(c: u64, n: Option<u64>, targets: &ErrorTargets, variant: Variant) -> CliResult<OptimizeReport> {
    let ctx = targets.context(n, c)?;
    let eta = match (&ctx, targets.eta) {
        (Some(ctx), _) => ctx.eta,
        (None, Some(eta)) => eta,
        (None, None) => return Err(usage("give --eta or --eps2")),
    };
    let params = optimize_for(c, eta, variant)?;
    let slack = check_constraints(&params, c, eta)?;
    let scheme = match ctx {
        Some(ctx) => {
            let (adjusted, sp) = integral_adjust(&params, &ctx)?;
            Some(SchemeReport {
                params: sp,
                alpha: sp.alpha(),
                beta: sp.beta(),
                adjusted_slack: check_constraints(&adjusted, c, eta)?,
            })
        }
        None => None,
    };
    Ok(OptimizeReport { c, eta, variant, params, slack, scheme })
}

fn cmd_optimize(a: OptimizeArgs) -> CliResult<()> {
    check_c(a.c)?;
    a.targets.validate(a.n)?;
    let report = optimize_report(a.c, a.n, &a.targets, a.variant)?;
    if !report.slack.feasible {
        return Err(failure(format!("optimizer returned an infeasible set: {:?}", report.slack)));
    }
    emit(a.output.as_deref(), &json(&report)?)
}

/// Distinct integers spaced evenly in log scale over `[lo, hi]`.
pub fn log_spaced(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    if points <= 1 || lo == hi {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as u64)
        .map(|v| v.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let cs = if a.c.is_empty() {
        if a.c_min < 2 || a.c_max < a.c_min {
            return Err(usage(format!("need 2 <= --c-min <= --c-max, got {} and {}", a.c_min, a.c_max)));
        }
        if a.points == 0 {
            return Err(usage("--points must be at least 1"));
        }
        log_spaced(a.c_min, a.c_max, a.points)
    } else {
        a.c.clone()
    };
    for &c in &cs {
        check_c(c)?;
    }
    for &eta in &a.eta {
        check_eta(eta)?;
    }
    let rows = sweep(&cs, &a.eta)?;
    emit(a.output.as_deref(), &csv_bytes(&rows)?)
}

/// Reads a scheme from either an `optimize` report or a bare scheme object.
pub fn load_scheme(path: &Path) -> CliResult<SchemeParams<f64>> {
    let bytes = read(path)?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| failure(format!("{}: {e}", path.display())))?;
    let inner = match value.get("scheme") {
        Some(serde_json::Value::Null) => {
            return Err(failure(format!("{}: report has no scheme (run optimize with --n and --eps1)", path.display())))
        }
        Some(s) => s.clone(),
        None => value,
    };
    serde_json::from_value(inner).map_err(|e| failure(format!("{}: not a scheme: {e}", path.display())))
}

fn cmd_generate(a: GenerateArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let n = usize::try_from(a.n).map_err(|_| usage("--n too large"))?;
    let scheme = match (&a.params, a.c, a.ell) {
        (Some(path), _, _) => Some(load_scheme(path)?),
        (None, Some(c), None) => {
            check_c(c)?;
            a.targets.validate(Some(a.n))?;
            if a.targets.eps1.is_none() {
                return Err(usage("--c needs --eps1"));
            }
            let report = optimize_report(c, Some(a.n), &a.targets, a.variant)?;
            Some(report.scheme.expect("context is complete").params)
        }
        (None, None, Some(ell)) => {
            let delta = a.delta.expect("clap enforces --delta");
            if !(delta > 0.0 && delta < 0.5) {
                return Err(usage(format!("--delta must lie in (0, 1/2), got {delta}")));
            }
            if ell == 0 {
                return Err(usage("--ell must be at least 1"));
            }
            None
        }
        _ => return Err(usage("give --params, --c with error targets, or --ell with --delta")),
    };
    if scheme.is_none() && a.scheme_out.is_some() {
        return Err(usage("--scheme-out needs a derived scheme"));
    }
    let generator = match &scheme {
        Some(s) => Generator::for_scheme(n, s, a.seed)?,
        None => {
            let ell = usize::try_from(a.ell.expect("checked above")).map_err(|_| usage("--ell too large"))?;
            Generator::new(n, ell, a.delta.expect("checked above"), a.seed)
        }
    };
    let cb = generator.generate()?;
    if let (Some(path), Some(s)) = (&a.scheme_out, &scheme) {
        emit(Some(path), &json(s)?)?;
    }
    emit(Some(&a.output), &to_bytes(&cb))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgeryMeta {
    pub strategy: Strategy,
    pub seed: u64,
    pub coalition: Vec<usize>,
    pub codebook_seed: u64,
    pub ell: usize,
    pub marking_ok: bool,
    pub c: Option<u64>,
    /// The coalition is smaller than the bound, so completeness is not at stake.
    pub below_bound: Option<bool>,
}

/// Path of the JSON sidecar next to a forgery file.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn load_codebook(path: &Path) -> CliResult<tardos::Codebook> {
    from_bytes(&read(path)?).map_err(|e| failure(format!("{}: {e}", path.display())))
}

fn cmd_attack(a: AttackArgs) -> CliResult<()> {
    if let Some(c) = a.c {
        check_c(c)?;
    }
    let cb = load_codebook(&a.codebook)?;
    let forgery = forge(a.strategy, &cb, &a.coalition, a.seed)?;
    let meta = ForgeryMeta {
        strategy: a.strategy,
        seed: a.seed,
        coalition: a.coalition.clone(),
        codebook_seed: cb.seed(),
        ell: cb.ell(),
        marking_ok: verify_marking(&cb, &a.coalition, &forgery.bits),
        c: a.c,
        below_bound: a.c.map(|c| (a.coalition.len() as u64) < c),
    };
    let mut line = forgery.bits.to_ascii();
    line.push('\n');
    emit(Some(&sidecar_path(&a.output)), &json(&meta)?)?;
    emit(Some(&a.output), line.as_bytes())
}

fn cmd_trace(a: TraceArgs) -> CliResult<()> {
    if let Some(z) = a.z {
        if !z.is_finite() {
            return Err(usage(format!("--z must be finite, got {z}")));
        }
    }
    let cb = load_codebook(&a.codebook)?;
    let text = String::from_utf8(read(&a.forgery)?).map_err(|_| failure("forgery is not ASCII"))?;
    let y = BitVector::parse_ascii(&text).map_err(|e| failure(format!("{}: {e}", a.forgery.display())))?;
    let report = match (&a.params, a.z) {
        (Some(path), _) => {
            let scheme = load_scheme(path)?;
            if scheme.ell as usize != cb.ell() {
                return Err(failure(format!(
                    "scheme has ell = {} but the codebook has {} positions",
                    scheme.ell,
                    cb.ell()
                )));
            }
            trace(&cb, &y, &scheme)?
        }
        (None, Some(z)) => tardos::accuse(&cb, &y, z, a.variant)?,
        (None, None) => unreachable!("clap requires --z or --params"),
    };
    emit(a.output.as_deref(), &json(&report)?)
}

/// Runs every `(variant, strategy)` cell of a campaign, reporting progress on stderr.
pub fn simulate_rows(base: &TrialConfig, variants: &[Variant], strategies: &[Strategy]) -> CliResult<Vec<CampaignRow>> {
    let total = variants.len() * strategies.len();
    let mut rows = Vec::with_capacity(total);
    for &variant in variants {
        let cfg = TrialConfig { variant, ..base.clone() };
        let scheme = cfg.scheme()?;
        for &strategy in strategies {
            let cfg = TrialConfig { strategy, ..cfg.clone() };
            let row = campaign_row_on(&scheme, &cfg)?;
            eprintln!(
                "[{}/{}] {variant} {strategy}: ell {} Z {:.3} rate {:.4} [{:.4}, {:.4}]",
                rows.len() + 1,
                total,
                row.ell,
                row.z,
                row.rate,
                row.ci_low,
                row.ci_high
            );
            rows.push(row);
        }
    }
    Ok(rows)
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    check_c(a.c)?;
    if a.n < 2 {
        return Err(usage(format!("--n must be at least 2, got {}", a.n)));
    }
    check_unit("eps1", a.eps1)?;
    match a.eta {
        Some(eta) => check_eta(eta)?,
        None => check_unit("eps2", a.eps2)?,
    }
    let size = a.coalition_size.unwrap_or(a.c as usize);
    if size == 0 || size > a.n {
        return Err(usage(format!("coalition size must lie in 1..={}, got {size}", a.n)));
    }
    let variants = if a.variants.is_empty() { Variant::ALL.to_vec() } else { a.variants.clone() };
    let strategies = if a.strategies.is_empty() { Strategy::ALL.to_vec() } else { a.strategies.clone() };
    let base = TrialConfig {
        n: a.n,
        c: a.c,
        eps1: a.eps1,
        eps2: if a.eta.is_some() { None } else { Some(a.eps2) },
        eta: a.eta,
        strategy: strategies[0],
        trials: a.trials,
        base_seed: a.seed,
        variant: Variant::Symmetric,
        param_source: ParamSource::Optimized,
        coalition_size: a.coalition_size,
        shared_codebook: a.shared_codebook,
    };
    let rows = simulate_rows(&base, &variants, &strategies)?;
    emit(a.output.as_deref(), &csv_bytes(&rows)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentCheck {
    pub delta: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub moments: Vec<MomentCheck>,
    pub coalition_moments: Vec<tardos::montecarlo::AppendixBReport>,
    pub holds: bool,
}

pub const VERIFY_MOMENT_DELTAS: [f64; 3] = [1e-3, 1e-2, 0.1];
pub const VERIFY_COALITIONS: [u32; 4] = [2, 3, 5, 8];
pub const VERIFY_COALITION_DELTAS: [f64; 2] = [0.01, 0.1];

pub fn verify_report() -> CliResult<VerifyReport> {
    let moments = VERIFY_MOMENT_DELTAS
        .iter()
        .map(|&delta| {
            let (mean, second_moment) = innocent_moment_oracle(delta)?;
            let holds = mean.abs() <= MOMENT_TOL && (second_moment - 1.0).abs() <= MOMENT_TOL;
            Ok(MomentCheck { delta, mean, second_moment, holds })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut coalition_moments = Vec::new();
    for c in VERIFY_COALITIONS {
        for delta in VERIFY_COALITION_DELTAS {
            coalition_moments.push(appendix_b_oracle(c, delta)?);
        }
    }
    let holds = moments.iter().all(|m| m.holds) && coalition_moments.iter().all(|r| r.holds);
    Ok(VerifyReport { moments, coalition_moments, holds })
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    let report = verify_report()?;
    emit(a.output.as_deref(), &json(&report)?)?;
    if report.holds {
        Ok(())
    } else {
        Err(failure("identity check failed"))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub c: u64,
    pub eta: f64,
    pub gamma: f64,
    #[serde(flatten)]
    pub params: AsymptoticParams<f64>,
    /// Limit of d_ell as c grows.
    pub limit: f64,
}

fn cmd_asymptotic(a: AsymptoticArgs) -> CliResult<()> {
    check_c(a.c)?;
    check_eta(a.eta)?;
    let report = AsymptoticReport {
        c: a.c,
        eta: a.eta,
        gamma: gamma(),
        params: asymptotic_params(a.c, a.eta)?,
        limit: std::f64::consts::PI.powi(2) / 2.0,
    };
    emit(a.output.as_deref(), &json(&report)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_precedence() {
        assert_eq!(thread_count(Some(3), Some("5")).unwrap(), Some(3));
        assert_eq!(thread_count(None, Some(" 5 ")).unwrap(), Some(5));
        assert_eq!(thread_count(None, None).unwrap(), None);
        assert!(matches!(thread_count(None, Some("lots")), Err(CliError::Usage(_))));
        assert!(matches!(thread_count(Some(0), None), Err(CliError::Usage(_))));
    }

    #[test]
    fn log_spacing() {
        let v = log_spaced(2, 1000, 16);
        assert_eq!(v[0], 2);
        assert_eq!(*v.last().unwrap(), 1000);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(log_spaced(5, 5, 10), vec![5]);
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar_path(Path::new("out/y.txt")), PathBuf::from("out/y.txt.json"));
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f");
        write_atomic(&p, b"first version").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn targets_validation() {
        let t = |eta, eps1, eps2| ErrorTargets { eta, eps1, eps2 };
        assert!(t(Some(1.0), None, None).validate(None).is_ok());
        assert!(t(None, None, None).validate(None).is_err());
        assert!(t(None, Some(0.1), Some(0.1)).validate(None).is_err());
        assert!(t(None, Some(0.1), Some(0.1)).validate(Some(100)).is_ok());
        assert!(t(Some(1.5), None, None).validate(None).is_err());
    }
}
