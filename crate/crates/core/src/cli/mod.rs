//! Command-line front end: argument grammar, config files, reports and exit statuses.
//!
//! Exit statuses: 0 success, 1 usage error, 2 numerical failure (rank deficiency,
//! a singular operator, non-convergence or a divergent quadrature).

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::covering::CoverError;
use crate::framelab::{FrameError, Method};
use crate::goldenring::{golden_square, inverse_three_plus_two_alpha, GoldenRational};
use crate::lattice::{LatticeError, Rect};
use crate::wavelet::{QuadGrid, WaveletError};

pub use config::{config_tokens, splice_config};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 0x5eed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::Lattice(l) => l.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<WaveletError> for CliError {
    fn from(e: WaveletError) -> Self {
        match e {
            WaveletError::NonConvergentTail { .. } | WaveletError::Degenerate(_) | WaveletError::DerivativeAccuracy { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::RankDeficient { .. }
            | FrameError::Singular { .. }
            | FrameError::NotConverged { .. }
            | FrameError::DensityMatch(_) => CliError::Numerical(e.to_string()),
            FrameError::Lattice(l) => l.into(),
            FrameError::Cover(c) => c.into(),
            FrameError::Wavelet(w) => w.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("output: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// 0 is quiet; higher values print progress to stderr.
    #[arg(long, global = true, default_value_t = 0)]
    pub verbosity: u8,
}

#[derive(Debug, Parser)]
#[command(name = "golden-frames", version, about = "Golden-ratio lattices as wavelet sampling sets", args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Point counts of the rotated lattice.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Phase-space covering audits.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Mother-wavelet hypothesis checks.
    #[command(subcommand)]
    Wavelet(WaveletCmd),
    /// Frame bounds of discrete sample sets.
    #[command(subcommand)]
    Frame(FrameCmd),
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Count (and list, up to 100) lattice points in a rectangle.
    #[command(args_override_self = true)]
    Count(CountArgs),
    /// Randomised and lattice-anchored extreme-count audit.
    #[command(args_override_self = true)]
    Audit(AuditArgs),
}

#[derive(Debug, Subcommand)]
pub enum CoverCmd {
    /// Count the scaled lattice in every cell of an index box.
    #[command(args_override_self = true)]
    Audit(CoverArgs),
}

#[derive(Debug, Subcommand)]
pub enum WaveletCmd {
    /// Admissibility and decay conditions of a built-in family.
    #[command(args_override_self = true)]
    Check(WaveletArgs),
}

#[derive(Debug, Subcommand)]
pub enum FrameCmd {
    /// Frame bounds of one sample set.
    #[command(args_override_self = true)]
    Estimate(EstimateArgs),
    /// Golden versus density-matched dyadic sets over several deltas.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
}

fn positive(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive finite number, got {text:?}")),
    }
}

fn non_negative(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("expected a non-negative finite number, got {text:?}")),
    }
}

fn split_pair(text: &str, sep: char) -> Result<(&str, &str), String> {
    text.split_once(sep).ok_or_else(|| format!("expected lo{sep}hi, got {text:?}"))
}

fn index_range(text: &str) -> Result<IndexRange, String> {
    let (lo, hi) = split_pair(text, ':')?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("bad integer {t:?}"));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok(IndexRange { lo, hi })
}

fn positive_range(text: &str) -> Result<PositiveRange, String> {
    let (lo, hi) = split_pair(text, ':')?;
    let (lo, hi) = (positive(lo)?, positive(hi)?);
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok(PositiveRange { lo, hi })
}

fn rect_arg(text: &str) -> Result<RectArg, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect::<Result<_, _>>()?;
    let [a, b, c, d] = parts[..] else {
        return Err(format!("expected a,b,c,d, got {text:?}"));
    };
    Rect::new(a, b, c, d).map_err(|e| e.to_string())?;
    Ok(RectArg { a, b, c, d })
}

fn band_arg(text: &str) -> Result<BandArg, String> {
    let (lo, hi) = split_pair(text, ':')?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad bin {t:?}"));
    let (first, last) = (parse(lo)?, parse(hi)?);
    if first == 0 || last < first {
        return Err(format!("band must satisfy 1 <= first <= last, got {first}:{last}"));
    }
    Ok(BandArg { first, last })
}

fn grid_arg(text: &str) -> Result<QuadGrid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, pts] = parts[..] else {
        return Err(format!("expected xi_min:xi_max:points, got {text:?}"));
    };
    let grid = QuadGrid {
        xi_min: positive(lo)?,
        xi_max: positive(hi)?,
        points: pts.trim().parse().map_err(|_| format!("bad point count {pts:?}"))?,
    };
    grid.validate().map_err(|e| e.to_string())?;
    Ok(grid)
}

fn area_arg(text: &str) -> Result<AreaArg, String> {
    let value = match text.trim() {
        "golden2" => golden_square(),
        "inv3p2a" => inverse_three_plus_two_alpha(),
        other => GoldenRational::parse_decimal(other).map_err(|e| e.to_string())?,
    };
    if value.signum().map_err(|e| e.to_string())? <= 0 {
        return Err(format!("area must be positive, got {text:?}"));
    }
    Ok(AreaArg { label: text.trim().to_string(), value })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexRange {
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositiveRange {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectArg {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RectArg {
    pub fn rect(&self) -> Rect {
        Rect::new(self.a, self.b, self.c, self.d).expect("validated when parsed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandArg {
    pub first: usize,
    pub last: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaArg {
    pub label: String,
    #[serde(skip)]
    pub value: GoldenRational,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    /// Half-open rectangle `[a,b) × [c,d)` as `a,b,c,d`.
    #[arg(long, value_parser = rect_arg, allow_hyphen_values = true)]
    pub rect: RectArg,
    #[arg(long, value_parser = positive, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    Min,
    Max,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub mode: AuditMode,
    /// `golden2` (2+α), `inv3p2a` (1/(3+2α)) or a positive decimal.
    #[arg(long, value_parser = area_arg, allow_hyphen_values = true)]
    pub area: AreaArg,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Aspect draws for the lattice-anchored sweep; defaults to `trials`.
    #[arg(long)]
    pub anchored: Option<u64>,
    /// Side ratio range `lo:hi`, sampled log-uniformly.
    #[arg(long, value_parser = positive_range, default_value = "0.001:1000")]
    pub aspect: PositiveRange,
    /// Corners are drawn from `[−window, window]²`.
    #[arg(long, value_parser = non_negative, default_value_t = 1000.0)]
    pub window: f64,
    /// Claimed bound: `min_count >= bound` or `max_count <= bound`.
    #[arg(long, default_value_t = 1)]
    pub bound: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoverArgs {
    #[arg(long, value_parser = positive)]
    pub delta: f64,
    /// Lattice scale; defaults to δ²/(2+α).
    #[arg(long, value_parser = positive, conflicts_with = "area_matched")]
    pub beta: Option<f64>,
    /// Use β = δ/√(2+α), which gives rescaled cells area exactly 2+α.
    #[arg(long)]
    pub area_matched: bool,
    #[arg(long = "k", value_parser = index_range, allow_hyphen_values = true, default_value = "-200:200")]
    pub k_range: IndexRange,
    #[arg(long = "l", value_parser = index_range, allow_hyphen_values = true, default_value = "-20:20")]
    pub l_range: IndexRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Cauchy,
    Gaussian,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WaveletArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Cauchy)]
    pub family: FamilyArg,
    /// Cauchy exponent `p`.
    #[arg(long, default_value_t = 6.0)]
    pub order: f64,
    /// Gaussian centre frequency.
    #[arg(long, default_value_t = 1.0)]
    pub center: f64,
    /// Gaussian width.
    #[arg(long, default_value_t = 0.1)]
    pub width: f64,
    /// Log quadrature grid `xi_min:xi_max:points`.
    #[arg(long, value_parser = grid_arg, default_value = "1e-8:1e3:8193")]
    pub grid: QuadGrid,
    #[arg(long, value_parser = positive, default_value_t = crate::wavelet::DEFAULT_DECAY_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Golden,
    Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Lanczos,
    Power,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lanczos => Method::Lanczos,
            MethodArg::Power => Method::Power,
        }
    }
}

/// Finite model and estimator settings shared by `frame estimate` and `frame compare`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Model length, a power of two.
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    /// Bins `first:last`; defaults to `n/64 : n/16`.
    #[arg(long, value_parser = band_arg)]
    pub band: Option<BandArg>,
    /// Scale octaves added on each side of the band's peak scales.
    #[arg(long, value_parser = non_negative, default_value_t = 2.0)]
    pub guard: f64,
    /// Explicit sampling region `a,b,c,d`, replacing the guarded default.
    #[arg(long, value_parser = rect_arg, allow_hyphen_values = true)]
    pub region: Option<RectArg>,
    /// Cauchy exponent of the analysing wavelet.
    #[arg(long, default_value_t = 6.0)]
    pub order: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Lanczos)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long, value_enum, default_value_t = Scheme::Golden)]
    pub scheme: Scheme,
    #[arg(long, value_parser = positive)]
    pub delta: Option<f64>,
    /// Golden lattice scale; overrides the value derived from `delta`.
    #[arg(long, value_parser = positive)]
    pub beta: Option<f64>,
    /// Dyadic dilation base, `a > 1`.
    #[arg(long, value_parser = positive)]
    pub a: Option<f64>,
    /// Dyadic translation step.
    #[arg(long, value_parser = positive)]
    pub b: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long, value_parser = positive, value_delimiter = ',', default_value = "1.0,0.7,0.5,0.35")]
    pub deltas: Vec<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
}

/// Envelope shared by every JSON report.
#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: Resolved<'a, C>,
    pub result: R,
}

#[derive(Debug, Serialize)]
pub struct Resolved<'a, C: Serialize> {
    #[serde(flatten)]
    pub global: &'a GlobalOpts,
    #[serde(flatten)]
    pub command: &'a C,
}

/// Rendered output plus the exit status the run should end with.
pub struct Outcome {
    pub body: String,
    pub status: i32,
    /// Diagnostic for stderr, e.g. the reason a report is marked as failed.
    pub note: Option<String>,
}

fn configure_threads(global: &GlobalOpts) -> Result<(), CliError> {
    if let Some(t) = global.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // A pool may already exist when several runs share a process; keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

fn emit(global: &GlobalOpts, body: &str) -> Result<(), CliError> {
    match &global.output {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match splice_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads(&cli.global).and_then(|_| commands::dispatch(&cli));
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.global, &outcome.body) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            if let Some(note) = outcome.note {
                eprintln!("{note}");
            }
            outcome.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(s.split_whitespace())
    }

    #[test]
    fn value_parsers() {
        assert!(rect_arg("1,0,0,1").is_err());
        assert!(rect_arg("-0.5,0.5,-0.5,0.5").is_ok());
        assert!(rect_arg("0,1,0").is_err());
        assert!(positive("0").is_err());
        assert!(positive("nan").is_err());
        assert_eq!(index_range("-3:4").unwrap(), IndexRange { lo: -3, hi: 4 });
        assert!(index_range("4:3").is_err());
        assert!(area_arg("-1").is_err());
        assert_eq!(area_arg("golden2").unwrap().value, golden_square());
        assert!(area_arg("2.5").is_ok());
        assert!(grid_arg("1e-8:1e3:8193").is_ok());
        assert!(grid_arg("1:2:100").is_err());
        assert!(band_arg("0:4").is_err());
    }

    #[test]
    fn grammar() {
        assert!(parse("gf lattice count --rect -0.5,0.5,-0.5,0.5 --beta 1").is_ok());
        assert!(parse("gf lattice count --rect 0,1,0,1 --beta 0").is_err());
        assert!(parse("gf wavelet check --family unknown").is_err());
        assert!(parse("gf cover audit --delta 0").is_err());
        assert!(parse("gf cover audit --delta 0.5 --beta 1 --area-matched").is_err());
        let c = parse("gf cover audit --delta 0.5 --k -3:3 --delta 0.25 --seed 9").unwrap();
        assert_eq!(c.global.seed, 9);
        match c.group {
            Group::Cover(CoverCmd::Audit(a)) => {
                assert_eq!(a.delta, 0.25);
                assert_eq!(a.k_range, IndexRange { lo: -3, hi: 3 });
            }
            _ => panic!("wrong command"),
        }
        let c = parse("gf frame compare --deltas 1,0.5").unwrap();
        match c.group {
            Group::Frame(FrameCmd::Compare(a)) => assert_eq!(a.deltas, vec![1.0, 0.5]),
            _ => panic!("wrong command"),
        }
    }
}
