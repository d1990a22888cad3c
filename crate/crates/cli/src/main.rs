mod commands;
mod error;
mod input;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{CliError, CliResult};
use input::Backend;

/// Fischer decompositions, apolar identities and spectral diagnostics for
/// multivariate polynomials.
#[derive(Parser, Debug)]
#[command(name = "fischer-lab", version, about)]
pub struct Cli {
    /// Write the JSON report here (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Apolar inner product and norms of two polynomials.
    Inner(InnerArgs),
    /// Decompose f = P q + r with P_k*(D) r = 0.
    Decompose(DecomposeArgs),
    /// Singular values of multiplication by a homogeneous P_k over a degree range.
    Spectrum(SpectrumArgs),
    /// Fit sigma_min(m) ~ C m^(tau/2) over a degree window.
    KsFit(KsFitArgs),
    /// Basis of the homogeneous polynomials of degree m annihilated by P_k(D).
    Kernel(KernelArgs),
    /// Classify the binary quadratic form a z1^2 + b z1 z2 + c z2^2.
    #[command(name = "classify2x2", allow_negative_numbers = true)]
    Classify2x2(ClassifyArgs),
    /// Estimate the growth order of an entire function given by its Taylor stream.
    Order(OrderArgs),
    /// Truncated B_lambda norm of a Taylor stream, with optional condition checks.
    Blambda(BlambdaArgs),
    /// Run the identity and inequality suite on random or supplied inputs.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct InnerArgs {
    #[arg(long, value_name = "FILE")]
    pub p: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub q: PathBuf,
    #[arg(long, value_enum, default_value_t = Backend::Auto)]
    pub backend: Backend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// d = 1 -> univariate, k = 1 -> linear, homogeneous P -> per degree, else direct.
    Auto,
    Univariate,
    Linear,
    Homogeneous,
    Direct,
    Series,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Divisor polynomial P.
    #[arg(long, value_name = "FILE")]
    pub p: PathBuf,
    /// Polynomial file, or a Taylor stream file (requires --m-cap).
    #[arg(long, value_name = "FILE")]
    pub f: PathBuf,
    #[arg(long, value_enum, default_value_t = Backend::Auto)]
    pub backend: Backend,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Also run the iterated series and require it to agree.
    #[arg(long)]
    pub series_check: bool,
    /// Gap index: P_j = 0 for beta < j < k. Read off P when omitted.
    #[arg(long)]
    pub beta: Option<usize>,
    /// Highest degree used from a Taylor stream.
    #[arg(long)]
    pub m_cap: Option<usize>,
    /// Relative block tolerance for the entire-function series.
    #[arg(long, default_value_t = fischer_core::entire::DEFAULT_ENTIRE_TOL)]
    pub tol: f64,
    /// Write q.json, r.json and diagnostics.json into this directory.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, value_name = "FILE")]
    pub p: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub m_min: usize,
    #[arg(long, default_value_t = 20)]
    pub m_max: usize,
    /// Also write the sweep as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KsFitArgs {
    #[arg(long, value_name = "FILE")]
    pub p: PathBuf,
    #[arg(long, default_value_t = fischer_core::spectral::DEFAULT_WINDOW.0)]
    pub m_min: usize,
    #[arg(long, default_value_t = fischer_core::spectral::DEFAULT_WINDOW.1)]
    pub m_max: usize,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[arg(long, value_name = "FILE")]
    pub p: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = Backend::Auto)]
    pub backend: Backend,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Coefficients as `re` or `re,im`; rationals like `1/2` select exact arithmetic.
    pub a: String,
    pub b: String,
    pub c: String,
}

#[derive(Args, Debug)]
pub struct OrderArgs {
    /// Taylor stream file.
    #[arg(long, value_name = "FILE")]
    pub f: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub m_min: usize,
    #[arg(long, default_value_t = 200)]
    pub m_max: usize,
    /// Sample points per sphere maximum.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct BlambdaArgs {
    #[arg(long, value_name = "FILE")]
    pub f: PathBuf,
    /// `power:P` for m^(-P), or `inverse-log` for 1/ln(m+2).
    #[arg(long, default_value = "inverse-log")]
    pub lambda: String,
    #[arg(long, default_value_t = 100)]
    pub m_cap: usize,
    /// With --tau and --beta: probe m^((k-tau)/2) lambda_m^(k-beta) -> 0.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub beta: Option<usize>,
    /// With --k, --tau, --beta: also evaluate rho (k - tau) < 2 (k - beta).
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub probe_min: usize,
    #[arg(long, default_value_t = 400)]
    pub probe_max: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random cases per check.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    /// Check this homogeneous P_k instead of random ones (with --f).
    #[arg(long, value_name = "FILE", requires = "f")]
    pub p: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "p")]
    pub f: Option<PathBuf>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("FISCHER_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Precondition(format!("FISCHER_LAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Precondition(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fischer-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
