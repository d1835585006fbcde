mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use superfid::{Error, MeasureKind};

/// Random density matrices under the superfidelity-induced measure.
#[derive(Debug, Parser)]
#[command(name = "superfid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw random states and write their spectra and purities.
    Sample(SampleArgs),
    /// Estimate or bound the normalization constant of the superfidelity measure.
    Estimate(EstimateArgs),
    /// Tabulate the qutrit eigenvalue density on a barycentric grid.
    Grid(GridArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Hs,
    Bures,
    G,
}

impl From<MeasureArg> for MeasureKind {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Hs => MeasureKind::HilbertSchmidt,
            MeasureArg::Bures => MeasureKind::Bures,
            MeasureArg::G => MeasureKind::SuperfidelityG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub dim: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Master seed; falls back to SUPERFID_SEED, then 0.
    #[arg(long, env = "SUPERFID_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the matrix entries, row-major, as re,im pairs.
    #[arg(long)]
    pub full_matrix: bool,
    /// Proposal budget per accepted state for rejection sampling.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_proposals: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Jensen,
    Series,
    Mc,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Moments {
    Mc,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Tail {
    PowerLaw,
    None,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub dim: u64,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Monte-Carlo sample count (mc, and series with mc moments).
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Highest series order.
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
    #[arg(long, value_enum, default_value_t = Moments::Mc)]
    pub moments: Moments,
    #[arg(long, value_enum, default_value_t = Tail::PowerLaw)]
    pub tail: Tail,
    #[arg(long, env = "SUPERFID_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridMeasure {
    G,
    Bures,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: u64,
    #[arg(long, value_enum, default_value_t = GridMeasure::G)]
    pub measure: GridMeasure,
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(2..))]
    pub resolution: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Metric,
    Density,
    Sampler,
    Purity,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, env = "SUPERFID_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Dimension for the purity suite.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub dim: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    /// Write the JSON report here as well.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(Vec<String>),
    Budget(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExhausted(_) => CliError::Budget(e.to_string()),
            Error::InvalidArgument(_)
            | Error::InvalidDimension(_)
            | Error::UnsupportedDimension(..)
            | Error::UnvalidatedClosedForm { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn in_pool<T: Send>(workers: u64, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers as usize)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(pool.install(f))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(a) => in_pool(a.workers, || commands::sample(&a))?,
        Command::Estimate(a) => in_pool(a.workers, || commands::estimate(&a))?,
        Command::Grid(a) => commands::grid(&a),
        Command::Verify(a) => in_pool(a.workers, || verify::run(&a))?,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Verification(failed) => {
                    eprintln!("verification failed: {}", failed.join(", "));
                }
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Budget(m) => eprintln!("error: {m}"),
                CliError::Runtime(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
