//! `peaklaw` - evaluate extrema laws, run martingale path simulations, and
//! validate empirical win-probability datasets against the closed forms.

mod config;
mod law;
mod manifest;
mod sim;
mod util;
mod validate;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }
}

/// Map a core error onto the exit-code taxonomy.
pub fn core_error(e: peaklaw::Error) -> CliError {
    use peaklaw::Error::*;
    match e {
        Io(_) | Csv(_) | EmptyDataset | AllBinsOmitted => CliError::Data(e.to_string()),
        NoPathsRetained | NotAbsorbed { .. } => CliError::Data(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "peaklaw",
    version,
    about = "Extrema laws for win-probability paths: closed forms, Monte Carlo oracles, calibration diagnostics",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a law's cdf/survival/quantile, or emit a plot-ready grid.
    Law(LawArgs),
    /// Generate martingale paths; write sample values and a summary.
    Simulate(SimArgs),
    /// Run the full calibration pipeline on a dataset of games.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawKindArg {
    /// Running maximum of one path (atom at 1).
    Max,
    /// Running maximum conditional on a terminal loss.
    MaxCondLoss,
    /// Two-player eventual loser's peak.
    LoserMax,
    /// n-player eventual winner's minimum.
    WinnerMin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Tsv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenArg {
    /// Gaussian-bridge sampling of a continuous-path martingale.
    Bridge,
    /// Symmetric absorbing walk on the lattice {0, h, ..., 1}.
    Grid,
    /// n-player pair-transfer walk.
    Nplayer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionalArg {
    Max,
    LoserPeak,
    WinnerMin,
    MaxGivenLoss,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryArg {
    /// Reference CDF at the bin center (default).
    BinCenter,
    /// Average of per-game reference CDFs (sensitivity mode).
    Mixture,
}

#[derive(Args)]
pub struct LawArgs {
    /// Which law to evaluate.
    #[arg(value_enum)]
    pub kind: LawKindArg,
    /// Starting probability; decimals and fractions ("2/3") accepted.
    #[arg(long)]
    pub p0: Option<String>,
    /// Comma-separated per-player priors, e.g. "1/6,1/3,1/2".
    #[arg(long)]
    pub priors: Option<String>,
    /// Evaluate the CDF at this point (repeatable).
    #[arg(long = "cdf-at")]
    pub cdf_at: Vec<String>,
    /// Evaluate the survival function at this point (repeatable).
    #[arg(long = "survival-at")]
    pub survival_at: Vec<String>,
    /// Evaluate the quantile at this level (repeatable).
    #[arg(long)]
    pub quantile: Vec<String>,
    /// Grid points when emitting the dense CDF table.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Args)]
pub struct SimArgs {
    /// Path generator.
    #[arg(long, value_enum)]
    pub gen: Option<GenArg>,
    /// Starting probability (two-player generators).
    #[arg(long)]
    pub p0: Option<String>,
    /// Comma-separated priors (n-player generator).
    #[arg(long)]
    pub priors: Option<String>,
    /// Bridge steps per path.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Lattice spacing, "1/K" or a decimal equal to 1/K.
    #[arg(long)]
    pub h: Option<String>,
    /// Absorption budget for lattice walks (default ~100x expected time).
    #[arg(long = "max-steps")]
    pub max_steps: Option<usize>,
    /// Number of paths.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Master seed; per-path substreams derive deterministically from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Path functional for sample mode.
    #[arg(long, value_enum)]
    pub functional: Option<FunctionalArg>,
    /// Estimate the optional-stopping decomposition at this level instead.
    #[arg(long = "decompose-at")]
    pub decompose_at: Option<String>,
    /// Dataset mode: write a synthetic game corpus (JSONL) to this file.
    #[arg(long = "emit-games")]
    pub emit_games: Option<std::path::PathBuf>,
    /// Dataset mode: comma-separated bin centers for the corpus.
    #[arg(long = "bin-centers")]
    pub bin_centers: Option<String>,
    /// Dataset mode: games per bin center.
    #[arg(long = "games-per-bin")]
    pub games_per_bin: Option<usize>,
    /// Dataset mode: shrink probabilities toward 1/2 by this factor.
    #[arg(long)]
    pub shrink: Option<f64>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Args)]
pub struct ValidateArgs {
    /// Canonical JSONL dataset (one game per line).
    #[arg(long)]
    pub games: Option<std::path::PathBuf>,
    /// Long-form CSV game table (with --series-csv).
    #[arg(long = "games-csv")]
    pub games_csv: Option<std::path::PathBuf>,
    /// Long-form CSV series table (with --games-csv).
    #[arg(long = "series-csv")]
    pub series_csv: Option<std::path::PathBuf>,
    /// Family-wise significance level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated bin centers (default 0.50,0.55,...,0.95).
    #[arg(long)]
    pub centers: Option<String>,
    /// Bin width.
    #[arg(long)]
    pub width: Option<f64>,
    /// Minimum games per retained bin.
    #[arg(long = "min-count")]
    pub min_count: Option<usize>,
    /// Keep only this league.
    #[arg(long)]
    pub league: Option<String>,
    /// Keep only these seasons, comma-separated.
    #[arg(long)]
    pub seasons: Option<String>,
    /// Reference-CDF construction per bin.
    #[arg(long, value_enum)]
    pub theory: Option<TheoryArg>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(1);
                }
            }
        }
    };
    let result = match cli.command {
        Command::Law(args) => law::run(args),
        Command::Simulate(args) => sim::run(args),
        Command::Validate(args) => validate::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}
