use std::path::PathBuf;

use cfgain::bounds::Grid;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cfgain",
    version,
    about = "Counterfactual gain in multi-path interferometers"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Write output to a file instead of stdout
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,

    /// Suppress the version banner on stderr
    #[arg(long, global = true)]
    pub no_banner: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-outcome decomposition of the counterfactual gain
    Report(ReportArgs),
    /// Compare a named scenario against its reference values
    Scenario(ScenarioArgs),
    /// Gain bounds and optimizer results over a grid of P(a)
    Sweep(SweepArgs),
    /// Maximize the gain for one absorption probability
    Optimize(OptimizeArgs),
    /// Monte Carlo run of the absorber guessing game
    Discriminate(DiscriminateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Named scenario: ev, kd9, three-path, mixture
    #[arg(long, conflicts_with = "input")]
    pub scenario: Option<String>,

    /// Interferometer description (JSON)
    #[arg(long, value_name = "FILE", requires = "block")]
    pub input: Option<PathBuf>,

    /// Tagged path to block (with --input)
    #[arg(long, value_name = "PATH", requires = "input")]
    pub block: Option<String>,

    /// Absorption probability (ev scenario)
    #[arg(long)]
    pub pa: Option<f64>,

    /// Number of paths or outputs (ev and mixture scenarios)
    #[arg(long)]
    pub paths: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub source: Source,

    /// Re-check the identities on the emitted values
    #[arg(long)]
    pub self_check: bool,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: String,

    #[arg(long)]
    pub pa: Option<f64>,

    #[arg(long)]
    pub paths: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// start:stop:steps, steps counting both ends
    #[arg(long)]
    pub grid: Grid,

    /// Number of paths in the optimized family
    #[arg(long, default_value_t = 2)]
    pub paths: usize,

    /// Largest P(m) allowed on gaining outputs; 0 forbids false positives
    #[arg(long)]
    pub fp_cap: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub pa: f64,

    #[arg(long, default_value_t = 2)]
    pub paths: usize,

    #[arg(long)]
    pub fp_cap: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiscriminateArgs {
    #[command(flatten)]
    pub source: Source,

    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
