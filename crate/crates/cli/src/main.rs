//! `guardfree`: find an approximate netlist whose aged critical path fits in
//! the fresh clock period, and the supporting analyses.
//!
//! Exit codes: 0 success, 1 infeasible, 2 input error, 3 internal error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "guardfree", version, about = "Aging-aware approximate netlist optimization")]
pub struct Cli {
    /// Worker threads for parallel evaluation (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Search for the lowest-error approximation meeting the delay target.
    Optimize(OptimizeArgs),
    /// Print the critical path delay and critical path.
    Sta(StaArgs),
    /// Simulate a netlist and write one decoded output value per vector.
    Simulate(SimulateArgs),
    /// Error metrics between two output streams or two netlists.
    Evaluate(EvaluateArgs),
    /// Emit a benchmark netlist, stimuli and the nominal timing model.
    Gen(GenArgs),
    /// Run a reference approximation (gate-level pruning or precision scaling).
    Baseline(BaselineArgs),
    /// Process-variation study of a baseline and its approximation.
    Montecarlo(MonteCarloArgs),
    /// Dump the approximation candidate table.
    Candidates(CandidatesArgs),
    /// Generate benchmarks, optimize each and write one CSV row per circuit.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Structural netlist to read.
    #[arg(long)]
    pub netlist: Option<PathBuf>,
    /// Cell timing file (`KIND fresh [aged]` per line); built-in nominal cells if omitted.
    #[arg(long)]
    pub timing: Option<PathBuf>,
    /// Aged/fresh delay ratio; when given, every aged delay becomes fresh × factor.
    #[arg(long)]
    pub aging_factor: Option<f64>,
    /// Aged critical-path limit; defaults to the fresh critical path delay.
    #[arg(long)]
    pub delay_target: Option<f64>,
    #[arg(long)]
    pub opt_vectors: Option<usize>,
    #[arg(long)]
    pub eval_vectors: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Comma-separated output buses forming the decoded value (last = LSBs).
    #[arg(long)]
    pub output_bus: Option<String>,
    #[arg(long, value_enum)]
    pub metric: Option<Metric>,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GaArgs {
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    /// Initial per-bit mutation probability.
    #[arg(long)]
    pub mutation: Option<f64>,
    #[arg(long)]
    pub crossover: Option<f64>,
    #[arg(long)]
    pub elite: Option<usize>,
    #[arg(long)]
    pub diversity_threshold: Option<f64>,
    /// Which nets get a chromosome bit.
    #[arg(long, value_enum)]
    pub eligibility: Option<EligibilityArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Nmed,
    NmedLiteral,
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Metric as ValueEnum>::from_str(s, true)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EligibilityArg {
    Violating,
    All,
}

impl std::str::FromStr for EligibilityArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <EligibilityArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerArg {
    Fresh,
    Aged,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Args, Debug)]
pub struct StaArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Corner to report; both when omitted.
    #[arg(long, value_enum)]
    pub corner: Option<CornerArg>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimMode {
    Functional,
    Timing,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Hex stimulus file; random vectors (`--eval-vectors`, `--seed`) if omitted.
    #[arg(long)]
    pub stimuli: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "functional")]
    pub mode: SimMode,
    #[arg(long, value_enum, default_value = "aged")]
    pub corner: CornerArg,
    /// Sampling clock for timing mode; defaults to the fresh critical path delay.
    #[arg(long)]
    pub clock: Option<f64>,
    /// Output CSV (`vector,value`); stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Exact output stream (CSV from `simulate`).
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Observed output stream (CSV from `simulate`).
    #[arg(long)]
    pub observed: Option<PathBuf>,
    /// Output width in bits for stream comparison.
    #[arg(long)]
    pub width: Option<usize>,
    /// Approximate netlist compared against `--netlist`.
    #[arg(long)]
    pub approx: Option<PathBuf>,
    /// Hex stimulus file for netlist comparison.
    #[arg(long)]
    pub stimuli: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// `rca<w>`, `mul<w>`, `addtree<n>x<w>` or `conv<p>x<c>`.
    #[arg(long)]
    pub benchmark: String,
    /// Number of stimulus vectors to write.
    #[arg(long, default_value_t = 10_000)]
    pub vectors: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineMethod {
    Glp,
    Aps,
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub method: BaselineMethod,
}

#[derive(Args, Debug)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Approximate netlist to compare against `--netlist`.
    #[arg(long)]
    pub approx: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Standard deviation over mean of each gate delay.
    #[arg(long, default_value_t = guardfree::timing::DEFAULT_SIGMA_RATIO)]
    pub sigma: f64,
    /// Evaluation vectors simulated per sample.
    #[arg(long, default_value_t = guardfree::bench::MONTECARLO_VECTORS)]
    pub mc_vectors: usize,
}

#[derive(Args, Debug)]
pub struct CandidatesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub eligibility: Option<EligibilityArg>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Comma-separated benchmark names.
    #[arg(long)]
    pub benchmark: String,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Infeasible(String),
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Infeasible(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// Attach a failure class to any error.
pub trait Classify<T> {
    fn input(self) -> Outcome<T>;
    fn internal(self) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Outcome<T> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn internal(self) -> Outcome<T> {
        self.map_err(|e| Failure::Internal(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Infeasible(m) => eprintln!("infeasible: {m}"),
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::Internal(e) => eprintln!("internal error: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}
