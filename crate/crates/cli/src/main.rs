//! `qxx`: lay out circuits, generate benchmarks, search placement
//! parameters and train depth-ratio surrogates.
//!
//! Machine-readable output (JSON, CSV) goes to files or stdout; summaries go
//! to stderr. Exit codes: 0 success, 1 usage error, 2 malformed input,
//! 3 run dominated by timeouts.

mod commands;
mod load;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use qxx::QxxParams;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_TIMEOUT: u8 = 3;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(e: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_USAGE, error: e.into() }
    }

    pub fn input(e: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_INPUT, error: e.into() }
    }

    pub fn timeout(msg: String) -> Self {
        Self { code: EXIT_TIMEOUT, error: anyhow::anyhow!(msg) }
    }
}

pub type CliResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "qxx", version, about = "Search-based initial placement and SWAP routing for quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place and route one circuit; prints the routed circuit as JSON.
    Layout(LayoutArgs),
    /// Benchmark generation.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Evaluate every point of a parameter grid over a benchmark suite.
    Sweep(SweepArgs),
    /// Weighted random search over the placement parameters.
    Wrs(WrsArgs),
    /// Train or query a depth-ratio surrogate.
    #[command(subcommand)]
    Surrogate(SurrogateCommand),
    /// Mean-ratio tables and Count/Rank importance from a layout table.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Write circuits with a known optimal depth and mapping.
    Generate(GenerateArgs),
}

#[derive(Subcommand)]
enum SurrogateCommand {
    /// Fit a model on a layout table written by `sweep --rows`.
    Train(TrainArgs),
    /// Predict the ratio of one circuit under one configuration.
    Predict(PredictArgs),
}

/// Placement parameters, as a sextuple or as individual flags. Individual
/// flags override the sextuple.
#[derive(Args, Clone)]
pub struct ParamArgs {
    /// MaxDepth,MaxChildren,B,C,MovementFactor,EdgeCost, e.g. "9,9,1.5,0.32,10,0.8".
    #[arg(long)]
    pub params: Option<String>,
    /// Levels between collapses of the search tree (1..=55).
    #[arg(long)]
    pub max_depth: Option<u32>,
    /// Children kept per search node (1..=55).
    #[arg(long)]
    pub max_children: Option<u32>,
    /// Gaussian sharpness, 0..=500.
    #[arg(long)]
    pub b: Option<f64>,
    /// Gaussian centre as a fraction of the gate list, 0..=1.
    #[arg(long)]
    pub c: Option<f64>,
    /// Movement split between a gate's qubits (1..=55).
    #[arg(long)]
    pub movement_factor: Option<u32>,
    /// Weight of one device edge, 0.1..=1.
    #[arg(long)]
    pub edge_cost: Option<f64>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<QxxParams, Failure> {
        let mut p = match &self.params {
            Some(s) => s.parse::<QxxParams>().map_err(Failure::usage)?,
            None => QxxParams::new(1, 1, 0.0, 0.5, 2, 1.0),
        };
        p.max_depth = self.max_depth.unwrap_or(p.max_depth);
        p.max_children = self.max_children.unwrap_or(p.max_children);
        p.b = self.b.unwrap_or(p.b);
        p.c = self.c.unwrap_or(p.c);
        p.movement_factor = self.movement_factor.unwrap_or(p.movement_factor);
        p.edge_cost = self.edge_cost.unwrap_or(p.edge_cost);
        p.validate().map_err(Failure::usage)?;
        Ok(p)
    }
}

#[derive(Args)]
pub struct LayoutArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// Device JSON file or built-in name (aspen16, grid4x4, grid:RxC, linear:N).
    #[arg(long, default_value = "aspen16")]
    pub device: String,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Depth layers charged per SWAP.
    #[arg(long, default_value_t = qxx::DEFAULT_SWAP_WEIGHT)]
    pub swap_weight: u32,
    /// Placement time limit, e.g. 500ms, 5s.
    #[arg(long, value_parser = parse_duration)]
    pub deadline: Option<Duration>,
    /// Write the routed circuit here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long, default_value = "aspen16")]
    pub device: String,
    /// Optimal depths: a list "5,10" or a range "5..45:5".
    #[arg(long, default_value = "5..45:5")]
    pub depths: String,
    #[arg(long, default_value_t = qxx::benchgen::SUITE_PER_DEPTH)]
    pub per_depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of registers busy in each layer, in (0, 1].
    #[arg(long, default_value_t = qxx::benchgen::DEFAULT_GATE_DENSITY)]
    pub density: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Where the circuits come from and how layouts are scored.
#[derive(Args, Clone)]
pub struct SuiteArgs {
    /// Directory of circuit files; defaults to the generated 90-circuit suite.
    #[arg(long)]
    pub suite: Option<PathBuf>,
    #[arg(long, default_value = "aspen16")]
    pub device: String,
    /// Per-circuit placement time limit.
    #[arg(long, value_parser = parse_duration, default_value = "5s")]
    pub deadline: Duration,
    #[arg(long, default_value_t = qxx::DEFAULT_SWAP_WEIGHT)]
    pub swap_weight: u32,
    /// How timed-out circuits enter the mean: exclude or worst.
    #[arg(long, default_value = "exclude")]
    pub timeout_policy: qxx::optimizer::TimeoutPolicy,
}

/// Parameter grid selection.
#[derive(Args, Clone)]
pub struct SpaceArgs {
    /// Grid preset. table3: MaxDepth and MaxChildren in {1,5,9}, B in
    /// {0,2,...,20}, C in {0,0.25,...,1}, MovementFactor in {2,6,10},
    /// EdgeCost in {0.2,0.6,1} (4455 points). table1: integer knobs 1..=55,
    /// B 0..=500 step 0.1, C 0..=1 step 0.01, EdgeCost 0.1..=1 step 0.1.
    #[arg(long, default_value = "table3")]
    pub space: String,
    /// Restrict MaxDepth to these values, e.g. "1" or "1,5".
    #[arg(long)]
    pub max_depth: Option<String>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub suite: SuiteArgs,
    /// Trial table (one row per configuration); stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Layout table (one row per configuration and circuit).
    #[arg(long)]
    pub rows: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Seeds the generated suite and the router.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record wall-clock milliseconds (otherwise 0, for reproducible files).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args)]
pub struct WrsArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub suite: SuiteArgs,
    /// Uniform trials before importance weighting.
    #[arg(long, default_value_t = 550)]
    pub n0: usize,
    /// Total trial budget.
    #[arg(long, default_value_t = 1500)]
    pub trials: usize,
    /// Proposals per incumbent snapshot.
    #[arg(long, default_value_t = 1)]
    pub batch_size: usize,
    /// Score trials with this surrogate model instead of laying out circuits.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Trial table (one row per trial); stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Layout table (one row per trial and circuit).
    #[arg(long)]
    pub rows: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Seeds the search, the generated suite and the router.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record wall-clock milliseconds (otherwise 0, for reproducible files).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Layout table written by `sweep --rows`.
    #[arg(long)]
    pub data: PathBuf,
    /// mlp or knn.
    #[arg(long, default_value = "mlp")]
    pub family: String,
    /// Hidden layer sizes to search, e.g. "100" or "3,10,20,50,100".
    #[arg(long, default_value = "100")]
    pub hidden: String,
    /// relu, tanh, or both comma-separated.
    #[arg(long, default_value = "relu")]
    pub activation: String,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    /// Neighbour counts to search (knn), e.g. "2..8".
    #[arg(long, default_value = "2..8")]
    pub k: String,
    /// Minkowski exponents to search (knn).
    #[arg(long, default_value = "1,2")]
    pub p: String,
    /// Also run nested cross-validation and store its report in the model.
    #[arg(long)]
    pub cv: bool,
    #[arg(long, default_value_t = 10)]
    pub outer_folds: usize,
    #[arg(long, default_value_t = 5)]
    pub inner_folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub circuit: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Layout table written by `sweep --rows` or `wrs --rows`.
    #[arg(long)]
    pub rows: PathBuf,
    /// "config" or a parameter name such as max_depth or b.
    #[arg(long, default_value = "config")]
    pub group_by: String,
    /// Emit Count/Rank importance instead of mean-ratio curves.
    #[arg(long)]
    pub importance: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `250ms`, `5s`, `2m` or a bare number of seconds.
pub fn parse_duration(s: &str) -> Result<Duration, String> {
    let s = s.trim();
    let (num, scale) = if let Some(v) = s.strip_suffix("ms") {
        (v, 1e-3)
    } else if let Some(v) = s.strip_suffix('s') {
        (v, 1.0)
    } else if let Some(v) = s.strip_suffix('m') {
        (v, 60.0)
    } else {
        (s, 1.0)
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("invalid duration {s:?}"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("invalid duration {s:?}"));
    }
    Ok(Duration::from_secs_f64(v * scale))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Layout(a) => commands::layout(a),
        Command::Bench(BenchCommand::Generate(a)) => commands::generate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Wrs(a) => commands::wrs(a),
        Command::Surrogate(SurrogateCommand::Train(a)) => commands::train(a),
        Command::Surrogate(SurrogateCommand::Predict(a)) => commands::predict(a),
        Command::Report(a) => commands::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(parse_duration("50ms").unwrap(), Duration::from_millis(50));
        assert_eq!(parse_duration("5s").unwrap(), Duration::from_secs(5));
        assert_eq!(parse_duration("2").unwrap(), Duration::from_secs(2));
        assert_eq!(parse_duration("1m").unwrap(), Duration::from_secs(60));
        assert!(parse_duration("fast").is_err());
        assert!(parse_duration("-1s").is_err());
    }

    #[test]
    fn named_flags_override_sextuple() {
        let a = ParamArgs {
            params: Some("9,9,1.5,0.32,10,0.8".into()),
            max_depth: Some(1),
            max_children: None,
            b: None,
            c: Some(0.5),
            movement_factor: None,
            edge_cost: None,
        };
        assert_eq!(a.resolve().unwrap(), QxxParams::new(1, 9, 1.5, 0.5, 10, 0.8));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
