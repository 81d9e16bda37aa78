//! `lexiscreen`: operator commands around the screening pipeline.
//!
//! Exit codes: 0 success, 2 usage error, 3 bad input data, 4 internal failure.

mod commands;
mod error;
mod io;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lexiscreen_core::forest::{DEFAULT_SEED, DEFAULT_TREES};
use lexiscreen_core::AgeVariant;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "lexiscreen",
    version,
    about = "Dyslexia risk screening from game interaction data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a forest on a labeled dataset and write the model artifact.
    Train(TrainArgs),
    /// Cross-validate a forest and report screening metrics.
    Evaluate(EvaluateArgs),
    /// Pick the threshold that balances missed cases and false alarms.
    Calibrate(CalibrateArgs),
    /// Information gain of each question and of each measure type.
    Importance(ImportanceArgs),
    /// Cross-validate every combination of tree depth and features per split.
    Sweep(SweepArgs),
    /// Score feature rows or a session log with a trained model.
    Predict(PredictArgs),
    /// Generate a synthetic labeled dataset.
    Synth(SynthArgs),
    /// Turn completed session logs into dataset rows.
    Extract(ExtractArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset CSV, or `-` for standard input.
    #[arg(long)]
    pub data: String,
    /// Feature layout of the dataset.
    #[arg(long, default_value = "full", value_parser = parse_variant)]
    pub variant: AgeVariant,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    #[arg(long, default_value_t = DEFAULT_TREES)]
    pub trees: usize,
    /// Maximum tree depth; unlimited when omitted.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Features drawn per split; floor(log2(F)) + 1 when omitted.
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Spacing of the regular threshold grid searched during calibration.
    #[arg(long, default_value_t = 0.005)]
    pub threshold_grid: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Also write the JSON result to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub cv: CvArgs,
    /// Use this threshold instead of calibrating one by cross-validation.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Model artifact path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub cv: CvArgs,
    /// Report metrics at this threshold instead of a calibrated one.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Write the precision-recall curve as CSV.
    #[arg(long)]
    pub pr_curve: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub cv: CvArgs,
    /// Model artifact whose threshold is replaced by the calibrated one.
    #[arg(long, requires = "model_out")]
    pub model: Option<PathBuf>,
    /// Where to write the recalibrated model.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grouping {
    Question,
    Type,
    Both,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub by: Grouping,
    /// Sort groups by decreasing importance instead of layout order.
    #[arg(long)]
    pub ranked: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub cv: CvArgs,
    /// Comma-separated tree depths.
    #[arg(long, value_delimiter = ',', required = true)]
    pub depths: Vec<usize>,
    /// Comma-separated features-per-split values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub mtrys: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model artifact.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature rows in dataset CSV layout (labels may be empty), or `-`.
    #[arg(long, conflicts_with = "session", required_unless_present = "session")]
    pub features: Option<String>,
    /// A completed session log in JSON lines.
    #[arg(long)]
    pub session: Option<PathBuf>,
    /// Question manifest used to score a session log; the bundled one by default.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.108)]
    pub prevalence: f64,
    /// 0 makes the classes indistinguishable, 1 makes them far apart.
    #[arg(long, default_value_t = 0.5)]
    pub separation: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "full", value_parser = parse_variant)]
    pub variant: AgeVariant,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Session log files, or directories of `*.jsonl` logs.
    #[arg(required = true)]
    pub sessions: Vec<PathBuf>,
    /// Layout of the output rows; sessions from larger variants are projected
    /// onto it. Defaults to the variant of the first session.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<AgeVariant>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "LEXISCREEN_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    #[arg(long, env = "LEXISCREEN_DATA_DIR")]
    pub data_dir: PathBuf,
    #[arg(long, env = "LEXISCREEN_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = "LEXISCREEN_API_TOKEN", hide_env_values = true)]
    pub api_token: Option<String>,
}

fn parse_variant(s: &str) -> Result<AgeVariant, String> {
    s.parse().map_err(|e: lexiscreen_core::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Importance(a) => commands::importance(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Predict(a) => commands::predict(a),
        Command::Synth(a) => commands::synth(a),
        Command::Extract(a) => commands::extract(a),
        Command::Serve(a) => commands::serve(a),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
