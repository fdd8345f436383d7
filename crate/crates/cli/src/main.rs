//! `ecoc`: code generation, training, prediction, evaluation and benchmarks
//! for error-correcting output code ensembles.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ecoc_core::coding::{Strategy, WeightOrientation};
use ecoc_core::decoding::DecoderSpec;
use ecoc_core::svm::{KernelSpec, SvmConfig};
use ecoc_core::EcocError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "ECOC_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "ecoc", version, about = "Error-correcting output codes with a matching-based code builder")]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress progress messages on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code matrix.
    Codegen(CodegenArgs),
    /// Train an ensemble and save it to a directory.
    Train(TrainArgs),
    /// Predict labels with a saved ensemble.
    Predict(PredictArgs),
    /// Outer cross-validation of one strategy on one dataset.
    Evaluate(EvaluateArgs),
    /// Compare strategies over datasets.
    Benchmark(BenchmarkArgs),
    /// Solve a minimum-weight perfect matching read from a graph file.
    Match(MatchArgs),
    /// Write the eight-class 2-D Gaussian benchmark.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dense,
    Sparse,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Input format; guessed from the extension when omitted (.svm and .libsvm are sparse).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Dense files: cell delimiter, or "ws" for any whitespace.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// Dense files: 0-based label column (default: last).
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct LearnerArgs {
    /// SVM regularization constant.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = KernelKind::Rbf)]
    pub kernel: KernelKind,
    /// RBF width in exp(-gamma |x - y|^2).
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// KKT tolerance for SMO termination.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Iteration budget in multiples of the training-set size.
    #[arg(long, default_value_t = 200)]
    pub max_passes: usize,
    /// Kernel row cache size in MiB.
    #[arg(long, default_value_t = 64)]
    pub cache_mb: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Linear,
    Rbf,
}

impl LearnerArgs {
    pub fn config(&self) -> SvmConfig {
        SvmConfig {
            c: self.c,
            kernel: match self.kernel {
                KernelKind::Linear => KernelSpec::Linear,
                KernelKind::Rbf => KernelSpec::Rbf { gamma: self.gamma },
            },
            tolerance: self.tolerance,
            max_passes: self.max_passes,
            cache_bytes: self.cache_mb.saturating_mul(1 << 20),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct MatchingArgs {
    /// How pair performance becomes an edge weight.
    #[arg(long, default_value_t = WeightOrientation::Perf)]
    pub weight_orientation: WeightOrientation,
    /// Folds of the cross-validated pair score.
    #[arg(long, default_value_t = 5)]
    pub inner_k: usize,
}

#[derive(Args, Debug)]
pub struct CodegenArgs {
    #[arg(long)]
    pub strategy: Strategy,
    /// Number of classes, for data-independent strategies.
    #[arg(long)]
    pub classes: Option<usize>,
    /// Training data; required by the matching strategy.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub data_args: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub matching: MatchingArgs,
    /// Print the matrix as a grid of + - . symbols.
    #[arg(long)]
    pub render: bool,
    /// Matrix file to write (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub data_args: DataArgs,
    #[arg(long, default_value_t = Strategy::Matching)]
    pub strategy: Strategy,
    /// Use this matrix file instead of building one.
    #[arg(long, conflicts_with = "strategy")]
    pub matrix: Option<PathBuf>,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub matching: MatchingArgs,
    #[arg(long, default_value_t = DecoderSpec::AttenuatedEuclidean)]
    pub decoder: DecoderSpec,
    /// Ensemble directory (default: $ECOC_OUTPUT_DIR/model, else ecoc-output/model).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Ensemble directory written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Rows to classify.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Dense files: cell delimiter, or "ws" for any whitespace.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// Rows carry a label (dense: last cell, sparse: first token) which is ignored.
    #[arg(long)]
    pub labelled: bool,
    /// Override the decoder stored with the ensemble.
    #[arg(long)]
    pub decoder: Option<DecoderSpec>,
    /// Append the decoder distance to every class.
    #[arg(long)]
    pub scores: bool,
    /// Write predictions here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub data_args: DataArgs,
    #[arg(long)]
    pub strategy: Strategy,
    /// Outer folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Use plain shuffled folds instead of stratified ones.
    #[arg(long)]
    pub unstratified: bool,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub matching: MatchingArgs,
    #[arg(long, default_value_t = DecoderSpec::AttenuatedEuclidean)]
    pub decoder: DecoderSpec,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchmarkArgs {
    /// Dataset files; repeat the flag for several.
    #[arg(long = "data", required = true)]
    pub data: Vec<PathBuf>,
    #[command(flatten)]
    pub data_args: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "ova,ovo,dense,sparse,matching")]
    pub strategies: Vec<Strategy>,
    /// Random matrices per random strategy.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long)]
    pub unstratified: bool,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub matching: MatchingArgs,
    #[arg(long, default_value_t = DecoderSpec::AttenuatedEuclidean)]
    pub decoder: DecoderSpec,
    /// Report directory (default: $ECOC_OUTPUT_DIR/benchmark, else ecoc-output/benchmark).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    /// Graph file: node count, then `i j weight` lines; "-" reads stdin.
    pub graph: PathBuf,
    /// Cross-check against exhaustive search (at most 12 nodes).
    #[arg(long)]
    pub brute_force: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    pub points_per_class: usize,
    /// Standard deviation around each class center.
    #[arg(long, default_value_t = ecoc_core::dataset::synth::DEFAULT_SPREAD)]
    pub spread: f64,
    #[arg(long, value_enum, default_value_t = Format::Dense)]
    pub format: Format,
    #[arg(long, short)]
    pub output: PathBuf,
}

/// Exit status classes.
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_DATA: u8 = 4;

fn exit_code(err: &EcocError) -> u8 {
    match err {
        EcocError::Io { .. } => EXIT_IO,
        EcocError::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let ctx = commands::Context {
        seed: cli.seed,
        quiet: cli.quiet,
    };
    let result = match cli.command {
        Command::Codegen(a) => commands::codegen(&ctx, a),
        Command::Train(a) => commands::train(&ctx, a),
        Command::Predict(a) => commands::predict(&ctx, a),
        Command::Evaluate(a) => commands::evaluate(&ctx, a),
        Command::Benchmark(a) => commands::benchmark(&ctx, a),
        Command::Match(a) => commands::solve_match(&ctx, a),
        Command::Synth(a) => commands::synth(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
