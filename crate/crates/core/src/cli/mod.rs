//! The `kgbench` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

mod commands;
mod config;
mod error;
mod manifest;

pub use config::{apply_config_file, merge_into_argv, parse_config};
pub use error::{CliError, CliResult};
pub use manifest::{digest_inputs, manifest_path_for, InputDigest, Manifest};

use crate::embed::ModelKind;
use crate::eval::RankMode;
use crate::kg::Split;
use crate::symbolic::Aggregation;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const DATA_ENV: &str = "KGBENCH_DATA";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "kgbench",
    version,
    about = "Knowledge-graph embeddings, rule mining, KBC evaluation and graph profiling"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 1 runs everything sequentially, 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// `key = value` file supplying defaults for unset flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Where to write the run manifest instead of next to the output.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Read triple or fact files into a serialized graph directory.
    Ingest(IngestArgs),
    /// Rewrite n-ary facts as hub-node triples (TSV).
    Reify(ReifyArgs),
    /// Train an embedding model, writing checkpoints.
    Train(TrainArgs),
    /// Mine path rules for target relations.
    MineRules(MineArgs),
    /// List the triples a rule file predicts beyond the train split.
    ApplyRules(ApplyArgs),
    /// Tie-aware filtered ranking evaluation.
    EvalKbc(EvalArgs),
    /// Topological profile of the informed and uninformed entity graphs.
    Analyze(AnalyzeArgs),
    /// Nested cross-validated relational classification.
    Classify(ClassifyArgs),
    /// Render tables and CSV from result bundles.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Reify(_) => "reify",
            Command::Train(_) => "train",
            Command::MineRules(_) => "mine-rules",
            Command::ApplyRules(_) => "apply-rules",
            Command::EvalKbc(_) => "eval-kbc",
            Command::Analyze(_) => "analyze",
            Command::Classify(_) => "classify",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    /// Directory holding train.txt, valid.txt, test.txt and optionally
    /// attributes.txt. Relative paths fall back to $KGBENCH_DATA.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub valid: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Attribute schema: one relation name per line.
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    /// Inputs are `relation(a1,...,an).` facts instead of TSV triples.
    #[arg(long)]
    pub hyperfacts: bool,
    /// Object used for arity-1 facts.
    #[arg(long, default_value = "true")]
    pub unary_value: String,
    /// Assign ids in lexicographic label order.
    #[arg(long)]
    pub sorted_vocab: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "true")]
    pub unary_value: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    /// Serialized graph directory.
    #[arg(long)]
    pub kg: PathBuf,
    #[arg(long)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 20)]
    pub checkpoint_every: usize,
    #[arg(long, default_value_t = 512)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 1)]
    pub negatives: usize,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub regularization: f64,
    /// Gradient shards per batch; above 1 gives up bitwise determinism.
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
    /// Checkpoint directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also export final entity features as CSV.
    #[arg(long)]
    pub features: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MineArgs {
    #[arg(long)]
    pub kg: PathBuf,
    /// Target relation; repeat for several. Defaults to every relation with
    /// train triples.
    #[arg(long)]
    pub target: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub max_body: usize,
    #[arg(long, default_value_t = 1)]
    pub min_coverage: u64,
    #[arg(long, default_value_t = 1)]
    pub min_correct: u64,
    #[arg(long)]
    pub max_rules: Option<usize>,
    /// Rule file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a result bundle with rule analytics.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ApplyArgs {
    #[arg(long)]
    pub kg: PathBuf,
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long, default_value = "max")]
    pub aggregation: Aggregation,
    /// Predictions TSV: head, relation, tail, score, split.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    ModelCheckpoint,
    Rules,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub kg: PathBuf,
    #[arg(long, value_enum, required = true)]
    pub scorer: Option<ScorerKind>,
    /// Checkpoint file for `--scorer model-checkpoint`.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Rule file for `--scorer rules`.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long, default_value = "max")]
    pub aggregation: Aggregation,
    #[arg(long, default_value = "test")]
    pub split: Split,
    #[arg(long, default_value = "expected")]
    pub rank: RankMode,
    #[arg(long, value_delimiter = ',', default_value = "1,3,10")]
    pub hits: Vec<usize>,
    #[arg(long)]
    pub per_query: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<String>,
    /// Method label in the bundle; defaults to the scorer id.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyzeMode {
    Informed,
    Uninformed,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub kg: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: AnalyzeMode,
    #[arg(long)]
    pub out: PathBuf,
    /// Render a text table, to the given file or to stdout.
    #[arg(long, num_args = 0..=1)]
    pub table: Option<Option<PathBuf>>,
    /// Largest component handled by the exact algorithms.
    #[arg(long, default_value_t = crate::analysis::DEFAULT_NODE_LIMIT)]
    pub node_limit: usize,
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Transe,
    Distmult,
    Complex,
    Rules,
}

impl FeatureKind {
    pub fn model(self) -> Option<ModelKind> {
        match self {
            FeatureKind::Transe => Some(ModelKind::TransE),
            FeatureKind::Distmult => Some(ModelKind::DistMult),
            FeatureKind::Complex => Some(ModelKind::ComplEx),
            FeatureKind::Rules => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Knn,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub kg: PathBuf,
    /// TSV `entity<TAB>class`.
    #[arg(long, conflicts_with = "label_relation")]
    pub labels: Option<PathBuf>,
    /// Take labels from this relation and remove it from the graph.
    #[arg(long)]
    pub label_relation: Option<String>,
    /// TSV `entity<TAB>fold`; stratified folds are drawn otherwise.
    #[arg(long)]
    pub folds: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub features: FeatureKind,
    #[arg(long, value_enum, default_value = "knn")]
    pub classifier: ClassifierKind,
    /// Checkpoints to select from; trained in-process when absent.
    #[arg(long)]
    pub checkpoints: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,50,80,100")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 20)]
    pub checkpoint_every: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 512)]
    pub batch_size: usize,
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9,11,13,15")]
    pub ks: Vec<usize>,
    /// Body lengths searched by the rule baseline.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub rule_lengths: Vec<usize>,
    #[arg(long, default_value_t = crate::classify::DEFAULT_OUTER_FOLDS)]
    pub outer_folds: usize,
    #[arg(long, default_value_t = crate::classify::DEFAULT_INNER_FOLDS)]
    pub inner_folds: usize,
    /// Accuracy-difference report (JSON).
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Result bundles to merge, in order.
    pub inputs: Vec<PathBuf>,
    /// Include the published reference numbers.
    #[arg(long)]
    pub fixture: bool,
    /// Output directory for tables and CSV.
    #[arg(long)]
    pub out: PathBuf,
}

/// Resolves a relative input against `$KGBENCH_DATA` when it does not exist
/// relative to the working directory.
pub fn data_path(p: &Path) -> PathBuf {
    if p.is_relative() && !p.exists() {
        if let Some(root) = std::env::var_os(DATA_ENV) {
            let candidate = Path::new(&root).join(p);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    p.to_owned()
}

fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match apply_config_file(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

/// Runs a parsed command inside a pool of `--threads` workers.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
    pool.install(|| commands::dispatch(cli))
}
