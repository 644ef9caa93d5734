//! `hawe`: structural-role embeddings for node-typed graphs.
//!
//! Stages talk through files: `generate` writes a graph, `sample` turns it
//! into a walk corpus, `train` fits embeddings, and `classify` / `search`
//! evaluate them. Every stage writes a `key=value` manifest next to its
//! output.

mod commands;
mod manifest;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hawe::WalkMode;

#[derive(Parser, Debug)]
#[command(name = "hawe", version, about = "Heterogeneous anonymous walk embeddings", long_about = None)]
pub struct Cli {
    /// Seed for every random choice made by the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic graph (nodes.tsv, edges.tsv, roles.tsv) into a directory.
    Generate(GenerateArgs),
    /// Sample walks from every node and write a binary corpus.
    Sample(SampleArgs),
    /// Train node embeddings on a corpus and export them as TSV.
    Train(TrainArgs),
    /// Role classification with repeated stratified splits.
    Classify(ClassifyArgs),
    /// Nearest neighbors of one node in embedding space.
    Search(SearchArgs),
    /// Count anonymous and typed anonymous walks of a given length.
    Count(CountArgs),
    /// Rerun the whole pipeline while varying one parameter.
    Sweep(SweepArgs),
    /// Time corpus construction plus training on growing random graphs.
    Bench(BenchArgs),
    /// Typed Weisfeiler-Lehman structural roles of a graph.
    WlRoles(WlRolesArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenFamily {
    Pinwheel,
    Er,
    Ba,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Aw,
    Haw,
    Chaw,
}

impl From<ModeArg> for WalkMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Aw => WalkMode::Aw,
            ModeArg::Haw => WalkMode::Haw,
            ModeArg::Chaw => WalkMode::Chaw,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricArg {
    /// Mean held-out softmax-regression accuracy.
    Classify,
    /// Leave-one-out 1-nearest-neighbor accuracy.
    Nn,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Graph family.
    #[arg(value_enum)]
    pub family: GenFamily,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Pinwheel: number of blades (hub cycle length).
    #[arg(long, default_value_t = 8)]
    pub blades: usize,
    /// Pinwheel: nodes per blade.
    #[arg(long, default_value_t = 2)]
    pub blade_len: usize,
    /// Pinwheel: alternate two node types along the blades.
    #[arg(long)]
    pub hetero: bool,
    /// ER/BA: number of nodes.
    #[arg(long, default_value_t = 1000)]
    pub num_nodes: usize,
    /// ER: edge probability; overrides --avg-degree-factor.
    #[arg(long)]
    pub edge_prob: Option<f64>,
    /// ER: edge probability is this factor divided by the node count.
    #[arg(long, default_value_t = 10.0)]
    pub avg_degree_factor: f64,
    /// ER/BA: number of node types, assigned uniformly at random.
    #[arg(long, default_value_t = 2)]
    pub types: usize,
    /// BA: edges added per new node.
    #[arg(long, default_value_t = 5)]
    pub edges_per_node: usize,
    /// Refinement rounds for roles.tsv.
    #[arg(long, default_value_t = 100)]
    pub wl_iters: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GraphFiles {
    /// Node file: raw_id, type_name [, class_label].
    #[arg(long)]
    pub nodes: PathBuf,
    /// Edge file: raw_src, raw_dst.
    #[arg(long)]
    pub edges: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct WalkOpts {
    /// Walks sampled per node (T).
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Walk length in edges (L).
    #[arg(long, default_value_t = 6)]
    pub walk_length: usize,
    /// Walk token vocabulary.
    #[arg(long, value_enum, default_value_t = ModeArg::Haw)]
    pub mode: ModeArg,
}

#[derive(Args, Debug, Clone)]
pub struct TrainOpts {
    /// Embedding dimension (d).
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    /// Context half-width (Δ).
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    /// Passes over all windows.
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    /// Initial learning rate.
    #[arg(long, default_value_t = 0.025)]
    pub lr_start: f64,
    /// Final learning rate (linear decay).
    #[arg(long, default_value_t = 0.0001)]
    pub lr_end: f64,
    /// Sequential, bitwise-reproducible training instead of hogwild.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ClassifyOpts {
    /// Fraction of each class used for training.
    #[arg(long, default_value_t = 0.7)]
    pub train_frac: f64,
    /// Number of random splits.
    #[arg(long, default_value_t = 50)]
    pub repeats: usize,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub graph: GraphFiles,
    #[command(flatten)]
    pub walk: WalkOpts,
    /// Binary corpus output.
    #[arg(long, default_value = "corpus.bin")]
    pub out: PathBuf,
    /// Also write a readable TSV dump of the corpus.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Corpus written by `sample`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Node file the corpus was sampled from (maps ids back to raw ids).
    #[arg(long)]
    pub nodes: PathBuf,
    #[command(flatten)]
    pub train: TrainOpts,
    /// Embedding TSV output.
    #[arg(long, default_value = "embeddings.tsv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Embedding TSV written by `train`.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Label file: raw_id, label (e.g. roles.tsv).
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub classify: ClassifyOpts,
    /// Per-repeat report TSV.
    #[arg(long, default_value = "report.tsv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Embedding TSV written by `train`.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Raw id of the query node.
    #[arg(long)]
    pub target: String,
    /// Number of neighbors.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Output TSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// Walk length in edges.
    #[arg(long)]
    pub length: usize,
    /// Number of node types.
    #[arg(long, default_value_t = 1)]
    pub types: usize,
    /// Write a manifest here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub graph: GraphFiles,
    /// Label file (raw_id, label); defaults to the class column of the node file.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Parameter to vary: L, T, d or delta.
    #[arg(long)]
    pub param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<usize>,
    #[command(flatten)]
    pub walk: WalkOpts,
    #[command(flatten)]
    pub train: TrainOpts,
    #[command(flatten)]
    pub classify: ClassifyOpts,
    /// Accuracy measure.
    #[arg(long, value_enum, default_value_t = MetricArg::Classify)]
    pub metric: MetricArg,
    /// Output TSV.
    #[arg(long, default_value = "sweep.tsv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Random graph family: er or ba.
    #[arg(long, default_value = "er")]
    pub family: String,
    /// Comma-separated, strictly ascending node counts.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    pub sizes: Vec<usize>,
    /// Timed runs averaged per size.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    /// Walks sampled per node (T).
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    /// Walk length in edges (L).
    #[arg(long, default_value_t = 6)]
    pub walk_length: usize,
    /// Walk token vocabulary.
    #[arg(long, value_enum, default_value_t = ModeArg::Haw)]
    pub mode: ModeArg,
    /// Embedding dimension (d).
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    /// Context half-width (Δ).
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    /// Training epochs.
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Sequential, bitwise-reproducible training instead of hogwild.
    #[arg(long)]
    pub deterministic: bool,
    /// ER edge probability is this factor divided by the node count.
    #[arg(long, default_value_t = 10.0)]
    pub avg_degree_factor: f64,
    /// BA edges added per new node.
    #[arg(long, default_value_t = 5)]
    pub edges_per_node: usize,
    /// Number of node types.
    #[arg(long, default_value_t = 2)]
    pub types: usize,
    /// Output TSV (n, edges, seconds).
    #[arg(long, default_value = "bench.tsv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct WlRolesArgs {
    #[command(flatten)]
    pub graph: GraphFiles,
    /// Maximum refinement rounds.
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    /// Roles TSV output.
    #[arg(long, default_value = "roles.tsv")]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Input(m) => ("input", m),
            CliError::Runtime(m) => ("runtime", m),
        };
        write!(f, "hawe: error[{kind}]: {}", msg.replace(['\n', '\r'], " "))
    }
}

impl From<hawe::Error> for CliError {
    fn from(e: hawe::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = if cli.threads == 0 {
        commands::run(&cli)
    } else {
        hawe::par::with_threads(cli.threads, || commands::run(&cli))
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
