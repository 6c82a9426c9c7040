//! `tscore`: topic modeling, topic ranking and bibliometric reports for
//! collections of paper abstracts.
//!
//! Exit codes: 0 success, 2 bad input, 3 empty result, 4 numerical failure,
//! 5 degenerate model.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tscore::ErrorCategory;

mod commands;

#[derive(Debug, Parser)]
#[command(name = "tscore", version, about = "Topic-SCORE topic models, TR-SCORE rankings and citation metrics")]
pub struct Cli {
    /// Seed for vertex hunting and synthetic data.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Record the exact invocation as `invocation.json` in the output directory.
    #[arg(long, global = true)]
    pub dump_flags: bool,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize raw abstracts into a count matrix.
    Preprocess(PreprocessArgs),
    /// Estimate the topic matrix and topic weights.
    Fit(FitArgs),
    /// Singular values for choosing the number of topics.
    SelectK(SelectKArgs),
    /// Export scores for topics or journals, or journal PageRank.
    Rank(RankArgs),
    /// Bibliometric tables.
    Metrics {
        #[command(subcommand)]
        metric: Metric,
    },
    /// Cross-topic citation graph.
    Graph(GraphArgs),
    /// Generate a synthetic corpus with known parameters.
    Synth(SynthArgs),
    /// Compare a fit against synthetic ground truth.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Raw corpus, one document per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Document ids, one per line; defaults to metadata order, then line numbers.
    #[arg(long)]
    pub ids: Option<PathBuf>,
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    #[arg(long, requires = "metadata")]
    pub citations: Option<PathBuf>,
    /// Stop-word file, one token per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Add the built-in English stop-word list.
    #[arg(long)]
    pub default_stopwords: bool,
    #[arg(long, default_value_t = 100)]
    pub min_doc_count: usize,
    #[arg(long, default_value_t = 0.10)]
    pub short_doc_quantile: f64,
    #[arg(long)]
    pub no_lowercase: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightMethod {
    Ridge,
    Wls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hunter {
    Sketched,
    Successive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Barycentric {
    Clip,
    Simplex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub lo: usize,
    pub hi: usize,
}

fn parse_k_range(s: &str) -> Result<KRange, String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: usize = a.trim().parse().map_err(|_| format!("bad lower bound {a:?}"))?;
    let hi: usize = b.trim().parse().map_err(|_| format!("bad upper bound {b:?}"))?;
    if lo == 0 || lo > hi {
        return Err(format!("need 1 <= LO <= HI, got {lo}:{hi}"));
    }
    Ok(KRange { lo, hi })
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("topics").required(true).args(["k", "k_range"]))]
pub struct FitArgs {
    /// Corpus directory written by `preprocess` or `synth`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Number of topics.
    #[arg(long)]
    pub k: Option<usize>,
    /// Fit every K in LO:HI, one subdirectory each, plus a scree table.
    #[arg(long, value_parser = parse_k_range)]
    pub k_range: Option<KRange>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = WeightMethod::Ridge)]
    pub weights: WeightMethod,
    /// Ridge penalty for topic weights.
    #[arg(long, default_value_t = tscore::weights::DEFAULT_RIDGE_LAMBDA)]
    pub lambda: f64,
    /// Words listed per topic in `anchor_words.csv`.
    #[arg(long, default_value_t = 20)]
    pub anchor_top: usize,
    #[arg(long, value_enum, default_value_t = Hunter::Sketched)]
    pub vertex_hunter: Hunter,
    /// Sketch centers for vertex hunting (default 10 K).
    #[arg(long)]
    pub centers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Barycentric::Clip)]
    pub barycentric: Barycentric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScreeMatrix {
    Counts,
    Frequency,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Number of leading singular values to compute.
    #[arg(long, default_value_t = 20)]
    pub max_l: usize,
    /// Count singular values above this value.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum, default_value_t = ScreeMatrix::Counts)]
    pub matrix: ScreeMatrix,
    /// Directory for `scree.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankMode {
    Topics,
    Journals,
    Pagerank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pairs {
    AtLeastOne,
    ExactlyOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphModeArg {
    Dominant,
    Weighted,
}

#[derive(Debug, Args)]
pub struct GraphOptions {
    #[arg(long, value_enum, default_value_t = GraphModeArg::Dominant)]
    pub graph_mode: GraphModeArg,
    /// Smallest edge weight kept (default 0.09 dominant, 0.11 weighted).
    #[arg(long)]
    pub edge_cutoff: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long, value_enum)]
    pub mode: RankMode,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Fit directory; required for `--mode topics`.
    #[arg(long, required_if_eq("mode", "topics"))]
    pub fit: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Pairs::AtLeastOne)]
    pub pairs: Pairs,
    #[command(flatten)]
    pub graph: GraphOptions,
    /// Citation window in years for journal modes.
    #[arg(long, default_value_t = 10)]
    pub window: i32,
    #[arg(long, value_delimiter = ',', default_value = "2014,2015")]
    pub base_years: Vec<i32>,
    /// PageRank damping factor.
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
    /// Keep journal self-citations in the PageRank matrix.
    #[arg(long)]
    pub include_self: bool,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub graph: GraphOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SortKey {
    Coauthors,
    Citers,
    Citations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PeakRuleArg {
    Earliest,
    Latest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupBy {
    All,
    Journal,
}

#[derive(Debug, Subcommand)]
pub enum Metric {
    /// Yearly paper and author counts.
    Counts {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Coauthor, citer and citation counts per author.
    Centrality {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Keep only the top authors (default all).
        #[arg(long)]
        top: Option<usize>,
        #[arg(long, value_enum, default_value_t = SortKey::Citations)]
        sort_by: SortKey,
    },
    /// Sleeping-beauty coefficients of the most cited papers.
    SleepingBeauty {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 300)]
        top_by_peak: usize,
        /// Last year of the citation curves (default latest year in the metadata).
        #[arg(long)]
        end_year: Option<i32>,
        #[arg(long, value_enum, default_value_t = PeakRuleArg::Earliest)]
        peak_rule: PeakRuleArg,
    },
    /// Author topic interests and major topics.
    Interest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        fit: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// A topic is major when its interest exceeds this fraction of the largest.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
    },
    /// Smoothed yearly mean topic weights.
    Trends {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        fit: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = GroupBy::All)]
        group_by: GroupBy,
    },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    pub p: usize,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Words per document.
    #[arg(long, default_value_t = 300)]
    pub doc_len: u64,
    /// Anchor words per topic.
    #[arg(long, default_value_t = 5)]
    pub anchor_count: usize,
    #[arg(long, default_value_t = tscore::synth::DEFAULT_HETEROGENEITY)]
    pub heterogeneity: f64,
    /// Dirichlet concentration of the topic weights.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    pub pure_fraction: f64,
    /// Topic scores; citations are drawn only when given.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    /// Probability that a document pair is compared.
    #[arg(long, default_value_t = 0.01)]
    pub pair_prob: f64,
    #[arg(long)]
    pub duplicate_pairs: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub fit: PathBuf,
    /// Directory holding `A_true.csv`, `W_true.csv` and optionally `mu_true.csv`.
    #[arg(long)]
    pub truth: PathBuf,
    /// Topic scores table from `rank --mode topics`.
    #[arg(long)]
    pub scores: Option<PathBuf>,
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Input => 2,
        ErrorCategory::EmptyResult => 3,
        ErrorCategory::Numerical => 4,
        ErrorCategory::Degenerate => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.category()))
        }
    }
}
