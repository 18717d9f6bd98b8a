use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "tseval",
    version,
    about = "Reference-less quality estimation for text simplification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute feature matrices (features_<split>.tsv) for the given datasets.
    Features(Shared),
    /// Rank features by correlation with human labels, per dimension.
    Rank(Shared),
    /// Fit a scale -> PCA -> linear model pipeline and report cross-validation.
    Train(Shared),
    /// Score a saved model on labeled test data.
    Evaluate(Shared),
    /// Write label distribution tables.
    Report(Shared),
    /// Build a dataset TSV from aligned plain-text files.
    Convert(ConvertArgs),
}

/// Flags shared by every analysis command. Anything left unset falls back
/// to the `--config` file, then to the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct Shared {
    /// key = value file (TOML) supplying defaults for these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Labeled training dataset (TSV).
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Test dataset (TSV).
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Word frequency table, most frequent first.
    #[arg(long)]
    pub freq_table: Option<PathBuf>,
    /// Concreteness ratings.
    #[arg(long)]
    pub concreteness: Option<PathBuf>,
    /// Word vectors in text format.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Corpus for the n-gram language model, one sentence per line.
    #[arg(long)]
    pub lm_corpus: Option<PathBuf>,
    /// Comma-separated feature names, or "all" [default: all].
    #[arg(long)]
    pub features: Option<String>,
    /// G, M, S or overall; comma-separated where several are allowed.
    #[arg(long)]
    pub dimension: Option<String>,
    /// linreg, ridge, lasso, logistic or majority [default: ridge].
    #[arg(long)]
    pub model: Option<String>,
    /// Fixed regularisation strength; chosen by cross-validation when unset.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// PCA components [default: 25].
    #[arg(long)]
    pub pca_k: Option<usize>,
    /// Cross-validation folds [default: 5].
    #[arg(long)]
    pub folds: Option<usize>,
    /// Fold shuffling seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: .].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Precomputed training feature matrix, instead of computing it.
    #[arg(long)]
    pub train_features: Option<PathBuf>,
    /// Precomputed test feature matrix, instead of computing it.
    #[arg(long)]
    pub test_features: Option<PathBuf>,
    /// Model file to write (train) or read (evaluate).
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Rows shown in Markdown rankings [default: 15].
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Source sentences, one per line.
    #[arg(long)]
    pub source: PathBuf,
    /// Simplified sentences, aligned with --source.
    #[arg(long)]
    pub simplified: PathBuf,
    /// Label files in G, M, S, overall order.
    #[arg(long, num_args = 4, value_names = ["G", "M", "S", "OVERALL"])]
    pub labels: Option<Vec<PathBuf>>,
    /// Dataset TSV to write.
    #[arg(long)]
    pub dest: PathBuf,
}
