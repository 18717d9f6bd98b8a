//! External lexical resources: frequency table, concreteness lexicon, word
//! vectors and an n-gram language model trained from a plain-text corpus.
//!
//! Every lookup is case-insensitive; keys are stored lowercased.

mod concreteness;
mod frequency;
mod lm;
mod vectors;

use std::fs::File;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

pub use concreteness::{
    load_concreteness, load_concreteness_with, ConcretenessFormat, ConcretenessLexicon,
};
pub use frequency::{load_frequency_table, FrequencyTable};
pub use lm::{train_lm, train_lm_from_sentences, LmConfig, NgramLanguageModel, BOS, EOS, UNK};
pub use vectors::{cosine, load_vectors, load_vectors_filtered, WordVectors};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{} contains no entries", path.display())]
    Empty { path: PathBuf },
    #[error("{}: missing column {column:?}", path.display())]
    MissingColumn { path: PathBuf, column: String },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}:{line}: concreteness rating {rating} for {word:?} is outside [1, 5]", path.display())]
    RatingOutOfRange {
        path: PathBuf,
        line: usize,
        word: String,
        rating: f64,
    },
    #[error("{}:{line}: expected {expected} vector components, found {found}", path.display())]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("language model order must be at least 2, got {0}")]
    LmOrder(usize),
    #[error("language model smoothing constant must be positive, got {0}")]
    LmSmoothing(f64),
    #[error("{}: corpus contains no words", path.display())]
    EmptyCorpus { path: PathBuf },
}

fn open(path: &Path) -> Result<BufReader<File>, ResourceError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| ResourceError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ResourceError + '_ {
    move |source| ResourceError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Locations of the optional resource files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourcePaths {
    pub freq_table: Option<PathBuf>,
    pub concreteness: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub lm_corpus: Option<PathBuf>,
}

/// File names looked up by [`ResourcePaths::from_dir`], first match wins.
pub const FREQ_TABLE_NAMES: &[&str] = &["frequency.txt", "freq_table.txt", "frequency.tsv"];
pub const CONCRETENESS_NAMES: &[&str] =
    &["concreteness.tsv", "concreteness.txt", "concreteness.csv"];
pub const VECTORS_NAMES: &[&str] = &["vectors.vec", "vectors.txt"];
pub const LM_CORPUS_NAMES: &[&str] = &["lm_corpus.txt", "corpus.txt"];

impl ResourcePaths {
    /// Picks up whichever conventionally named files exist in `dir`.
    pub fn from_dir(dir: &Path) -> Self {
        let find = |names: &[&str]| names.iter().map(|n| dir.join(n)).find(|p| p.is_file());
        Self {
            freq_table: find(FREQ_TABLE_NAMES),
            concreteness: find(CONCRETENESS_NAMES),
            vectors: find(VECTORS_NAMES),
            lm_corpus: find(LM_CORPUS_NAMES),
        }
    }

    /// Fills unset paths from `other`.
    pub fn or(self, other: ResourcePaths) -> Self {
        Self {
            freq_table: self.freq_table.or(other.freq_table),
            concreteness: self.concreteness.or(other.concreteness),
            vectors: self.vectors.or(other.vectors),
            lm_corpus: self.lm_corpus.or(other.lm_corpus),
        }
    }
}
