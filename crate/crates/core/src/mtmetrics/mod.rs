//! MT-style comparison metrics computed between a source sentence and a
//! system output, with the source playing the role of the single reference.
//!
//! All metrics work on the flattened word sequence of each text; sentence
//! boundaries only matter for n-gram extraction in BLEU.

mod bleu;
mod meteor;
mod rouge;
mod ter;

pub use bleu::{bleu, BleuConfig, Smoothing};
pub use meteor::{meteor, MatchStage, MeteorConfig};
pub use rouge::{lcs_len, rouge};
pub use ter::{levenshtein, ter_align, ter_align_tokens, EditBreakdown};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricConfigError {
    #[error("BLEU max order must be in 1..=4, got {0}")]
    BleuOrder(usize),
    #[error("METEOR penalty gamma must be in [0, 1], got {0}")]
    MeteorGamma(f64),
    #[error("METEOR penalty beta must be positive, got {0}")]
    MeteorBeta(f64),
    #[error("METEOR alpha must be in (0, 1), got {0}")]
    MeteorAlpha(f64),
    #[error("METEOR needs at least one match stage")]
    MeteorStages,
}
