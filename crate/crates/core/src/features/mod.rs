//! Elementary quality features of a (source, output) sentence pair.

mod matrix;
mod registry;

use std::cell::OnceCell;
use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

pub use matrix::FeatureMatrix;
pub use registry::{
    parse_feature_list, registry, DirectionHint, Feature, FeatureSpec, ResourceKind, Sign,
};

use crate::mtmetrics::{
    bleu, meteor, rouge, ter_align, BleuConfig, EditBreakdown, MeteorConfig, Smoothing,
};
use crate::resources::{
    cosine, load_concreteness, load_frequency_table, load_vectors_filtered, train_lm,
    ConcretenessLexicon, FrequencyTable, LmConfig, NgramLanguageModel, ResourceError,
    ResourcePaths, WordVectors,
};
use crate::textproc::{tokenize, TokenizedText};

/// Value of the LM features for outputs without words.
pub const LOGPROB_FLOOR: f64 = -20.0;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("feature {feature} needs a {resource}, which was not loaded")]
    MissingResource {
        feature: &'static str,
        resource: ResourceKind,
    },
    #[error("pair {id}: source has no word tokens")]
    EmptySource { id: String },
    #[error("pair {id}: non-finite value for {feature}")]
    NonFinite { id: String, feature: &'static str },
    #[error("feature matrix line {line}: {message}")]
    MatrixParse { line: usize, message: String },
    #[error("feature matrix I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// One source sentence and its simplification.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePair {
    pub id: String,
    pub source: TokenizedText,
    pub output: TokenizedText,
}

impl SentencePair {
    pub fn new(id: impl Into<String>, source: &str, output: &str) -> Result<Self, FeatureError> {
        let id = id.into();
        let source = tokenize(source);
        if source.is_empty() {
            return Err(FeatureError::EmptySource { id });
        }
        Ok(Self {
            id,
            source,
            output: tokenize(output),
        })
    }
}

/// Loaded resources; features whose resource is absent cannot be computed.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub freq_table: Option<FrequencyTable>,
    pub concreteness: Option<ConcretenessLexicon>,
    pub vectors: Option<WordVectors>,
    pub lm: Option<NgramLanguageModel>,
}

impl Resources {
    /// Loads every resource that has a path. Vectors are restricted to
    /// `vocabulary` (lowercase words) to keep memory bounded.
    pub fn load(
        paths: &ResourcePaths,
        vocabulary: &HashSet<String>,
        lm: &LmConfig,
    ) -> Result<Self, ResourceError> {
        Ok(Self {
            freq_table: paths
                .freq_table
                .as_deref()
                .map(load_frequency_table)
                .transpose()?,
            concreteness: paths
                .concreteness
                .as_deref()
                .map(load_concreteness)
                .transpose()?,
            vectors: paths
                .vectors
                .as_deref()
                .map(|p| load_vectors_filtered(p, vocabulary))
                .transpose()?,
            lm: paths
                .lm_corpus
                .as_deref()
                .map(|p| train_lm(p, lm))
                .transpose()?,
        })
    }

    pub fn has(&self, kind: ResourceKind) -> bool {
        match kind {
            ResourceKind::LanguageModel => self.lm.is_some(),
            ResourceKind::Vectors => self.vectors.is_some(),
            ResourceKind::FreqTable => self.freq_table.is_some(),
            ResourceKind::Concreteness => self.concreteness.is_some(),
        }
    }

    /// Fails on the first requested feature whose resource is missing.
    pub fn check(&self, which: &[Feature]) -> Result<(), FeatureError> {
        for &f in which {
            if let Some(kind) = f.requires() {
                if !self.has(kind) {
                    return Err(FeatureError::MissingResource {
                        feature: f.name(),
                        resource: kind,
                    });
                }
            }
        }
        Ok(())
    }

    /// Features computable with what is loaded, in registry order.
    pub fn available_features(&self) -> Vec<Feature> {
        Feature::ALL
            .iter()
            .copied()
            .filter(|f| f.requires().is_none_or(|k| self.has(k)))
            .collect()
    }
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

fn bleu_with(pair: &SentencePair, order: usize, smoothing: Smoothing) -> f64 {
    let cfg = BleuConfig::new(order, smoothing).expect("orders 1..=4 are valid");
    bleu(&pair.source, &pair.output, &cfg)
}

/// Readability inputs: words per sentence and syllables per word.
fn readability_terms(t: &TokenizedText) -> Option<(f64, f64)> {
    let words = t.word_count();
    if words == 0 {
        return None;
    }
    let wps = ratio(words as f64, t.sentence_count());
    let spw = t.syllable_count() as f64 / words as f64;
    Some((wps, spw))
}

pub fn flesch_kincaid_grade(t: &TokenizedText) -> f64 {
    readability_terms(t).map_or(0.0, |(wps, spw)| 0.39 * wps + 11.8 * spw - 15.59)
}

pub fn flesch_reading_ease(t: &TokenizedText) -> f64 {
    readability_terms(t).map_or(0.0, |(wps, spw)| 206.835 - 1.015 * wps - 84.6 * spw)
}

fn words_in_common(source: &TokenizedText, output: &TokenizedText) -> f64 {
    let src: HashSet<&str> = source.words().collect();
    let out: HashSet<&str> = output.words().collect();
    ratio(src.intersection(&out).count() as f64, src.len())
}

fn type_token_ratio(t: &TokenizedText) -> f64 {
    let types: HashSet<&str> = t.words().collect();
    ratio(types.len() as f64, t.word_count())
}

fn avg_cosine(vectors: &WordVectors, pair: &SentencePair) -> f64 {
    match (
        vectors.mean_vector(pair.source.words()),
        vectors.mean_vector(pair.output.words()),
    ) {
        (Some(a), Some(b)) => cosine(&a, &b),
        _ => 0.0,
    }
}

/// Computes the requested features for one pair, in the order given.
///
/// The TER alignment and LM scores are computed at most once per pair.
pub fn compute_features(
    pair: &SentencePair,
    resources: &Resources,
    which: &[Feature],
) -> Result<Vec<f64>, FeatureError> {
    resources.check(which)?;
    if pair.source.is_empty() {
        return Err(FeatureError::EmptySource {
            id: pair.id.clone(),
        });
    }
    let ter: OnceCell<EditBreakdown> = OnceCell::new();
    let ter = || ter.get_or_init(|| ter_align(&pair.source, &pair.output));
    let lm_scores: OnceCell<Vec<f64>> = OnceCell::new();
    let lm_scores = || {
        lm_scores.get_or_init(|| {
            resources
                .lm
                .as_ref()
                .map(|lm| lm.token_logprobs(&pair.output))
                .unwrap_or_default()
        })
    };
    let out = &pair.output;

    let mut values = Vec::with_capacity(which.len());
    for &feature in which {
        use Feature::*;
        let v = match feature {
            NbSourcePunct => pair.source.punct_tokens.len() as f64,
            NbSourceWords => pair.source.word_count() as f64,
            NbOutputPunct => out.punct_tokens.len() as f64,
            TypeTokenRatio => type_token_ratio(out),
            TerpDel => ter().deletions as f64,
            TerpNumEr => ter().num_errors as f64,
            TerpSub => ter().substitutions as f64,
            Terp => ter().normalized_score,
            Bleu1 => bleu_with(pair, 1, Smoothing::None),
            Bleu2 => bleu_with(pair, 2, Smoothing::None),
            Bleu3 => bleu_with(pair, 3, Smoothing::None),
            Bleu4 => bleu_with(pair, 4, Smoothing::None),
            BleuSmoothed => bleu_with(pair, 4, Smoothing::Method7),
            Meteor => meteor(&pair.source, out, &MeteorConfig::default()),
            Rouge => rouge(&pair.source, out),
            AvgCosineSim => avg_cosine(resources.vectors.as_ref().expect("checked"), pair),
            NbOutputChars => out.char_count as f64,
            NbOutputCharsPerSent => ratio(out.char_count as f64, out.sentence_count()),
            NbOutputSyllables => out.syllable_count() as f64,
            NbOutputSyllablesPerSent => ratio(out.syllable_count() as f64, out.sentence_count()),
            NbOutputWords => out.word_count() as f64,
            NbOutputWordsPerSent => ratio(out.word_count() as f64, out.sentence_count()),
            AvgLmProbsOutput => {
                let s = lm_scores();
                if s.is_empty() {
                    LOGPROB_FLOOR
                } else {
                    s.iter().sum::<f64>() / s.len() as f64
                }
            }
            MinLmProbsOutput => lm_scores()
                .iter()
                .copied()
                .reduce(f64::min)
                .unwrap_or(LOGPROB_FLOOR),
            MaxPosInFreqTable => {
                let table = resources.freq_table.as_ref().expect("checked");
                out.words().map(|w| table.rank(w)).max().unwrap_or(0) as f64
            }
            AvgConcreteness => resources
                .concreteness
                .as_ref()
                .expect("checked")
                .mean_rating(out.words()),
            OutputFkgl => flesch_kincaid_grade(out),
            OutputFre => flesch_reading_ease(out),
            WordsInCommon => words_in_common(&pair.source, out),
        };
        if !v.is_finite() {
            return Err(FeatureError::NonFinite {
                id: pair.id.clone(),
                feature: feature.name(),
            });
        }
        values.push(v);
    }
    Ok(values)
}

/// Lowercase word types of every source and output.
pub fn vocabulary(pairs: &[SentencePair]) -> HashSet<String> {
    pairs
        .iter()
        .flat_map(|p| p.source.words().chain(p.output.words()))
        .map(str::to_string)
        .collect()
}

/// Feature matrix over `pairs`, rows in input order. Rows are computed in
/// parallel on the current rayon pool.
pub fn compute_matrix(
    pairs: &[SentencePair],
    resources: &Resources,
    which: &[Feature],
) -> Result<FeatureMatrix, FeatureError> {
    resources.check(which)?;
    let rows = pairs
        .par_iter()
        .map(|p| compute_features(p, resources, which))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FeatureMatrix::new(
        which.iter().map(|f| f.name().to_string()).collect(),
        pairs.iter().map(|p| p.id.clone()).collect(),
        rows,
    ))
}
