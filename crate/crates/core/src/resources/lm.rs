//! Interpolated add-k n-gram language model.
//!
//! Training words seen fewer than `min_count` times are folded into
//! [`UNK`]. The unknown token gets a context-free probability
//! `p_unk = (c(UNK) + k) / (N + k (|V| + 1))`, where `V` is the known
//! vocabulary (including [`EOS`]) and `N` counts every predicted training
//! token. Known tokens share the remaining mass through
//!
//! ```text
//! Q1(w)     = (c(w) + k) / (N_known + k |V|)
//! Qn(w | h) = (c(h w) + k |V| Q(n-1)(w | h')) / (c(h) + k |V|)
//! P(w | h)  = (1 - p_unk) Qn(w | h)
//! ```
//!
//! with `h'` the history minus its oldest token and `c(h)` the number of
//! known tokens predicted after `h`.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use super::{io_err, open, ResourceError};
use crate::textproc::{tokenize, TokenizedText};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

const BOS_ID: u32 = 0;
const EOS_ID: u32 = 1;
const UNK_ID: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct LmConfig {
    pub order: usize,
    pub k: f64,
    /// Training words rarer than this become [`UNK`].
    pub min_count: usize,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            order: 3,
            k: 0.1,
            min_count: 2,
        }
    }
}

impl LmConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), ResourceError> {
        if self.order < 2 {
            return Err(ResourceError::LmOrder(self.order));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(ResourceError::LmSmoothing(self.k));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NgramLanguageModel {
    order: usize,
    k: f64,
    /// Token strings by id; ids 0..3 are BOS, EOS and UNK.
    tokens: Vec<String>,
    id_of: HashMap<String, u32>,
    /// `ngram_counts[n - 1]` maps an n-gram ending in a known token to its count.
    ngram_counts: Vec<HashMap<Vec<u32>, u64>>,
    /// `history_counts[n - 1]` maps an n-token history to the number of
    /// known tokens predicted after it.
    history_counts: Vec<HashMap<Vec<u32>, u64>>,
    known_total: u64,
    p_unk: f64,
}

pub fn train_lm(corpus: &Path, cfg: &LmConfig) -> Result<NgramLanguageModel, ResourceError> {
    cfg.validate()?;
    let reader = open(corpus)?;
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line.map_err(io_err(corpus))?);
    }
    train(lines.iter().map(String::as_str), cfg, corpus.to_path_buf())
}

/// Trains on in-memory sentences, one sentence per item.
pub fn train_lm_from_sentences<'a, I>(
    sentences: I,
    cfg: &LmConfig,
) -> Result<NgramLanguageModel, ResourceError>
where
    I: IntoIterator<Item = &'a str>,
{
    cfg.validate()?;
    train(sentences, cfg, PathBuf::from("<in-memory corpus>"))
}

fn train<'a, I>(
    sentences: I,
    cfg: &LmConfig,
    origin: PathBuf,
) -> Result<NgramLanguageModel, ResourceError>
where
    I: IntoIterator<Item = &'a str>,
{
    let corpus: Vec<Vec<String>> = sentences
        .into_iter()
        .map(|line| {
            tokenize(line)
                .words()
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .filter(|words| !words.is_empty())
        .collect();
    if corpus.is_empty() {
        return Err(ResourceError::EmptyCorpus { path: origin });
    }

    let mut freq: HashMap<&str, usize> = HashMap::new();
    for w in corpus.iter().flatten() {
        *freq.entry(w.as_str()).or_default() += 1;
    }
    let mut known: Vec<&str> = freq
        .iter()
        .filter(|(w, &c)| c >= cfg.min_count && ![BOS, EOS, UNK].contains(w))
        .map(|(w, _)| *w)
        .collect();
    known.sort_unstable();

    let mut tokens: Vec<String> = [BOS, EOS, UNK].iter().map(|s| s.to_string()).collect();
    tokens.extend(known.iter().map(|w| w.to_string()));
    let id_of: HashMap<String, u32> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect();

    let order = cfg.order;
    let mut ngram_counts = vec![HashMap::new(); order];
    let mut history_counts = vec![HashMap::new(); order];
    let mut known_total = 0u64;
    let mut unk_total = 0u64;

    for sentence in &corpus {
        let mut ids = vec![BOS_ID; order - 1];
        ids.extend(
            sentence
                .iter()
                .map(|w| id_of.get(w.as_str()).copied().unwrap_or(UNK_ID)),
        );
        ids.push(EOS_ID);
        for i in order - 1..ids.len() {
            let w = ids[i];
            if w == UNK_ID {
                unk_total += 1;
                continue;
            }
            known_total += 1;
            for n in 1..=order {
                let gram = ids[i + 1 - n..=i].to_vec();
                *ngram_counts[n - 1].entry(gram).or_insert(0) += 1;
                if n > 1 {
                    let history = ids[i + 1 - n..i].to_vec();
                    *history_counts[n - 1].entry(history).or_insert(0) += 1;
                }
            }
        }
    }

    let vocab = (tokens.len() - 2) as f64;
    let all = (known_total + unk_total) as f64;
    let p_unk = (unk_total as f64 + cfg.k) / (all + cfg.k * (vocab + 1.0));

    Ok(NgramLanguageModel {
        order,
        k: cfg.k,
        tokens,
        id_of,
        ngram_counts,
        history_counts,
        known_total,
        p_unk,
    })
}

impl NgramLanguageModel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Known tokens that can be predicted: every kept word plus [`EOS`].
    fn known_size(&self) -> f64 {
        (self.tokens.len() - 2) as f64
    }

    /// Every predictable token, [`EOS`] and [`UNK`] included.
    pub fn vocabulary(&self) -> Vec<&str> {
        self.tokens[1..].iter().map(String::as_str).collect()
    }

    pub fn unknown_probability(&self) -> f64 {
        self.p_unk
    }

    fn id(&self, word: &str) -> u32 {
        match self.id_of.get(word) {
            Some(&id) => id,
            None => self
                .id_of
                .get(&word.to_lowercase())
                .copied()
                .unwrap_or(UNK_ID),
        }
    }

    fn prob_id(&self, word: u32, history: &[u32]) -> f64 {
        if word == UNK_ID {
            return self.p_unk;
        }
        if word == BOS_ID {
            return 0.0;
        }
        let kv = self.k * self.known_size();
        let unigram = self.ngram_counts[0].get(&[word][..]).copied().unwrap_or(0);
        let mut q = (unigram as f64 + self.k) / (self.known_total as f64 + kv);

        let mut gram = Vec::with_capacity(self.order);
        for n in 2..=self.order.min(history.len() + 1) {
            let h = &history[history.len() - (n - 1)..];
            let c_h = self.history_counts[n - 1].get(h).copied().unwrap_or(0);
            if c_h == 0 {
                continue;
            }
            gram.clear();
            gram.extend_from_slice(h);
            gram.push(word);
            let c_hw = self.ngram_counts[n - 1].get(&gram).copied().unwrap_or(0);
            q = (c_hw as f64 + kv * q) / (c_h as f64 + kv);
        }
        (1.0 - self.p_unk) * q
    }

    /// `P(word | context)`, using at most the last `order - 1` context
    /// tokens. Words outside the vocabulary are scored as [`UNK`]; a context
    /// may begin with [`BOS`] markers.
    pub fn prob(&self, word: &str, context: &[&str]) -> f64 {
        let keep = context.len().min(self.order - 1);
        let history: Vec<u32> = context[context.len() - keep..]
            .iter()
            .map(|w| self.id(w))
            .collect();
        self.prob_id(self.id(word), &history)
    }

    /// Natural-log probability of every word token, each sentence scored
    /// from a [`BOS`]-padded start. Sentence ends are not scored.
    pub fn token_logprobs(&self, text: &TokenizedText) -> Vec<f64> {
        let mut out = Vec::with_capacity(text.word_count());
        for sentence in &text.sentences {
            let mut ids = vec![BOS_ID; self.order - 1];
            for w in sentence {
                let id = self.id(w);
                let history = &ids[ids.len() - (self.order - 1)..];
                out.push(self.prob_id(id, history).ln().min(0.0));
                ids.push(id);
            }
        }
        out
    }
}
