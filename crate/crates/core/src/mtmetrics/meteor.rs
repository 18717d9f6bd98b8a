use std::collections::HashMap;

use rust_stemmers::{Algorithm, Stemmer};

use super::MetricConfigError;
use crate::textproc::TokenizedText;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchStage {
    Exact,
    /// Match on English Snowball (Porter2) stems.
    Stem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeteorConfig {
    /// Weight of precision in `Fmean = P*R / (alpha*P + (1-alpha)*R)`;
    /// 0.9 gives the original `10PR / (R + 9P)`.
    pub alpha: f64,
    pub penalty_gamma: f64,
    pub penalty_beta: f64,
    pub stages: Vec<MatchStage>,
}

impl MeteorConfig {
    pub fn new(
        alpha: f64,
        penalty_gamma: f64,
        penalty_beta: f64,
        stages: Vec<MatchStage>,
    ) -> Result<Self, MetricConfigError> {
        let cfg = Self {
            alpha,
            penalty_gamma,
            penalty_beta,
            stages,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), MetricConfigError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(MetricConfigError::MeteorAlpha(self.alpha));
        }
        if !(0.0..=1.0).contains(&self.penalty_gamma) {
            return Err(MetricConfigError::MeteorGamma(self.penalty_gamma));
        }
        if !(self.penalty_beta > 0.0) {
            return Err(MetricConfigError::MeteorBeta(self.penalty_beta));
        }
        if self.stages.is_empty() {
            return Err(MetricConfigError::MeteorStages);
        }
        Ok(())
    }
}

impl Default for MeteorConfig {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            penalty_gamma: 0.5,
            penalty_beta: 3.0,
            stages: vec![MatchStage::Exact, MatchStage::Stem],
        }
    }
}

/// Search nodes explored per stage before settling for the best alignment
/// found so far.
const NODE_BUDGET: usize = 50_000;

/// Number of chunks in an alignment `out position -> source position`.
fn count_chunks(alignment: &[Option<usize>]) -> usize {
    let mut chunks = 0;
    let mut prev: Option<usize> = None;
    for a in alignment {
        match (*a, prev) {
            (Some(j), Some(p)) if j == p + 1 => {}
            (Some(_), _) => chunks += 1,
            _ => {}
        }
        prev = *a;
    }
    chunks
}

/// Branch-and-bound over output positions for one matching stage: keeps the
/// number of new matches maximal (per key, the smaller of the two unaligned
/// counts) and minimises the chunk count of the combined alignment.
struct StageSearch<'a> {
    fixed: &'a [Option<usize>],
    out_key: Vec<Option<usize>>,
    src_by_key: Vec<Vec<usize>>,
    need: Vec<usize>,
    remaining: Vec<usize>,
    used: Vec<bool>,
    current: Vec<Option<usize>>,
    best: Option<(usize, Vec<Option<usize>>)>,
    nodes: usize,
}

impl StageSearch<'_> {
    fn dfs(&mut self, pos: usize, prev: Option<usize>, chunks: usize) {
        if let Some((best, _)) = &self.best {
            if chunks >= *best || self.nodes >= NODE_BUDGET {
                return;
            }
        }
        self.nodes += 1;
        if pos == self.current.len() {
            self.best = Some((chunks, self.current.clone()));
            return;
        }
        let opens = |j: usize| usize::from(prev.is_none_or(|p| j != p + 1));

        if let Some(j) = self.fixed[pos] {
            self.current[pos] = Some(j);
            self.dfs(pos + 1, Some(j), chunks + opens(j));
            return;
        }
        let Some(key) = self.out_key[pos] else {
            self.current[pos] = None;
            self.dfs(pos + 1, None, chunks);
            return;
        };

        self.remaining[key] -= 1;
        if self.need[key] > 0 {
            let mut candidates: Vec<usize> = self.src_by_key[key]
                .iter()
                .copied()
                .filter(|&j| !self.used[j])
                .collect();
            if let Some(p) = prev {
                if let Some(i) = candidates.iter().position(|&j| j == p + 1) {
                    candidates[..=i].rotate_right(1);
                }
            }
            for j in candidates {
                self.used[j] = true;
                self.need[key] -= 1;
                self.current[pos] = Some(j);
                self.dfs(pos + 1, Some(j), chunks + opens(j));
                self.need[key] += 1;
                self.used[j] = false;
            }
        }
        if self.remaining[key] >= self.need[key] {
            self.current[pos] = None;
            self.dfs(pos + 1, None, chunks);
        }
        self.remaining[key] += 1;
    }
}

fn align_stage(alignment: &mut [Option<usize>], out_keys: &[String], src_keys: &[String]) {
    let mut used = vec![false; src_keys.len()];
    for j in alignment.iter().flatten() {
        used[*j] = true;
    }
    let mut key_ids: HashMap<&str, usize> = HashMap::new();
    let mut src_by_key: Vec<Vec<usize>> = Vec::new();
    for (j, k) in src_keys.iter().enumerate() {
        if used[j] {
            continue;
        }
        let id = *key_ids.entry(k.as_str()).or_insert_with(|| {
            src_by_key.push(Vec::new());
            src_by_key.len() - 1
        });
        src_by_key[id].push(j);
    }
    let mut remaining = vec![0; src_by_key.len()];
    let out_key: Vec<Option<usize>> = out_keys
        .iter()
        .zip(alignment.iter())
        .map(|(k, a)| match a {
            Some(_) => None,
            None => key_ids.get(k.as_str()).copied(),
        })
        .collect();
    for k in out_key.iter().flatten() {
        remaining[*k] += 1;
    }
    let need: Vec<usize> = remaining
        .iter()
        .zip(&src_by_key)
        .map(|(r, s)| (*r).min(s.len()))
        .collect();
    if need.iter().all(|&n| n == 0) {
        return;
    }

    let fixed = alignment.to_vec();
    let mut search = StageSearch {
        fixed: &fixed,
        out_key,
        src_by_key,
        need,
        remaining,
        used,
        current: vec![None; alignment.len()],
        best: None,
        nodes: 0,
    };
    search.dfs(0, None, 0);
    if let Some((_, best)) = search.best {
        alignment.copy_from_slice(&best);
    }
}

fn stage_keys(words: &[&str], stage: MatchStage, stemmer: &Stemmer) -> Vec<String> {
    match stage {
        MatchStage::Exact => words.iter().map(|w| w.to_string()).collect(),
        MatchStage::Stem => words.iter().map(|w| stemmer.stem(w).into_owned()).collect(),
    }
}

/// Unigram alignment of output onto source, staged per `stages`.
pub(crate) fn meteor_alignment(
    src: &[&str],
    out: &[&str],
    stages: &[MatchStage],
) -> Vec<Option<usize>> {
    let stemmer = Stemmer::create(Algorithm::English);
    let mut alignment = vec![None; out.len()];
    for &stage in stages {
        let out_keys = stage_keys(out, stage, &stemmer);
        let src_keys = stage_keys(src, stage, &stemmer);
        align_stage(&mut alignment, &out_keys, &src_keys);
    }
    alignment
}

/// METEOR score of `output` against `source`.
pub fn meteor(source: &TokenizedText, output: &TokenizedText, cfg: &MeteorConfig) -> f64 {
    let src = source.flat_words();
    let out = output.flat_words();
    if src.is_empty() || out.is_empty() {
        return 0.0;
    }
    let alignment = meteor_alignment(&src, &out, &cfg.stages);
    let matches = alignment.iter().flatten().count();
    if matches == 0 {
        return 0.0;
    }
    let chunks = count_chunks(&alignment);
    let precision = matches as f64 / out.len() as f64;
    let recall = matches as f64 / src.len() as f64;
    let fmean = precision * recall / (cfg.alpha * precision + (1.0 - cfg.alpha) * recall);
    let penalty = cfg.penalty_gamma * (chunks as f64 / matches as f64).powf(cfg.penalty_beta);
    fmean * (1.0 - penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::tokenize;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_ten_tokens() {
        let t = tokenize("one two three four five six seven eight nine ten");
        assert_abs_diff_eq!(
            meteor(&t, &t, &MeteorConfig::default()),
            0.9995,
            epsilon = 1e-12
        );
    }

    #[test]
    fn reordered() {
        let score = meteor(
            &tokenize("the cat sat"),
            &tokenize("sat the cat"),
            &MeteorConfig::default(),
        );
        assert_abs_diff_eq!(score, 1.0 - 0.5 * (2.0f64 / 3.0).powi(3), epsilon = 1e-12);
    }

    #[test]
    fn disjoint_and_empty() {
        let cfg = MeteorConfig::default();
        assert_eq!(meteor(&tokenize("a b"), &tokenize("c d"), &cfg), 0.0);
        assert_eq!(meteor(&tokenize("a b"), &tokenize(""), &cfg), 0.0);
    }

    #[test]
    fn stem_stage_matches_inflections() {
        let src = tokenize("the dogs were running");
        let out = tokenize("the dog was running");
        let exact_only = MeteorConfig {
            stages: vec![MatchStage::Exact],
            ..MeteorConfig::default()
        };
        let with_stem = MeteorConfig::default();
        assert!(meteor(&src, &out, &with_stem) > meteor(&src, &out, &exact_only));
    }

    #[test]
    fn repeated_words_pick_fewest_chunks() {
        // Greedy left-to-right would align the first "the" to source 0 and
        // split "the mat" into two chunks.
        let src: Vec<&str> = "the cat on the mat".split(' ').collect();
        let out: Vec<&str> = "the mat".split(' ').collect();
        let a = meteor_alignment(&src, &out, &[MatchStage::Exact]);
        assert_eq!(a, vec![Some(3), Some(4)]);
        assert_eq!(count_chunks(&a), 1);
    }

    #[test]
    fn extra_output_duplicates_left_unmatched() {
        let src: Vec<&str> = "a b".split(' ').collect();
        let out: Vec<&str> = "a a b".split(' ').collect();
        let a = meteor_alignment(&src, &out, &[MatchStage::Exact]);
        assert_eq!(a, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn config_validation() {
        assert!(MeteorConfig::new(0.9, 1.5, 3.0, vec![MatchStage::Exact]).is_err());
        assert!(MeteorConfig::new(0.9, 0.5, 0.0, vec![MatchStage::Exact]).is_err());
        assert!(MeteorConfig::new(0.9, 0.5, 3.0, vec![]).is_err());
        assert!(MeteorConfig::new(0.9, 0.5, 3.0, vec![MatchStage::Exact]).is_ok());
    }

    #[test]
    fn chunk_counting() {
        assert_eq!(count_chunks(&[Some(0), Some(1), None, Some(2)]), 2);
        assert_eq!(count_chunks(&[Some(2), Some(0), Some(1)]), 2);
        assert_eq!(count_chunks(&[None, None]), 0);
    }
}
