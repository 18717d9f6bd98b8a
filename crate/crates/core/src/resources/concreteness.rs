use std::collections::HashMap;
use std::path::Path;

use super::{open, ResourceError};

/// Concreteness ratings on the 1 (abstract) to 5 (concrete) scale.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConcretenessLexicon {
    rating_of: HashMap<String, f64>,
}

impl ConcretenessLexicon {
    pub const MIN_RATING: f64 = 1.0;
    pub const MAX_RATING: f64 = 5.0;

    /// Builds a lexicon from `(word, rating)` pairs, rejecting out-of-range
    /// ratings. The first rating of a repeated word wins.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, (String, f64)>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut rating_of = HashMap::new();
        for (word, rating) in pairs {
            let word = word.as_ref().to_lowercase();
            if !(Self::MIN_RATING..=Self::MAX_RATING).contains(&rating) {
                return Err((word, rating));
            }
            rating_of.entry(word).or_insert(rating);
        }
        Ok(Self { rating_of })
    }

    pub fn rating(&self, word: &str) -> Option<f64> {
        self.rating_of
            .get(word)
            .or_else(|| self.rating_of.get(&word.to_lowercase()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.rating_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rating_of.is_empty()
    }

    /// Mean rating over the covered words; 0 when none is covered.
    pub fn mean_rating<'a, I: IntoIterator<Item = &'a str>>(&self, words: I) -> f64 {
        let (sum, n) = words
            .into_iter()
            .filter_map(|w| self.rating(w))
            .fold((0.0, 0usize), |(s, n), r| (s + r, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Column layout of a concreteness file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcretenessFormat {
    pub delimiter: u8,
    pub word_column: String,
    pub rating_column: String,
}

impl Default for ConcretenessFormat {
    fn default() -> Self {
        Self {
            delimiter: b'\t',
            word_column: "Word".to_string(),
            rating_column: "Conc.M".to_string(),
        }
    }
}

/// Loads a tab-separated file with `Word` and `Conc.M` columns.
pub fn load_concreteness(path: &Path) -> Result<ConcretenessLexicon, ResourceError> {
    load_concreteness_with(path, &ConcretenessFormat::default())
}

pub fn load_concreteness_with(
    path: &Path,
    format: &ConcretenessFormat,
) -> Result<ConcretenessLexicon, ResourceError> {
    let parse_err = |line: usize, message: String| ResourceError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .quoting(format.delimiter != b'\t')
        .flexible(true)
        .from_reader(open(path)?);

    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| ResourceError::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            })
    };
    let word_idx = column(&format.word_column)?;
    let rating_idx = column(&format.rating_column)?;

    let mut rating_of = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        let (Some(word), Some(raw)) = (record.get(word_idx), record.get(rating_idx)) else {
            return Err(parse_err(
                line,
                "row is missing the word or rating field".into(),
            ));
        };
        let word = word.trim().to_lowercase();
        if word.is_empty() {
            continue;
        }
        let rating: f64 = raw
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("invalid rating {raw:?}")))?;
        if !(ConcretenessLexicon::MIN_RATING..=ConcretenessLexicon::MAX_RATING).contains(&rating) {
            return Err(ResourceError::RatingOutOfRange {
                path: path.to_path_buf(),
                line,
                word,
                rating,
            });
        }
        rating_of.entry(word).or_insert(rating);
    }
    if rating_of.is_empty() {
        return Err(ResourceError::Empty {
            path: path.to_path_buf(),
        });
    }
    Ok(ConcretenessLexicon { rating_of })
}
