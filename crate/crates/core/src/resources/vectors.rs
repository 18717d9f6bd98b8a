use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use super::{io_err, open, ResourceError};

/// Pre-trained word vectors, all of length `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectors {
    dim: usize,
    vector_of: HashMap<String, Vec<f64>>,
}

impl WordVectors {
    /// Builds from `(word, vector)` entries; `None` if the lengths disagree or
    /// there are no entries.
    pub fn from_entries<I, S>(entries: I) -> Option<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let mut dim = None;
        let mut vector_of = HashMap::new();
        for (word, v) in entries {
            if *dim.get_or_insert(v.len()) != v.len() || v.is_empty() {
                return None;
            }
            vector_of.entry(word.as_ref().to_lowercase()).or_insert(v);
        }
        Some(Self {
            dim: dim?,
            vector_of,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vector_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector_of.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vector_of
            .get(word)
            .or_else(|| self.vector_of.get(&word.to_lowercase()))
            .map(Vec::as_slice)
    }

    /// Unweighted mean of the in-vocabulary words' vectors.
    pub fn mean_vector<'a, I: IntoIterator<Item = &'a str>>(&self, words: I) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for v in words.into_iter().filter_map(|w| self.get(w)) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
        (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
    }
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Loads text-format vectors: an optional `count dim` header, then
/// `word v1 ... vdim` per line.
pub fn load_vectors(path: &Path) -> Result<WordVectors, ResourceError> {
    load(path, None)
}

/// Like [`load_vectors`] but keeps only words in `keep` (lowercase). Every
/// line is still validated.
pub fn load_vectors_filtered(
    path: &Path,
    keep: &HashSet<String>,
) -> Result<WordVectors, ResourceError> {
    load(path, Some(keep))
}

fn is_header(fields: &[&str]) -> bool {
    fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok())
}

fn load(path: &Path, keep: Option<&HashSet<String>>) -> Result<WordVectors, ResourceError> {
    let reader = open(path)?;
    let mut header_dim = None;
    let mut dim = None;
    let mut vector_of = HashMap::new();

    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let line_no = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if line_no == 1 && is_header(&fields) {
            header_dim = fields[1].parse::<usize>().ok();
            continue;
        }
        let found = fields.len() - 1;
        let expected = *dim.get_or_insert(header_dim.unwrap_or(found));
        if found != expected || found == 0 {
            return Err(ResourceError::DimensionMismatch {
                path: path.to_path_buf(),
                line: line_no,
                expected,
                found,
            });
        }
        let word = fields[0].to_lowercase();
        if vector_of.contains_key(&word) || keep.is_some_and(|k| !k.contains(&word)) {
            continue;
        }
        let v = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ResourceError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("invalid vector component: {e}"),
            })?;
        vector_of.insert(word, v);
    }

    match dim {
        Some(dim) => Ok(WordVectors { dim, vector_of }),
        None => Err(ResourceError::Empty {
            path: path.to_path_buf(),
        }),
    }
}
