use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use super::{io_err, open, ResourceError};

/// Words ranked by descending corpus frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    ranked_words: Vec<String>,
    rank_of: HashMap<String, usize>,
}

impl FrequencyTable {
    /// Builds a table from words in rank order; later duplicates are ignored.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut ranked_words = Vec::new();
        let mut rank_of = HashMap::new();
        for w in words {
            let w = w.as_ref().to_lowercase();
            if let std::collections::hash_map::Entry::Vacant(slot) = rank_of.entry(w) {
                ranked_words.push(slot.key().clone());
                slot.insert(ranked_words.len());
            }
        }
        Self {
            ranked_words,
            rank_of,
        }
    }

    /// 1-based rank; unlisted words rank `len() + 1`.
    pub fn rank(&self, word: &str) -> usize {
        self.rank_of
            .get(word)
            .or_else(|| self.rank_of.get(&word.to_lowercase()))
            .copied()
            .unwrap_or(self.ranked_words.len() + 1)
    }

    pub fn len(&self) -> usize {
        self.ranked_words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked_words.is_empty()
    }

    pub fn ranked_words(&self) -> &[String] {
        &self.ranked_words
    }
}

/// Reads one word per line (optionally `word<TAB>count`), most frequent first.
pub fn load_frequency_table(path: &Path) -> Result<FrequencyTable, ResourceError> {
    let reader = open(path)?;
    let mut words = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(io_err(path))?;
        if let Some(word) = line.split('\t').next().map(str::trim) {
            if !word.is_empty() {
                words.push(word.to_string());
            }
        }
    }
    if words.is_empty() {
        return Err(ResourceError::Empty {
            path: path.to_path_buf(),
        });
    }
    Ok(FrequencyTable::from_words(words))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn ranks_and_oov() {
        let f = write("the\nof\nand\n");
        let t = load_frequency_table(f.path()).unwrap();
        assert_eq!(t.rank("and"), 3);
        assert_eq!(t.rank("The"), 1);
        assert_eq!(t.rank("zyzzyva"), 4);
    }

    #[test]
    fn duplicates_keep_first() {
        let f = write("the\t100\nof\t90\nand\t80\nto\t70\nthe\t5\n");
        let t = load_frequency_table(f.path()).unwrap();
        assert_eq!(t.rank("the"), 1);
        assert_eq!(t.len(), 4);
        assert_eq!(t.rank("unknown"), 5);
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write("\n\n");
        let err = load_frequency_table(f.path()).unwrap_err();
        assert!(matches!(err, ResourceError::Empty { .. }));
        assert!(err.to_string().contains(&f.path().display().to_string()));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_frequency_table(Path::new("/nonexistent/freq.txt")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/freq.txt"));
    }
}
