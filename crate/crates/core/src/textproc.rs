//! Tokenization, sentence splitting, syllable counting and n-gram extraction.
//!
//! Rules:
//! - text is split on whitespace into chunks;
//! - leading and trailing punctuation characters (Unicode `P*` categories) are
//!   detached from each chunk, one punctuation token per character;
//! - whatever remains is a word token, lowercased; internal apostrophes,
//!   hyphens and periods stay inside the word;
//! - a sentence ends at a chunk whose trailing punctuation contains `.`, `!`
//!   or `?` (the chunk is by construction followed by whitespace or the end
//!   of the text).

use std::collections::HashMap;

use unicode_general_category::{get_general_category, GeneralCategory};

/// A tokenized piece of text: word tokens grouped into sentences plus the
/// detached punctuation tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedText {
    pub raw: String,
    pub sentences: Vec<Vec<String>>,
    pub punct_tokens: Vec<String>,
    /// Characters over all word and punctuation tokens.
    pub char_count: usize,
}

impl TokenizedText {
    /// Iterates over all word tokens, sentence boundaries flattened.
    pub fn words(&self) -> impl Iterator<Item = &str> + '_ {
        self.sentences.iter().flatten().map(String::as_str)
    }

    /// Flattened word sequence.
    pub fn flat_words(&self) -> Vec<&str> {
        self.words().collect()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word_count() == 0
    }

    /// Syllables summed over every word token.
    pub fn syllable_count(&self) -> usize {
        self.words().map(count_syllables).sum()
    }
}

/// True for characters in any Unicode punctuation category (`Pc`, `Pd`, `Ps`,
/// `Pe`, `Pi`, `Pf`, `Po`).
///
/// For ASCII this is exactly ``!"#%&'()*,-./:;?@[\]_{}``; symbols such as
/// `$`, `+`, `<`, `=`, `>`, `^`, `` ` ``, `|` and `~` are not punctuation.
pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

fn is_sentence_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

pub fn tokenize(text: &str) -> TokenizedText {
    let mut sentences = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut punct_tokens = Vec::new();
    let mut char_count = 0;

    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let start = chars
            .iter()
            .position(|&c| !is_punctuation(c))
            .unwrap_or(chars.len());
        let end = chars
            .iter()
            .rposition(|&c| !is_punctuation(c))
            .map_or(start, |i| i + 1);

        for &c in &chars[..start] {
            punct_tokens.push(c.to_string());
            char_count += 1;
        }
        if start < end {
            let word: String = chars[start..end].iter().collect::<String>().to_lowercase();
            char_count += word.chars().count();
            current.push(word);
        }
        let mut ends_sentence = false;
        for &c in &chars[end.max(start)..] {
            ends_sentence |= is_sentence_terminal(c);
            punct_tokens.push(c.to_string());
            char_count += 1;
        }
        // An all-punctuation chunk such as "?" or "..." also terminates.
        if start == chars.len() {
            ends_sentence = chars.iter().any(|&c| is_sentence_terminal(c));
        }
        if ends_sentence && !current.is_empty() {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }

    TokenizedText {
        raw: text.to_string(),
        sentences,
        punct_tokens,
        char_count,
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Heuristic English syllable count.
///
/// Counts maximal groups of `a e i o u y`, then drops one for a terminal
/// silent `e` (a final `e` after a non-vowel), except for a consonant + `le`
/// ending. Never returns less than 1; tokens without letters count as 1.
pub fn count_syllables(word: &str) -> usize {
    let letters: Vec<char> = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    if letters.is_empty() {
        return 1;
    }

    let mut groups: usize = 0;
    let mut in_group = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }

    let n = letters.len();
    if n >= 2 && letters[n - 1] == 'e' && !is_vowel(letters[n - 2]) {
        let consonant_le = n >= 3 && letters[n - 2] == 'l' && !is_vowel(letters[n - 3]);
        if !consonant_le {
            groups = groups.saturating_sub(1);
        }
    }
    groups.max(1)
}

/// Multiset of n-grams of one order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramProfile {
    pub order: usize,
    pub counts: HashMap<Vec<String>, usize>,
}

impl NgramProfile {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn get(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }
}

/// N-grams of order `n` within each sentence; none cross a sentence boundary.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn ngrams(text: &TokenizedText, n: usize) -> NgramProfile {
    assert!(n >= 1, "n-gram order must be at least 1");
    let mut counts = HashMap::new();
    for sentence in &text.sentences {
        for window in sentence.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    NgramProfile { order: n, counts }
}
