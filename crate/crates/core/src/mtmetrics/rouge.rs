use crate::textproc::TokenizedText;

/// Length of the longest common subsequence of two token sequences.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Sentence-level ROUGE-L F1 between the flattened source and output.
pub fn rouge(source: &TokenizedText, output: &TokenizedText) -> f64 {
    let src = source.flat_words();
    let out = output.flat_words();
    let lcs = lcs_len(&src, &out);
    if lcs == 0 {
        return 0.0;
    }
    let precision = lcs as f64 / out.len() as f64;
    let recall = lcs as f64 / src.len() as f64;
    2.0 * precision * recall / (precision + recall)
}
