//! Seeded synthetic QATS-like data and resources for tests that cannot use
//! the real dataset.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SyntheticPair {
    pub source: String,
    pub output: String,
    /// G, M, S labels as lowercase strings.
    pub labels: [&'static str; 4],
}

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ser", "tan", "vo", "ri", "pel", "dun", "sha", "ne", "qua", "bri", "tol",
    "fen", "gra", "hu", "jor", "wix", "ze",
];

pub fn vocabulary(size: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = Vec::with_capacity(size);
    let mut seen = std::collections::HashSet::new();
    while words.len() < size {
        let n = rng.random_range(1..=4);
        let w: String = (0..n)
            .map(|_| *SYLLABLES.choose(&mut rng).unwrap())
            .collect();
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

/// Zipf-like draw: low indices are far more frequent.
fn draw<'a>(rng: &mut ChaCha8Rng, vocab: &'a [String]) -> &'a str {
    let u: f64 = rng.random_range(0.0..1.0);
    let i = ((vocab.len() as f64).powf(u) - 1.0) as usize;
    &vocab[i.min(vocab.len() - 1)]
}

fn sentence(rng: &mut ChaCha8Rng, vocab: &[String], len: usize) -> Vec<String> {
    (0..len).map(|_| draw(rng, vocab).to_string()).collect()
}

fn render(sentences: &[Vec<String>]) -> String {
    sentences
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let mut t = s.join(" ");
            if let Some(first) = t.get_mut(0..1) {
                first.make_ascii_uppercase();
            }
            t + "."
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn label(score: f64) -> &'static str {
    if score > 0.66 {
        "good"
    } else if score > 0.33 {
        "ok"
    } else {
        "bad"
    }
}

/// Source sentences of 12–40 words and outputs produced by deleting,
/// substituting, reordering and splitting, with labels tied to the edits.
pub fn pairs(n: usize, seed: u64) -> Vec<SyntheticPair> {
    let vocab = vocabulary(2000, seed ^ 0x5eed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.random_range(12..=40);
            let src = sentence(&mut rng, &vocab, len);
            let keep = rng.random_range(0.35..1.0);
            let sub = rng.random_range(0.0..0.3);
            let mut out: Vec<String> = Vec::with_capacity(src.len());
            for w in &src {
                if !rng.random_bool(keep) {
                    continue;
                }
                if rng.random_bool(sub) {
                    out.push(draw(&mut rng, &vocab).to_string());
                } else {
                    out.push(w.clone());
                }
            }
            if out.is_empty() {
                out.push(src[0].clone());
            }
            let scrambled = rng.random_bool(0.2);
            if scrambled {
                let cut = rng.random_range(0..out.len());
                out.rotate_left(cut);
            }
            let split = out.len() > 8 && rng.random_bool(0.4);
            let sentences = if split {
                let mid = out.len() / 2;
                vec![out[..mid].to_vec(), out[mid..].to_vec()]
            } else {
                vec![out.clone()]
            };
            let noise = |rng: &mut ChaCha8Rng| rng.random_range(-0.15..0.15);
            let meaning = keep * (1.0 - sub) + noise(&mut rng);
            let grammar = 1.0 - sub - if scrambled { 0.4 } else { 0.0 } + noise(&mut rng);
            let per_sent = out.len() as f64 / sentences.len() as f64;
            let simplicity = 1.2 - per_sent / 30.0 + noise(&mut rng);
            let overall = (meaning + grammar + simplicity) / 3.0;
            SyntheticPair {
                source: render(&[src]),
                output: render(&sentences),
                labels: [
                    label(grammar),
                    label(meaning),
                    label(simplicity),
                    label(overall),
                ],
            }
        })
        .collect()
}

pub fn write_dataset(path: &Path, pairs: &[SyntheticPair]) {
    let mut s = String::from("original\tsimplified\tG\tM\tS\tOverall\n");
    for p in pairs {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            p.source, p.output, p.labels[0], p.labels[1], p.labels[2], p.labels[3]
        );
    }
    std::fs::write(path, s).unwrap();
}

/// Writes frequency table, concreteness list, 300-d vectors and an LM
/// corpus over the synthetic vocabulary into `dir`.
pub fn write_resources(dir: &Path, seed: u64) -> [PathBuf; 4] {
    let vocab = vocabulary(2000, seed ^ 0x5eed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let freq = dir.join("frequency.txt");
    std::fs::write(&freq, vocab.join("\n") + "\n").unwrap();

    let conc = dir.join("concreteness.tsv");
    let mut s = String::from("Word\tBigram\tConc.M\tConc.SD\n");
    for w in &vocab {
        let _ = writeln!(s, "{w}\t0\t{:.2}\t1.0", rng.random_range(1.0..5.0));
    }
    std::fs::write(&conc, s).unwrap();

    let vectors = dir.join("vectors.vec");
    let mut s = format!("{} 300\n", vocab.len());
    for w in &vocab {
        s.push_str(w);
        for _ in 0..300 {
            let _ = write!(s, " {:.4}", rng.random_range(-1.0..1.0));
        }
        s.push('\n');
    }
    std::fs::write(&vectors, s).unwrap();

    let corpus = dir.join("lm_corpus.txt");
    let mut lines: Vec<String> = (0..5000)
        .map(|_| {
            let len = rng.random_range(5..25);
            sentence(&mut rng, &vocab, len).join(" ")
        })
        .collect();
    lines.shuffle(&mut rng);
    std::fs::write(&corpus, lines.join("\n") + "\n").unwrap();
    [freq, conc, vectors, corpus]
}
