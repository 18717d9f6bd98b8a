use std::collections::HashMap;

use crate::textproc::TokenizedText;

/// TER-style edit counts of turning the output into the source.
///
/// Deletions are source words the output lacks; insertions are extra output
/// words.
#[derive(Debug, Clone, PartialEq)]
pub struct EditBreakdown {
    pub insertions: usize,
    pub deletions: usize,
    pub substitutions: usize,
    pub shifts: usize,
    pub matches: usize,
    pub num_errors: usize,
    /// `num_errors / |source|`; may exceed 1 for long outputs.
    pub normalized_score: f64,
}

/// Longest block considered for a single shift.
const MAX_SHIFT_LEN: usize = 10;

/// Word-level Levenshtein distance with unit costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Default, Clone, Copy)]
struct Ops {
    insertions: usize,
    deletions: usize,
    substitutions: usize,
    matches: usize,
}

/// Full DP table plus a backtrace preferring match/substitution, then
/// deletion, then insertion.
fn edit_ops(hyp: &[u32], reference: &[u32]) -> Ops {
    let (n, m) = (hyp.len(), reference.len());
    let width = m + 1;
    let mut d = vec![0usize; (n + 1) * width];
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        d[i * width] = i;
        for j in 1..=m {
            let sub = d[(i - 1) * width + j - 1] + usize::from(hyp[i - 1] != reference[j - 1]);
            let ins = d[(i - 1) * width + j] + 1;
            let del = d[i * width + j - 1] + 1;
            d[i * width + j] = sub.min(ins).min(del);
        }
    }

    let mut ops = Ops::default();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * width + j];
        if i > 0 && j > 0 {
            let same = hyp[i - 1] == reference[j - 1];
            if here == d[(i - 1) * width + j - 1] + usize::from(!same) {
                if same {
                    ops.matches += 1;
                } else {
                    ops.substitutions += 1;
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if j > 0 && here == d[i * width + j - 1] + 1 {
            ops.deletions += 1;
            j -= 1;
        } else {
            ops.insertions += 1;
            i -= 1;
        }
    }
    ops
}

fn shifted(hyp: &[u32], start: usize, len: usize, dest: usize) -> Vec<u32> {
    let mut rest: Vec<u32> = Vec::with_capacity(hyp.len());
    rest.extend_from_slice(&hyp[..start]);
    rest.extend_from_slice(&hyp[start + len..]);
    let mut out = Vec::with_capacity(hyp.len());
    out.extend_from_slice(&rest[..dest]);
    out.extend_from_slice(&hyp[start..start + len]);
    out.extend_from_slice(&rest[dest..]);
    out
}

fn occurs_in(block: &[u32], reference: &[u32]) -> bool {
    reference.windows(block.len()).any(|w| w == block)
}

/// One greedy step: the block move with the largest edit-distance reduction,
/// if it pays for its own cost. Ties prefer longer blocks, then earlier
/// starts, then earlier destinations.
fn best_shift(hyp: &[u32], reference: &[u32], current: usize) -> Option<(Vec<u32>, usize)> {
    let n = hyp.len();
    let mut best: Option<(Vec<u32>, usize)> = None;
    for len in (1..=MAX_SHIFT_LEN.min(n)).rev() {
        for start in 0..=n - len {
            let block = &hyp[start..start + len];
            // A block that matches nothing in the source cannot create matches.
            if !occurs_in(block, reference) {
                continue;
            }
            for dest in 0..=n - len {
                if dest == start {
                    continue;
                }
                let candidate = shifted(hyp, start, len, dest);
                let dist = levenshtein(&candidate, reference);
                let threshold = best.as_ref().map_or(current, |(_, d)| *d + 1);
                if dist + 1 < threshold {
                    best = Some((candidate, dist));
                }
            }
        }
    }
    best
}

/// Outputs up to this length get an exact search on top of the greedy pass.
const EXACT_SEARCH_MAX_LEN: usize = 8;
/// Arrangements visited by the exact search before it settles.
const EXACT_SEARCH_BUDGET: usize = 200_000;

fn all_moves(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (1..n).flat_map(move |len| {
        (0..=n - len).flat_map(move |start| {
            (0..=n - len)
                .filter(move |&dest| dest != start)
                .map(move |dest| (start, len, dest))
        })
    })
}

/// Lower bound on the edit distance between any rearrangement of `hyp` and
/// `reference`: block moves never change the multiset of words.
fn multiset_bound(hyp: &[u32], reference: &[u32]) -> usize {
    let mut counts: HashMap<u32, isize> = HashMap::new();
    for &w in hyp {
        *counts.entry(w).or_default() += 1;
    }
    let mut common = 0;
    for &w in reference {
        let c = counts.entry(w).or_default();
        if *c > 0 {
            common += 1;
        }
        *c -= 1;
    }
    hyp.len().max(reference.len()) - common
}

struct Best {
    total: usize,
    shifts: usize,
    arrangement: Vec<u32>,
}

/// Depth-first branch and bound over block-move sequences, pruned by the
/// multiset bound and a table of the shallowest depth at which each
/// arrangement was reached.
struct ExactSearch<'a> {
    reference: &'a [u32],
    floor: usize,
    seen: HashMap<Vec<u32>, usize>,
    best: Best,
}

impl ExactSearch<'_> {
    fn dfs(&mut self, arrangement: &[u32], depth: usize) {
        let total = depth + levenshtein(arrangement, self.reference);
        if (total, depth) < (self.best.total, self.best.shifts) {
            self.best = Best {
                total,
                shifts: depth,
                arrangement: arrangement.to_vec(),
            };
        }
        if depth + 1 + self.floor >= self.best.total {
            return;
        }
        for (start, len, dest) in all_moves(arrangement.len()) {
            if self.seen.len() >= EXACT_SEARCH_BUDGET {
                return;
            }
            let next = shifted(arrangement, start, len, dest);
            match self.seen.get(&next) {
                Some(&d) if d <= depth + 1 => continue,
                _ => {}
            }
            self.seen.insert(next.clone(), depth + 1);
            self.dfs(&next, depth + 1);
        }
    }
}

/// Block-shift edit alignment over interned token ids: greedy shifts, then
/// for short outputs a bounded exact search seeded with the greedy result.
fn align_ids(hyp: &[u32], reference: &[u32]) -> EditBreakdown {
    let mut current = hyp.to_vec();
    let mut dist = levenshtein(&current, reference);
    let mut shifts = 0;
    while dist > 0 {
        match best_shift(&current, reference, dist) {
            Some((next, d)) => {
                current = next;
                dist = d;
                shifts += 1;
            }
            None => break,
        }
    }

    let floor = multiset_bound(hyp, reference);
    if hyp.len() <= EXACT_SEARCH_MAX_LEN && shifts + dist > floor {
        let mut search = ExactSearch {
            reference,
            floor,
            seen: HashMap::from([(hyp.to_vec(), 0)]),
            best: Best {
                total: shifts + dist,
                shifts,
                arrangement: current.clone(),
            },
        };
        search.dfs(hyp, 0);
        current = search.best.arrangement;
        shifts = search.best.shifts;
    }

    let ops = edit_ops(&current, reference);
    let num_errors = ops.insertions + ops.deletions + ops.substitutions + shifts;
    let normalized_score = if reference.is_empty() {
        num_errors as f64
    } else {
        num_errors as f64 / reference.len() as f64
    };
    EditBreakdown {
        insertions: ops.insertions,
        deletions: ops.deletions,
        substitutions: ops.substitutions,
        shifts,
        matches: ops.matches,
        num_errors,
        normalized_score,
    }
}

fn intern<'a, S: AsRef<str>>(words: &'a [S], ids: &mut HashMap<&'a str, u32>) -> Vec<u32> {
    words
        .iter()
        .map(|w| {
            let next = ids.len() as u32;
            *ids.entry(w.as_ref()).or_insert(next)
        })
        .collect()
}

/// TER alignment over raw token slices (source is the reference).
pub fn ter_align_tokens<S: AsRef<str>>(source: &[S], output: &[S]) -> EditBreakdown {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let reference = intern(source, &mut ids);
    let hyp = intern(output, &mut ids);
    align_ids(&hyp, &reference)
}

pub fn ter_align(source: &TokenizedText, output: &TokenizedText) -> EditBreakdown {
    ter_align_tokens(&source.flat_words(), &output.flat_words())
}
