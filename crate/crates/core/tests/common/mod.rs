//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod synthetic;

use std::collections::{HashMap, VecDeque};

/// Plain unit-cost Levenshtein, written independently of the library.
pub fn naive_levenshtein(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        if let Some(&v) = memo.get(&(a.len(), b.len())) {
            return v;
        }
        let cost = usize::from(a[0] != b[0]);
        let v = (go(&a[1..], &b[1..], memo) + cost)
            .min(go(&a[1..], b, memo) + 1)
            .min(go(a, &b[1..], memo) + 1);
        memo.insert((a.len(), b.len()), v);
        v
    }
    go(a, b, &mut HashMap::new())
}

/// Every arrangement reachable from `start` by block moves, with the
/// minimum number of moves needed (breadth-first search).
pub fn block_move_distances(start: &[u8]) -> HashMap<Vec<u8>, usize> {
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(start.to_vec(), 0);
    queue.push_back(start.to_vec());
    while let Some(cur) = queue.pop_front() {
        let d = seen[&cur];
        let n = cur.len();
        for len in 1..=n {
            for s in 0..=n - len {
                let block = cur[s..s + len].to_vec();
                let mut rest = cur[..s].to_vec();
                rest.extend_from_slice(&cur[s + len..]);
                for dest in 0..=rest.len() {
                    let mut next = rest[..dest].to_vec();
                    next.extend_from_slice(&block);
                    next.extend_from_slice(&rest[dest..]);
                    if !seen.contains_key(&next) {
                        seen.insert(next.clone(), d + 1);
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    seen
}

/// Minimum over all shift sequences of (#shifts + edit distance to source).
pub fn exhaustive_ter_errors(source: &[u8], output: &[u8]) -> usize {
    block_move_distances(output)
        .into_iter()
        .map(|(arr, shifts)| shifts + naive_levenshtein(&arr, source))
        .min()
        .unwrap()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues and the matching unit eigenvectors (as columns of the
/// returned row-major matrix), unsorted.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Sample covariance (n - 1 denominator) of row-major data.
pub fn sample_covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    rows.iter()
                        .map(|r| (r[a] - mean[a]) * (r[b] - mean[b]))
                        .sum::<f64>()
                        / (n - 1.0)
                })
                .collect()
        })
        .collect()
}

/// Weighted F1 from an explicit confusion matrix over classes `0..k`.
pub fn brute_force_weighted_f1(pred: &[usize], gold: &[usize], k: usize) -> f64 {
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &g) in pred.iter().zip(gold) {
        confusion[g][p] += 1;
    }
    let mut total = 0.0;
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let predicted: f64 = (0..k).map(|g| confusion[g][c] as f64).sum();
        let actual: f64 = confusion[c].iter().sum::<usize>() as f64;
        let precision = if predicted > 0.0 { tp / predicted } else { 0.0 };
        let recall = if actual > 0.0 { tp / actual } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        total += f1 * actual;
    }
    total / gold.len() as f64
}

/// Central finite-difference gradient of `f` at `x`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut up = x.to_vec();
            up[i] += h;
            let mut down = x.to_vec();
            down[i] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

/// BLEU with one order and no smoothing computed by direct counting.
pub fn hand_bleu(source: &[&str], output: &[&str], max_order: usize) -> f64 {
    if output.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=max_order {
        if output.len() < n {
            return 0.0;
        }
        let mut matched = 0;
        let mut total = 0;
        let src_grams: Vec<&[&str]> = source.windows(n).collect();
        let mut used = vec![false; src_grams.len()];
        for g in output.windows(n) {
            total += 1;
            if let Some(i) = (0..src_grams.len()).find(|&i| !used[i] && src_grams[i] == g) {
                used[i] = true;
                matched += 1;
            }
        }
        if matched == 0 {
            return 0.0;
        }
        log_sum += (matched as f64 / total as f64).ln();
    }
    let bp = (1.0 - source.len() as f64 / output.len() as f64)
        .min(0.0)
        .exp();
    bp * (log_sum / max_order as f64).exp()
}
