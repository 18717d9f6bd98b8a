use std::str::FromStr;

use super::MetricConfigError;
use crate::textproc::{ngrams, TokenizedText};

/// Sentence-level BLEU smoothing, following the NLTK `SmoothingFunction`
/// catalogue (Chen & Cherry, 2014).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothing {
    /// Any zero precision makes the score 0.
    None,
    /// Add epsilon (0.1) to zero match counts.
    Method1,
    /// Add one to numerator and denominator for orders above 1.
    Method2,
    /// Zero counts become 1/2^k for the k-th zero (NIST geometric decay).
    Method3,
    /// Like method 3 but scaled by `ln(len)/5`, so short outputs get less.
    Method4,
    /// Average each precision with its neighbouring orders.
    Method5,
    /// Interpolate with a prior extrapolated from the two lower orders.
    Method6,
    /// Method 4 followed by method 5.
    Method7,
}

impl Smoothing {
    pub const ALL: [Smoothing; 8] = [
        Smoothing::None,
        Smoothing::Method1,
        Smoothing::Method2,
        Smoothing::Method3,
        Smoothing::Method4,
        Smoothing::Method5,
        Smoothing::Method6,
        Smoothing::Method7,
    ];
}

impl FromStr for Smoothing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "method0" | "0" => Ok(Smoothing::None),
            "method1" | "1" => Ok(Smoothing::Method1),
            "method2" | "2" => Ok(Smoothing::Method2),
            "method3" | "3" => Ok(Smoothing::Method3),
            "method4" | "4" => Ok(Smoothing::Method4),
            "method5" | "5" => Ok(Smoothing::Method5),
            "method6" | "6" => Ok(Smoothing::Method6),
            "method7" | "7" => Ok(Smoothing::Method7),
            other => Err(format!("unknown smoothing method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BleuConfig {
    max_order: usize,
    smoothing: Smoothing,
}

impl BleuConfig {
    pub fn new(max_order: usize, smoothing: Smoothing) -> Result<Self, MetricConfigError> {
        if !(1..=4).contains(&max_order) {
            return Err(MetricConfigError::BleuOrder(max_order));
        }
        Ok(Self {
            max_order,
            smoothing,
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self {
            max_order: 4,
            smoothing: Smoothing::None,
        }
    }
}

const METHOD1_EPSILON: f64 = 0.1;
const METHOD4_K: f64 = 5.0;
const METHOD6_ALPHA: f64 = 5.0;

/// Clipped match count and total candidate n-grams for one order.
#[derive(Debug, Clone, Copy)]
struct OrderCounts {
    matches: usize,
    total: usize,
}

impl OrderCounts {
    /// Denominator as NLTK keeps it: never below 1.
    fn denom(&self) -> f64 {
        self.total.max(1) as f64
    }

    fn precision(&self) -> f64 {
        self.matches as f64 / self.denom()
    }
}

fn order_counts(source: &TokenizedText, output: &TokenizedText, n: usize) -> OrderCounts {
    let reference = ngrams(source, n);
    let candidate = ngrams(output, n);
    let matches = candidate
        .counts
        .iter()
        .map(|(gram, &c)| c.min(reference.get(gram)))
        .sum();
    OrderCounts {
        matches,
        total: candidate.total(),
    }
}

fn method4(precisions: &mut [f64], counts: &[OrderCounts], hyp_len: usize) {
    let mut incvnt = 1;
    for (p, c) in precisions.iter_mut().zip(counts) {
        if c.matches == 0 && hyp_len > 1 {
            let numerator = 1.0 / (2f64.powi(incvnt) * METHOD4_K / (hyp_len as f64).ln());
            *p = numerator / c.denom();
            incvnt += 1;
        }
    }
}

fn method5(precisions: &mut [f64], next_order: f64) {
    let mut extended = precisions.to_vec();
    extended.push(next_order);
    let mut prev = precisions[0] + 1.0;
    for i in 0..precisions.len() {
        precisions[i] = (prev + extended[i] + extended[i + 1]) / 3.0;
        prev = precisions[i];
    }
}

/// Sentence BLEU of `output` (candidate) against `source` (reference).
///
/// Precisions are clipped n-gram precisions up to `cfg.max_order`, combined
/// by a uniform geometric mean and multiplied by the brevity penalty
/// `exp(min(0, 1 - |source| / |output|))`. An empty output, or one without
/// a single unigram match, scores 0 under every smoothing method. Smoothed
/// variants that overshoot 1 (methods 5 and 7 on near-identical pairs) are
/// clamped to 1.
pub fn bleu(source: &TokenizedText, output: &TokenizedText, cfg: &BleuConfig) -> f64 {
    let hyp_len = output.word_count();
    let ref_len = source.word_count();
    if hyp_len == 0 || ref_len == 0 {
        return 0.0;
    }
    let max_order = cfg.max_order;
    let counts: Vec<OrderCounts> = (1..=max_order)
        .map(|n| order_counts(source, output, n))
        .collect();
    if counts[0].matches == 0 {
        return 0.0;
    }

    let mut p: Vec<f64> = counts.iter().map(OrderCounts::precision).collect();
    match cfg.smoothing {
        Smoothing::None => {}
        Smoothing::Method1 => {
            for (p, c) in p.iter_mut().zip(&counts) {
                if c.matches == 0 {
                    *p = METHOD1_EPSILON / c.denom();
                }
            }
        }
        Smoothing::Method2 => {
            for (p, c) in p.iter_mut().zip(&counts).skip(1) {
                *p = (c.matches as f64 + 1.0) / (c.denom() + 1.0);
            }
        }
        Smoothing::Method3 => {
            let mut incvnt = 1;
            for (p, c) in p.iter_mut().zip(&counts) {
                if c.matches == 0 {
                    *p = 1.0 / (2f64.powi(incvnt) * c.denom());
                    incvnt += 1;
                }
            }
        }
        Smoothing::Method4 => method4(&mut p, &counts, hyp_len),
        Smoothing::Method5 => {
            let next = order_counts(source, output, max_order + 1).precision();
            method5(&mut p, next);
        }
        Smoothing::Method6 => {
            for i in 2..max_order {
                let prior = if p[i - 2] == 0.0 {
                    0.0
                } else {
                    p[i - 1] * p[i - 1] / p[i - 2]
                };
                let c = counts[i];
                p[i] =
                    (c.matches as f64 + METHOD6_ALPHA * prior) / (c.total as f64 + METHOD6_ALPHA);
            }
        }
        Smoothing::Method7 => {
            method4(&mut p, &counts, hyp_len);
            let next = order_counts(source, output, max_order + 1).precision();
            method5(&mut p, next);
        }
    }

    if p.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    let log_mean = p.iter().map(|v| v.ln()).sum::<f64>() / max_order as f64;
    let brevity = (1.0 - ref_len as f64 / hyp_len as f64).min(0.0).exp();
    (brevity * log_mean.exp()).clamp(0.0, 1.0)
}
