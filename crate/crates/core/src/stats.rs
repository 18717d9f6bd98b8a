//! Pearson correlation, Fisher confidence intervals, feature ranking and
//! weighted F1.

use std::cmp::Ordering;
use std::fmt::Write as _;

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::features::FeatureMatrix;
use crate::qats_io::{Dimension, Label};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("correlation undefined: zero variance")]
    ZeroVariance,
    #[error("confidence level must lie in (0, 1), got {0}")]
    Level(f64),
    #[error("correlation {0} outside [-1, 1]")]
    Correlation(f64),
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Fisher z-transform interval for a correlation `r` observed on `n` pairs.
/// `|r| = 1` gives the degenerate interval `(r, r)`.
pub fn fisher_ci(r: f64, n: usize, level: f64) -> Result<(f64, f64), StatsError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::Level(level));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(StatsError::Correlation(r));
    }
    if n < 4 {
        return Err(StatsError::TooFew { needed: 4, got: n });
    }
    if r.abs() == 1.0 {
        return Ok((r, r));
    }
    let z_crit = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let z = r.atanh();
    let half = z_crit / ((n - 3) as f64).sqrt();
    Ok(((z - half).tanh(), (z + half).tanh()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub feature_name: String,
    pub dimension: Dimension,
    pub r_train: f64,
    pub r_test: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// The training column (or labels) had zero variance; `r_train` is 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingTable {
    pub dimension: Dimension,
    pub entries: Vec<CorrelationReport>,
}

/// Correlation of each training column with `labels`, ranked by descending
/// `|r|` (ties by name). When `test` is given, the same-named test column is
/// correlated with the test labels.
pub fn rank_features(
    train: &FeatureMatrix,
    labels: &[f64],
    dimension: Dimension,
    test: Option<(&FeatureMatrix, &[f64])>,
    ci_level: f64,
) -> Result<RankingTable, StatsError> {
    if train.n_rows() != labels.len() {
        return Err(StatsError::LengthMismatch(train.n_rows(), labels.len()));
    }
    if let Some((m, y)) = test {
        if m.n_rows() != y.len() {
            return Err(StatsError::LengthMismatch(m.n_rows(), y.len()));
        }
    }
    let mut entries = Vec::with_capacity(train.n_cols());
    for (j, name) in train.feature_names().iter().enumerate() {
        let col = train.column(j);
        let (r_train, degenerate) = match pearson(&col, labels) {
            Ok(r) => (r, false),
            Err(StatsError::ZeroVariance) => (0.0, true),
            Err(e) => return Err(e),
        };
        let (ci_low, ci_high) = if degenerate {
            (None, None)
        } else {
            match fisher_ci(r_train, labels.len(), ci_level) {
                Ok((lo, hi)) => (Some(lo), Some(hi)),
                Err(StatsError::TooFew { .. }) => (None, None),
                Err(e) => return Err(e),
            }
        };
        let r_test = test.and_then(|(m, y)| {
            let k = m.column_index(name)?;
            pearson(&m.column(k), y).ok()
        });
        entries.push(CorrelationReport {
            feature_name: name.clone(),
            dimension,
            r_train,
            r_test,
            ci_low,
            ci_high,
            degenerate,
        });
    }
    entries.sort_by(|a, b| {
        b.r_train
            .abs()
            .partial_cmp(&a.r_train.abs())
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.feature_name.cmp(&b.feature_name))
    });
    Ok(RankingTable { dimension, entries })
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(String::new, |x| format!("{x:.prec$}"))
}

impl RankingTable {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("rank\tfeature\tr_train\tci_low\tci_high\tr_test\n");
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                e.feature_name,
                e.r_train,
                e.ci_low.map_or_else(String::new, |v| v.to_string()),
                e.ci_high.map_or_else(String::new, |v| v.to_string()),
                e.r_test.map_or_else(String::new, |v| v.to_string()),
            );
        }
        s
    }

    /// Markdown table of the first `top` entries (all when `None`).
    pub fn to_markdown(&self, top: Option<usize>) -> String {
        let mut s = format!("### {}\n\n", self.dimension.long_name());
        s.push_str("| rank | feature | r_train | ci_low | ci_high | r_test |\n");
        s.push_str("|---:|---|---:|---:|---:|---:|\n");
        let n = top.unwrap_or(self.entries.len());
        for (i, e) in self.entries.iter().take(n).enumerate() {
            let flag = if e.degenerate { " (constant)" } else { "" };
            let _ = writeln!(
                s,
                "| {} | {}{} | {:.2} | {} | {} | {} |",
                i + 1,
                e.feature_name,
                flag,
                e.r_train,
                opt(e.ci_low, 2),
                opt(e.ci_high, 2),
                opt(e.r_test, 2),
            );
        }
        s
    }
}

/// Per-class F1 averaged with weights equal to gold class frequencies.
/// Classes that never occur in gold carry no weight.
pub fn weighted_f1(predicted: &[Label], gold: &[Label]) -> Result<f64, StatsError> {
    if predicted.len() != gold.len() {
        return Err(StatsError::LengthMismatch(predicted.len(), gold.len()));
    }
    if gold.is_empty() {
        return Err(StatsError::TooFew { needed: 1, got: 0 });
    }
    let mut tp = [0usize; 3];
    let mut pred_n = [0usize; 3];
    let mut gold_n = [0usize; 3];
    for (p, g) in predicted.iter().zip(gold) {
        pred_n[p.index()] += 1;
        gold_n[g.index()] += 1;
        if p == g {
            tp[p.index()] += 1;
        }
    }
    let mut total = 0.0;
    for c in 0..3 {
        if gold_n[c] == 0 || tp[c] == 0 {
            continue;
        }
        let f1 = 2.0 * tp[c] as f64 / (pred_n[c] + gold_n[c]) as f64;
        total += gold_n[c] as f64 * f1;
    }
    Ok(total / gold.len() as f64)
}
