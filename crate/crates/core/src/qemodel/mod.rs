//! Combined quality model: standardize the features, project them on the
//! leading principal components, then fit a linear learner.

mod linear;
mod model_file;
mod pca;
mod standardize;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use linear::{
    fit_lasso, fit_linreg, fit_logistic, fit_ridge, logistic_loss_grad, majority_class, Classifier,
    ModelKind, Regressor, LASSO_TOL, LOGISTIC_GRAD_TOL, LOGISTIC_MAX_ITER,
};
pub use model_file::MODEL_FORMAT_VERSION;
pub use pca::PcaBasis;
pub use standardize::Standardizer;

use crate::features::FeatureMatrix;
use crate::qats_io::{Dimension, Label};
use crate::stats::{pearson, weighted_f1};

/// Regularisation strengths tried by [`select_lambda`].
pub const LAMBDA_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];
pub const DEFAULT_PCA_K: usize = 25;
pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum QeModelError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("{rows} feature rows but {targets} targets")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("PCA needs 1 <= k <= {max}, got {k}")]
    PcaK { k: usize, max: usize },
    #[error("regularisation strength must be finite and >= 0, got {0}")]
    Lambda(f64),
    #[error("least-squares system is singular (collinear inputs); use ridge instead")]
    Singular,
    #[error("classifier training data contains a single class")]
    SingleClass,
    #[error("{kind} needs {expected} targets")]
    TargetKind {
        kind: ModelKind,
        expected: &'static str,
    },
    #[error("cross-validation needs 2 <= folds <= rows ({rows}), got {folds}")]
    Folds { folds: usize, rows: usize },
    #[error("feature {0:?} required by the model is missing from the matrix")]
    MissingFeature(String),
    #[error("model file line {line}: {message}")]
    ModelFile { line: usize, message: String },
}

/// Training targets: real scores for regressors, labels for classifiers.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Scores(&'a [f64]),
    Labels(&'a [Label]),
}

impl Target<'_> {
    pub fn len(&self) -> usize {
        match self {
            Target::Scores(s) => s.len(),
            Target::Labels(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn scores(&self) -> Vec<f64> {
        match self {
            Target::Scores(s) => s.to_vec(),
            Target::Labels(l) => l.iter().map(|l| l.encode()).collect(),
        }
    }

    fn labels(&self, kind: ModelKind) -> Result<&[Label], QeModelError> {
        match self {
            Target::Labels(l) => Ok(l),
            Target::Scores(_) => Err(QeModelError::TargetKind {
                kind,
                expected: "class-label",
            }),
        }
    }

    fn subset(&self, idx: &[usize]) -> OwnedTarget {
        match self {
            Target::Scores(s) => OwnedTarget::Scores(idx.iter().map(|&i| s[i]).collect()),
            Target::Labels(l) => OwnedTarget::Labels(idx.iter().map(|&i| l[i]).collect()),
        }
    }
}

enum OwnedTarget {
    Scores(Vec<f64>),
    Labels(Vec<Label>),
}

impl OwnedTarget {
    fn view(&self) -> Target<'_> {
        match self {
            OwnedTarget::Scores(s) => Target::Scores(s),
            OwnedTarget::Labels(l) => Target::Labels(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predictions {
    Scores(Vec<f64>),
    Labels(Vec<Label>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinearModel {
    Regressor(Regressor),
    Classifier(Classifier),
    Majority(Label),
}

impl LinearModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            LinearModel::Regressor(r) => r.kind,
            LinearModel::Classifier(c) => c.kind,
            LinearModel::Majority(_) => ModelKind::Majority,
        }
    }

    fn predict(&self, z: &DMatrix<f64>) -> Predictions {
        match self {
            LinearModel::Regressor(r) => Predictions::Scores(r.predict(z)),
            LinearModel::Classifier(c) => Predictions::Labels(c.predict(z)),
            LinearModel::Majority(l) => Predictions::Labels(vec![*l; z.nrows()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub kind: ModelKind,
    /// `None` picks the strength from [`LAMBDA_GRID`] by cross-validation.
    pub lambda: Option<f64>,
    pub pca_k: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Ridge,
            lambda: None,
            pca_k: DEFAULT_PCA_K,
            folds: DEFAULT_FOLDS,
            seed: DEFAULT_SEED,
        }
    }
}

/// Standardizer, PCA basis and model fitted together on one feature set.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    pub dimension: Dimension,
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    pub pca: PcaBasis,
    pub model: LinearModel,
}

pub(crate) fn to_dmatrix(m: &FeatureMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.n_rows(), m.n_cols(), |i, j| m.rows()[i][j])
}

fn rows_of(x: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), x.ncols(), |i, j| x[(idx[i], j)])
}

/// Largest usable component count, warning when `requested` is clamped.
pub fn effective_k(requested: usize, rows: usize, cols: usize) -> usize {
    let max = rows.saturating_sub(1).min(cols);
    if requested > max {
        log::warn!("PCA k={requested} exceeds min(rows - 1, features) = {max}; using {max}");
        max
    } else {
        requested
    }
}

fn fit_on(
    x: &DMatrix<f64>,
    target: Target<'_>,
    kind: ModelKind,
    lambda: f64,
    pca_k: usize,
) -> Result<(Standardizer, PcaBasis, LinearModel), QeModelError> {
    if x.nrows() != target.len() {
        return Err(QeModelError::LengthMismatch {
            rows: x.nrows(),
            targets: target.len(),
        });
    }
    let standardizer = Standardizer::fit(x)?;
    let scaled = standardizer.transform(x);
    let k = effective_k(pca_k, x.nrows(), x.ncols());
    let pca = PcaBasis::fit(&scaled, k)?;
    let z = pca.project(&scaled);
    let model = match kind {
        ModelKind::LinReg => LinearModel::Regressor(fit_linreg(&z, &target.scores(), true)?),
        ModelKind::Ridge => LinearModel::Regressor(fit_ridge(&z, &target.scores(), lambda, true)?),
        ModelKind::Lasso => {
            let m = fit_lasso(&z, &target.scores(), lambda, true)?;
            if m.weights.iter().all(|&w| w == 0.0) {
                log::warn!(
                    "lasso with lambda={lambda} zeroed every weight; predictions are constant"
                );
            }
            LinearModel::Regressor(m)
        }
        ModelKind::Logistic => {
            LinearModel::Classifier(fit_logistic(&z, target.labels(kind)?, lambda)?)
        }
        ModelKind::Majority => LinearModel::Majority(majority_class(target.labels(kind)?)?),
    };
    Ok((standardizer, pca, model))
}

/// Fits the full pipeline; the regularisation strength comes from
/// `cfg.lambda` or, when absent, from [`select_lambda`].
pub fn fit_pipeline(
    matrix: &FeatureMatrix,
    target: Target<'_>,
    dimension: Dimension,
    cfg: &PipelineConfig,
) -> Result<TrainedPipeline, QeModelError> {
    let lambda = match (cfg.kind.has_lambda(), cfg.lambda) {
        (false, _) => 0.0,
        (true, Some(l)) => l,
        (true, None) => select_lambda(matrix, target, cfg)?.0,
    };
    let x = to_dmatrix(matrix);
    let (standardizer, pca, model) = fit_on(&x, target, cfg.kind, lambda, cfg.pca_k)?;
    Ok(TrainedPipeline {
        dimension,
        feature_names: matrix.feature_names().to_vec(),
        standardizer,
        pca,
        model,
    })
}

impl TrainedPipeline {
    /// Columns of `matrix` in the pipeline's feature order, matched by name.
    fn aligned(&self, matrix: &FeatureMatrix) -> Result<DMatrix<f64>, QeModelError> {
        let idx: Vec<usize> = self
            .feature_names
            .iter()
            .map(|n| {
                matrix
                    .column_index(n)
                    .ok_or_else(|| QeModelError::MissingFeature(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(DMatrix::from_fn(matrix.n_rows(), idx.len(), |i, j| {
            matrix.rows()[i][idx[j]]
        }))
    }

    fn predict_dense(&self, x: &DMatrix<f64>) -> Predictions {
        let z = self.pca.project(&self.standardizer.transform(x));
        self.model.predict(&z)
    }

    /// Predicts each row; columns are matched to the fitted features by
    /// name, so column order and extra columns do not matter.
    pub fn predict(&self, matrix: &FeatureMatrix) -> Result<Predictions, QeModelError> {
        Ok(self.predict_dense(&self.aligned(matrix)?))
    }

    pub fn lambda(&self) -> f64 {
        match &self.model {
            LinearModel::Regressor(r) => r.lambda,
            LinearModel::Classifier(c) => c.lambda,
            LinearModel::Majority(_) => 0.0,
        }
    }
}

/// Seeded shuffle dealt round-robin into `folds` parts, so fold sizes differ
/// by at most one.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>, QeModelError> {
    if folds < 2 || folds > n {
        return Err(QeModelError::Folds { folds, rows: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = vec![Vec::new(); folds];
    for (i, idx) in order.into_iter().enumerate() {
        out[i % folds].push(idx);
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvMetric {
    Pearson,
    WeightedF1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub metric: CvMetric,
    pub lambda: f64,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    /// Standardizer means of each fold's training part.
    pub fold_means: Vec<Vec<f64>>,
}

/// Scores predictions against the target: Pearson for scores (0 when
/// either side is constant), weighted F1 for labels.
pub fn score(pred: &Predictions, target: Target<'_>) -> f64 {
    match (pred, target) {
        (Predictions::Scores(p), t) => pearson(p, &t.scores()).unwrap_or(0.0),
        (Predictions::Labels(p), Target::Labels(g)) => weighted_f1(p, g).unwrap_or(0.0),
        (Predictions::Labels(p), Target::Scores(s)) => {
            let enc: Vec<f64> = p.iter().map(|l| l.encode()).collect();
            pearson(&enc, s).unwrap_or(0.0)
        }
    }
}

fn cv_with_lambda(
    x: &DMatrix<f64>,
    target: Target<'_>,
    cfg: &PipelineConfig,
    lambda: f64,
) -> Result<CvReport, QeModelError> {
    let folds = fold_assignment(x.nrows(), cfg.folds, cfg.seed)?;
    let results = (0..folds.len())
        .into_par_iter()
        .map(|f| {
            let test_idx = &folds[f];
            let train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, idx)| idx.iter().copied())
                .collect();
            let mut train_idx = train_idx;
            train_idx.sort_unstable();
            let train_t = target.subset(&train_idx);
            let test_t = target.subset(test_idx);
            let (st, pca, model) = fit_on(
                &rows_of(x, &train_idx),
                train_t.view(),
                cfg.kind,
                lambda,
                cfg.pca_k,
            )?;
            let z = pca.project(&st.transform(&rows_of(x, test_idx)));
            Ok((score(&model.predict(&z), test_t.view()), st.means))
        })
        .collect::<Result<Vec<_>, QeModelError>>()?;
    let (fold_scores, fold_means): (Vec<f64>, Vec<Vec<f64>>) = results.into_iter().unzip();
    let mean = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
    Ok(CvReport {
        metric: if cfg.kind.is_classifier() {
            CvMetric::WeightedF1
        } else {
            CvMetric::Pearson
        },
        lambda,
        fold_scores,
        mean,
        fold_means,
    })
}

/// K-fold cross-validation; every fold refits standardizer, PCA and model
/// on its training part only.
pub fn cross_validate(
    matrix: &FeatureMatrix,
    target: Target<'_>,
    cfg: &PipelineConfig,
) -> Result<CvReport, QeModelError> {
    let lambda = match (cfg.kind.has_lambda(), cfg.lambda) {
        (false, _) => 0.0,
        (true, Some(l)) => l,
        (true, None) => select_lambda(matrix, target, cfg)?.0,
    };
    cv_with_lambda(&to_dmatrix(matrix), target, cfg, lambda)
}

/// Picks the grid value with the best mean CV score (smallest on ties).
pub fn select_lambda(
    matrix: &FeatureMatrix,
    target: Target<'_>,
    cfg: &PipelineConfig,
) -> Result<(f64, Vec<(f64, f64)>), QeModelError> {
    let x = to_dmatrix(matrix);
    let mut scores = Vec::with_capacity(LAMBDA_GRID.len());
    for &l in &LAMBDA_GRID {
        scores.push((l, cv_with_lambda(&x, target, cfg, l)?.mean));
    }
    let mut best = scores[0];
    for &s in &scores[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    Ok((best.0, scores))
}
