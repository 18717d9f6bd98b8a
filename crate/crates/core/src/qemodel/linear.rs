use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use super::QeModelError;
use crate::qats_io::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    LinReg,
    Ridge,
    Lasso,
    Logistic,
    /// Always predicts the most frequent training label.
    Majority,
}

impl ModelKind {
    pub fn is_classifier(self) -> bool {
        matches!(self, ModelKind::Logistic | ModelKind::Majority)
    }

    pub fn has_lambda(self) -> bool {
        matches!(
            self,
            ModelKind::Ridge | ModelKind::Lasso | ModelKind::Logistic
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::LinReg => "linreg",
            ModelKind::Ridge => "ridge",
            ModelKind::Lasso => "lasso",
            ModelKind::Logistic => "logistic",
            ModelKind::Majority => "majority",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linreg" | "linear" => Ok(ModelKind::LinReg),
            "ridge" => Ok(ModelKind::Ridge),
            "lasso" => Ok(ModelKind::Lasso),
            "logistic" => Ok(ModelKind::Logistic),
            "majority" => Ok(ModelKind::Majority),
            other => Err(format!(
                "unknown model {other:?}; expected linreg, ridge, lasso, logistic or majority"
            )),
        }
    }
}

/// Lasso stops once no coordinate moves more than this in a sweep.
pub const LASSO_TOL: f64 = 1e-7;
const LASSO_MAX_SWEEPS: usize = 100_000;
/// Logistic training stops below this gradient norm.
pub const LOGISTIC_GRAD_TOL: f64 = 1e-6;
pub const LOGISTIC_MAX_ITER: usize = 5_000;

/// Linear regressor `y = w·x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    pub kind: ModelKind,
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl Regressor {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<f64> {
        x.row_iter()
            .map(|r| self.intercept + r.iter().zip(&self.weights).map(|(v, w)| v * w).sum::<f64>())
            .collect()
    }
}

fn check_shapes(x: &DMatrix<f64>, n: usize, lambda: f64) -> Result<(), QeModelError> {
    if x.nrows() != n {
        return Err(QeModelError::LengthMismatch {
            rows: x.nrows(),
            targets: n,
        });
    }
    if x.nrows() == 0 {
        return Err(QeModelError::TooFewRows { needed: 1, got: 0 });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(QeModelError::Lambda(lambda));
    }
    Ok(())
}

/// Centers `x` and `y` when an intercept is fitted.
fn center(
    x: &DMatrix<f64>,
    y: &[f64],
    intercept: bool,
) -> (DMatrix<f64>, DVector<f64>, Vec<f64>, f64) {
    let n = x.nrows();
    if !intercept {
        return (
            x.clone(),
            DVector::from_column_slice(y),
            vec![0.0; x.ncols()],
            0.0,
        );
    }
    let xm: Vec<f64> = x.column_iter().map(|c| c.mean()).collect();
    let ym = y.iter().sum::<f64>() / n as f64;
    let xc = DMatrix::from_fn(n, x.ncols(), |i, j| x[(i, j)] - xm[j]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - ym));
    (xc, yc, xm, ym)
}

fn finish(kind: ModelKind, lambda: f64, w: DVector<f64>, xm: &[f64], ym: f64) -> Regressor {
    let intercept = ym - w.iter().zip(xm).map(|(a, b)| a * b).sum::<f64>();
    Regressor {
        kind,
        lambda,
        weights: w.iter().copied().collect(),
        intercept,
    }
}

/// Solves `(XᵀX + λI) w = Xᵀy`, rejecting (near-)singular systems.
fn normal_equations(
    xc: &DMatrix<f64>,
    yc: &DVector<f64>,
    lambda: f64,
) -> Result<DVector<f64>, QeModelError> {
    let d = xc.ncols();
    let gram = xc.transpose() * xc + DMatrix::identity(d, d) * lambda;
    let rhs = xc.transpose() * yc;
    let sv = gram.singular_values();
    let (max, min) = (sv.max(), sv.min());
    if d > 0 && (max == 0.0 || min <= max * 1e-12) {
        return Err(QeModelError::Singular);
    }
    gram.cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or(QeModelError::Singular)
}

/// Ordinary least squares.
pub fn fit_linreg(x: &DMatrix<f64>, y: &[f64], intercept: bool) -> Result<Regressor, QeModelError> {
    check_shapes(x, y.len(), 0.0)?;
    let (xc, yc, xm, ym) = center(x, y, intercept);
    let w = normal_equations(&xc, &yc, 0.0)?;
    Ok(finish(ModelKind::LinReg, 0.0, w, &xm, ym))
}

/// Minimises `‖y − Xw‖² + λ‖w‖²`.
pub fn fit_ridge(
    x: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    intercept: bool,
) -> Result<Regressor, QeModelError> {
    check_shapes(x, y.len(), lambda)?;
    let (xc, yc, xm, ym) = center(x, y, intercept);
    let w = normal_equations(&xc, &yc, lambda)?;
    Ok(finish(ModelKind::Ridge, lambda, w, &xm, ym))
}

/// Soft-thresholding. Inputs within a relative 1e-12 of the threshold are
/// zeroed so that `λ = max|Xᵀy|` stays exact despite summation-order
/// rounding in `z`.
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z.abs() <= t * (1.0 + 1e-12) {
        0.0
    } else if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Minimises `½‖y − Xw‖² + λ‖w‖₁` by cyclic coordinate descent. All weights
/// are exactly zero once `λ ≥ max_j |X_jᵀ y|` (on centered data with an
/// intercept).
pub fn fit_lasso(
    x: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    intercept: bool,
) -> Result<Regressor, QeModelError> {
    check_shapes(x, y.len(), lambda)?;
    let (xc, yc, xm, ym) = center(x, y, intercept);
    let d = xc.ncols();
    let norms: Vec<f64> = xc.column_iter().map(|c| c.norm_squared()).collect();
    let mut w: DVector<f64> = DVector::zeros(d);
    let mut resid = yc.clone();
    let mut converged = false;
    for _ in 0..LASSO_MAX_SWEEPS {
        let mut max_delta = 0.0f64;
        for j in 0..d {
            if norms[j] == 0.0 {
                continue;
            }
            let col = xc.column(j);
            let rho = col.dot(&resid) + norms[j] * w[j];
            let new = soft_threshold(rho, lambda) / norms[j];
            let delta: f64 = new - w[j];
            if delta != 0.0 {
                resid.axpy(-delta, &col, 1.0);
                w[j] = new;
            }
            max_delta = max_delta.max(delta.abs());
        }
        if max_delta < LASSO_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("lasso did not converge within {LASSO_MAX_SWEEPS} sweeps");
    }
    Ok(finish(ModelKind::Lasso, lambda, w, &xm, ym))
}

/// Multinomial logistic regression over the classes seen in training.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub kind: ModelKind,
    pub lambda: f64,
    pub classes: Vec<Label>,
    /// One row of weights per class.
    pub weights: DMatrix<f64>,
    pub intercepts: Vec<f64>,
    /// Training loss after every iteration (first entry: initial loss).
    pub loss_history: Vec<f64>,
}

fn softmax_in_place(scores: &mut [f64]) {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in scores.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    for v in scores.iter_mut() {
        *v /= s;
    }
}

impl Classifier {
    pub fn probabilities_row(&self, x: &[f64]) -> Vec<f64> {
        let mut scores: Vec<f64> = (0..self.classes.len())
            .map(|c| {
                self.intercepts[c]
                    + self
                        .weights
                        .row(c)
                        .iter()
                        .zip(x)
                        .map(|(w, v)| w * v)
                        .sum::<f64>()
            })
            .collect();
        softmax_in_place(&mut scores);
        scores
    }

    pub fn predict_row(&self, x: &[f64]) -> Label {
        let p = self.probabilities_row(x);
        let mut best = 0;
        for c in 1..p.len() {
            if p[c] > p[best] {
                best = c;
            }
        }
        self.classes[best]
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<Label> {
        x.row_iter()
            .map(|r| self.predict_row(&r.iter().copied().collect::<Vec<_>>()))
            .collect()
    }
}

/// Loss `Σ −log p(yᵢ | xᵢ) + (λ/2)‖W‖²` (intercepts unpenalised) and its
/// gradient with respect to the packed parameters `[W row-major, b]`.
pub fn logistic_loss_grad(
    x: &DMatrix<f64>,
    y: &[usize],
    n_classes: usize,
    params: &[f64],
    lambda: f64,
) -> (f64, Vec<f64>) {
    let d = x.ncols();
    let (w, b) = params.split_at(n_classes * d);
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    let mut scores = vec![0.0; n_classes];
    for (i, row) in x.row_iter().enumerate() {
        for c in 0..n_classes {
            scores[c] = b[c] + (0..d).map(|j| w[c * d + j] * row[j]).sum::<f64>();
        }
        let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
        loss += lse - scores[y[i]];
        for c in 0..n_classes {
            let p = (scores[c] - lse).exp();
            let g = p - f64::from(u8::from(c == y[i]));
            for j in 0..d {
                grad[c * d + j] += g * row[j];
            }
            grad[n_classes * d + c] += g;
        }
    }
    for (k, wk) in w.iter().enumerate() {
        loss += 0.5 * lambda * wk * wk;
        grad[k] += lambda * wk;
    }
    (loss, grad)
}

/// Gradient descent with Armijo backtracking, so the loss never increases.
pub fn fit_logistic(
    x: &DMatrix<f64>,
    labels: &[Label],
    lambda: f64,
) -> Result<Classifier, QeModelError> {
    check_shapes(x, labels.len(), lambda)?;
    let mut classes: Vec<Label> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(QeModelError::SingleClass);
    }
    let y: Vec<usize> = labels
        .iter()
        .map(|l| {
            classes
                .iter()
                .position(|c| c == l)
                .expect("class collected above")
        })
        .collect();
    let (k, d) = (classes.len(), x.ncols());
    let mut params = vec![0.0; k * d + k];
    let (mut loss, mut grad) = logistic_loss_grad(x, &y, k, &params, lambda);
    let mut history = vec![loss];
    let mut step = 1.0;
    for _ in 0..LOGISTIC_MAX_ITER {
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2.sqrt() < LOGISTIC_GRAD_TOL {
            break;
        }
        let mut accepted = false;
        while step > 1e-20 {
            let trial: Vec<f64> = params
                .iter()
                .zip(&grad)
                .map(|(p, g)| p - step * g)
                .collect();
            let (l, g) = logistic_loss_grad(x, &y, k, &trial, lambda);
            if l <= loss - 0.5 * step * gnorm2 {
                params = trial;
                loss = l;
                grad = g;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        history.push(loss);
        step *= 2.0;
    }
    let weights = DMatrix::from_row_slice(k, d, &params[..k * d]);
    Ok(Classifier {
        kind: ModelKind::Logistic,
        lambda,
        classes,
        weights,
        intercepts: params[k * d..].to_vec(),
        loss_history: history,
    })
}

/// Most frequent label; ties go to the better label.
pub fn majority_class(labels: &[Label]) -> Result<Label, QeModelError> {
    if labels.is_empty() {
        return Err(QeModelError::TooFewRows { needed: 1, got: 0 });
    }
    let mut counts = [0usize; 3];
    for l in labels {
        counts[l.index()] += 1;
    }
    let best = (0..3)
        .rev()
        .max_by_key(|&c| (counts[c], c))
        .expect("three classes");
    Ok(Label::from_index(best).expect("index in range"))
}
