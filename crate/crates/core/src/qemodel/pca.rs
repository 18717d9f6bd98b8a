use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::QeModelError;

/// Top principal directions of the training data.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    pub mean: Vec<f64>,
    /// One orthonormal component per row, by descending explained variance.
    pub components: DMatrix<f64>,
    pub explained_variance: Vec<f64>,
}

/// Flips `v` so its largest-magnitude entry (earliest on ties) is positive.
fn canonical_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Sample covariance (denominator `n - 1`) of the columns of `x`.
pub(crate) fn covariance(x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = x.nrows();
    let mean: Vec<f64> = x.column_iter().map(|c| c.mean()).collect();
    let centered = DMatrix::from_fn(n, x.ncols(), |i, j| x[(i, j)] - mean[j]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    (mean, cov)
}

impl PcaBasis {
    /// Fits `k` components; `k` must be in `1..=min(rows - 1, cols)`.
    pub fn fit(x: &DMatrix<f64>, k: usize) -> Result<Self, QeModelError> {
        let max_k = x.nrows().saturating_sub(1).min(x.ncols());
        if k == 0 || k > max_k {
            return Err(QeModelError::PcaK { k, max: max_k });
        }
        let (mean, cov) = covariance(x);
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let d = x.ncols();
        let mut components = DMatrix::zeros(k, d);
        let mut explained_variance = Vec::with_capacity(k);
        for (row, &idx) in order.iter().take(k).enumerate() {
            let mut v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
            v /= v.norm();
            canonical_sign(&mut v);
            components.set_row(row, &v.transpose());
            explained_variance.push(eig.eigenvalues[idx].max(0.0));
        }
        Ok(Self {
            mean,
            components,
            explained_variance,
        })
    }

    pub fn k(&self) -> usize {
        self.components.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.components.ncols()
    }

    /// Coordinates of each row of `x` in the component basis.
    pub fn project(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(
            x.ncols(),
            self.input_dim(),
            "column count must match the fitted data"
        );
        let centered = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - self.mean[j]);
        centered * self.components.transpose()
    }

    /// Maps projected coordinates back to the input space.
    pub fn reconstruct(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let back = z * &self.components;
        DMatrix::from_fn(back.nrows(), back.ncols(), |i, j| {
            back[(i, j)] + self.mean[j]
        })
    }
}
