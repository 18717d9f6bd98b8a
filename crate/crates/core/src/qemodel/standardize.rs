use nalgebra::DMatrix;

use super::QeModelError;

/// Per-column centering and scaling learned on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Population standard deviations; 1.0 for degenerate columns.
    pub stds: Vec<f64>,
    /// Constant columns, mapped to 0 by [`Standardizer::transform`].
    pub degenerate: Vec<bool>,
}

impl Standardizer {
    pub fn fit(x: &DMatrix<f64>) -> Result<Self, QeModelError> {
        let n = x.nrows();
        if n < 2 {
            return Err(QeModelError::TooFewRows { needed: 2, got: n });
        }
        let mut means = Vec::with_capacity(x.ncols());
        let mut stds = Vec::with_capacity(x.ncols());
        let mut degenerate = Vec::with_capacity(x.ncols());
        for col in x.column_iter() {
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            let flat = std <= 1e-12 * mean.abs().max(1.0);
            means.push(mean);
            stds.push(if flat { 1.0 } else { std });
            degenerate.push(flat);
        }
        Ok(Self {
            means,
            stds,
            degenerate,
        })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(
            x.ncols(),
            self.dim(),
            "column count must match the fitted data"
        );
        DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            if self.degenerate[j] {
                0.0
            } else {
                (x[(i, j)] - self.means[j]) / self.stds[j]
            }
        })
    }
}
