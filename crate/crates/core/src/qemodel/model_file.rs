//! Plain-text model files. One `key<TAB>values...` record per line, in a
//! fixed order, with every real written as its shortest round-trip decimal.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{
    Classifier, LinearModel, ModelKind, PcaBasis, QeModelError, Regressor, Standardizer,
    TrainedPipeline,
};
use crate::qats_io::{Dimension, Label};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "tseval-model";

fn join<T: std::fmt::Display>(values: impl IntoIterator<Item = T>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("\t")
}

impl TrainedPipeline {
    pub fn to_model_text(&self) -> String {
        let mut s = String::new();
        let mut line = |key: &str, rest: String| {
            if rest.is_empty() {
                let _ = writeln!(s, "{key}");
            } else {
                let _ = writeln!(s, "{key}\t{rest}");
            }
        };
        line(MAGIC, MODEL_FORMAT_VERSION.to_string());
        line("dimension", self.dimension.column().to_string());
        line("kind", self.model.kind().name().to_string());
        line("lambda", self.lambda().to_string());
        line("features", self.feature_names.len().to_string());
        for name in &self.feature_names {
            line("feature", name.clone());
        }
        line("std_mean", join(&self.standardizer.means));
        line("std_scale", join(&self.standardizer.stds));
        line(
            "std_degenerate",
            join(self.standardizer.degenerate.iter().map(|&d| u8::from(d))),
        );
        line("pca", format!("{}\t{}", self.pca.k(), self.pca.input_dim()));
        line("pca_mean", join(&self.pca.mean));
        for row in self.pca.components.row_iter() {
            line("component", join(row.iter()));
        }
        line("variance", join(&self.pca.explained_variance));
        match &self.model {
            LinearModel::Regressor(r) => {
                line("intercept", r.intercept.to_string());
                line("weights", join(&r.weights));
            }
            LinearModel::Classifier(c) => {
                line("classes", join(&c.classes));
                for row in c.weights.row_iter() {
                    line("class_weights", join(row.iter()));
                }
                line("intercepts", join(&c.intercepts));
            }
            LinearModel::Majority(l) => line("majority", l.to_string()),
        }
        line("end", String::new());
        s
    }

    pub fn from_model_text(text: &str) -> Result<Self, QeModelError> {
        let mut p = Parser {
            lines: text.lines().enumerate(),
            line: 0,
        };
        let version: u32 = p.single(MAGIC)?;
        if version != MODEL_FORMAT_VERSION {
            return Err(p.err(format!("unsupported model format version {version}")));
        }
        let dimension: Dimension = p.single_with("dimension", |s| s.parse())?;
        let kind: ModelKind = p.single_with("kind", |s| s.parse())?;
        let lambda: f64 = p.single("lambda")?;
        let n: usize = p.single("features")?;
        let mut feature_names = Vec::with_capacity(n);
        for _ in 0..n {
            feature_names.push(p.raw("feature")?.to_string());
        }
        let means: Vec<f64> = p.list("std_mean", n)?;
        let stds: Vec<f64> = p.list("std_scale", n)?;
        let degenerate: Vec<bool> = p
            .list::<u8>("std_degenerate", n)?
            .into_iter()
            .map(|v| v != 0)
            .collect();
        let dims: Vec<usize> = p.list("pca", 2)?;
        let (k, d) = (dims[0], dims[1]);
        if d != n {
            return Err(p.err(format!("PCA input dimension {d} differs from {n} features")));
        }
        let pca_mean: Vec<f64> = p.list("pca_mean", d)?;
        let mut comp = Vec::with_capacity(k * d);
        for _ in 0..k {
            comp.extend(p.list::<f64>("component", d)?);
        }
        let explained_variance: Vec<f64> = p.list("variance", k)?;
        let model = match kind {
            ModelKind::LinReg | ModelKind::Ridge | ModelKind::Lasso => {
                let intercept: f64 = p.single("intercept")?;
                let weights: Vec<f64> = p.list("weights", k)?;
                LinearModel::Regressor(Regressor {
                    kind,
                    lambda,
                    weights,
                    intercept,
                })
            }
            ModelKind::Logistic => {
                let classes: Vec<Label> = p.list_with("classes", None, |s| s.parse())?;
                let c = classes.len();
                let mut w = Vec::with_capacity(c * k);
                for _ in 0..c {
                    w.extend(p.list::<f64>("class_weights", k)?);
                }
                let intercepts: Vec<f64> = p.list("intercepts", c)?;
                LinearModel::Classifier(Classifier {
                    kind,
                    lambda,
                    classes,
                    weights: DMatrix::from_row_slice(c, k, &w),
                    intercepts,
                    loss_history: Vec::new(),
                })
            }
            ModelKind::Majority => LinearModel::Majority(p.single_with("majority", |s| s.parse())?),
        };
        p.raw("end")?;
        Ok(TrainedPipeline {
            dimension,
            feature_names,
            standardizer: Standardizer {
                means,
                stds,
                degenerate,
            },
            pca: PcaBasis {
                mean: pca_mean,
                components: DMatrix::from_row_slice(k, d, &comp),
                explained_variance,
            },
            model,
        })
    }
}

struct Parser<'a, I: Iterator<Item = (usize, &'a str)>> {
    lines: I,
    line: usize,
}

impl<'a, I: Iterator<Item = (usize, &'a str)>> Parser<'a, I> {
    fn err(&self, message: String) -> QeModelError {
        QeModelError::ModelFile {
            line: self.line,
            message,
        }
    }

    /// Everything after `key<TAB>` on the next line.
    fn raw(&mut self, key: &str) -> Result<&'a str, QeModelError> {
        let (i, text) = self
            .lines
            .next()
            .ok_or_else(|| self.err(format!("unexpected end of file, expected {key:?}")))?;
        self.line = i + 1;
        let (k, rest) = text.split_once('\t').unwrap_or((text, ""));
        if k != key {
            return Err(self.err(format!("expected {key:?}, found {k:?}")));
        }
        Ok(rest)
    }

    fn list_with<T, E: std::fmt::Display>(
        &mut self,
        key: &str,
        len: Option<usize>,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<Vec<T>, QeModelError> {
        let rest = self.raw(key)?;
        let values = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split('\t')
                .map(|v| parse(v).map_err(|e| self.err(format!("{key}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?
        };
        if let Some(n) = len {
            if values.len() != n {
                return Err(self.err(format!(
                    "{key}: expected {n} values, found {}",
                    values.len()
                )));
            }
        }
        Ok(values)
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str, len: usize) -> Result<Vec<T>, QeModelError>
    where
        T::Err: std::fmt::Display,
    {
        self.list_with(key, Some(len), |s| s.parse::<T>())
    }

    fn single_with<T, E: std::fmt::Display>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<T, QeModelError> {
        Ok(self.list_with(key, Some(1), parse)?.remove(0))
    }

    fn single<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, QeModelError>
    where
        T::Err: std::fmt::Display,
    {
        self.single_with(key, |s| s.parse::<T>())
    }
}
