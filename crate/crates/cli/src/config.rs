//! Run configuration: command-line flags, then an optional TOML file, then
//! built-in defaults. Relative paths in the file are taken relative to the
//! file's own directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tseval_core::features::{parse_feature_list, Feature};
use tseval_core::qats_io::Dimension;
use tseval_core::qemodel::{ModelKind, DEFAULT_FOLDS, DEFAULT_PCA_K, DEFAULT_SEED};
use tseval_core::resources::ResourcePaths;

use crate::args::Shared;
use crate::error::{CliError, Result};

/// Environment variable naming the default resource directory.
pub const RESOURCES_ENV: &str = "TSEVAL_RESOURCES";
pub const DEFAULT_TOP: usize = 15;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    train: Option<PathBuf>,
    test: Option<PathBuf>,
    #[serde(alias = "freq-table")]
    freq_table: Option<PathBuf>,
    concreteness: Option<PathBuf>,
    vectors: Option<PathBuf>,
    #[serde(alias = "lm-corpus")]
    lm_corpus: Option<PathBuf>,
    features: Option<String>,
    dimension: Option<String>,
    model: Option<String>,
    lambda: Option<f64>,
    #[serde(alias = "pca-k")]
    pca_k: Option<usize>,
    folds: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    #[serde(alias = "train-features")]
    train_features: Option<PathBuf>,
    #[serde(alias = "test-features")]
    test_features: Option<PathBuf>,
    #[serde(alias = "model-file")]
    model_file: Option<PathBuf>,
    top: Option<usize>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.train,
            &mut cfg.test,
            &mut cfg.freq_table,
            &mut cfg.concreteness,
            &mut cfg.vectors,
            &mut cfg.lm_corpus,
            &mut cfg.out,
            &mut cfg.train_features,
            &mut cfg.test_features,
            &mut cfg.model_file,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub resources: ResourcePaths,
    /// `None` means every registered feature (or every column of a given
    /// feature matrix).
    pub features: Option<Vec<Feature>>,
    pub dimensions: Option<Vec<Dimension>>,
    pub model: ModelKind,
    pub lambda: Option<f64>,
    pub pca_k: usize,
    pub folds: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub train_features: Option<PathBuf>,
    pub test_features: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub top: usize,
}

fn parse_dimensions(list: &str) -> Result<Vec<Dimension>> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let d: Dimension = part
            .parse()
            .map_err(|e| CliError::Usage(format!("--dimension: {e}")))?;
        if !out.contains(&d) {
            out.push(d);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("--dimension is empty".into()));
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(flags: Shared) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };

        let explicit = ResourcePaths {
            freq_table: flags.freq_table.or(file.freq_table),
            concreteness: flags.concreteness.or(file.concreteness),
            vectors: flags.vectors.or(file.vectors),
            lm_corpus: flags.lm_corpus.or(file.lm_corpus),
        };
        let resources = match std::env::var_os(RESOURCES_ENV) {
            Some(dir) if !dir.is_empty() => {
                let dir = PathBuf::from(dir);
                if !dir.is_dir() {
                    return Err(CliError::Data(format!(
                        "{RESOURCES_ENV}={} is not a directory",
                        dir.display()
                    )));
                }
                explicit.or(ResourcePaths::from_dir(&dir))
            }
            _ => explicit,
        };

        let features = flags
            .features
            .or(file.features)
            .map(|f| {
                parse_feature_list(&f).map_err(|e| CliError::Usage(format!("--features: {e}")))
            })
            .transpose()?;
        let dimensions = flags
            .dimension
            .or(file.dimension)
            .map(|d| parse_dimensions(&d))
            .transpose()?;
        let model = match flags.model.or(file.model) {
            Some(m) => m
                .parse()
                .map_err(|e| CliError::Usage(format!("--model: {e}")))?,
            None => ModelKind::Ridge,
        };

        let lambda = flags.lambda.or(file.lambda);
        if lambda.is_some_and(|l| !(l.is_finite() && l >= 0.0)) {
            return Err(CliError::Usage("--lambda must be finite and >= 0".into()));
        }
        let pca_k = flags.pca_k.or(file.pca_k).unwrap_or(DEFAULT_PCA_K);
        if pca_k == 0 {
            return Err(CliError::Usage("--pca-k must be at least 1".into()));
        }
        let folds = flags.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS);
        if folds < 2 {
            return Err(CliError::Usage("--folds must be at least 2".into()));
        }
        let jobs = flags.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }

        Ok(Self {
            train: flags.train.or(file.train),
            test: flags.test.or(file.test),
            resources,
            features,
            dimensions,
            model,
            lambda,
            pca_k,
            folds,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            jobs,
            train_features: flags.train_features.or(file.train_features),
            test_features: flags.test_features.or(file.test_features),
            model_file: flags.model_file.or(file.model_file),
            top: flags.top.or(file.top).unwrap_or(DEFAULT_TOP),
        })
    }

    /// The single dimension a command works on.
    pub fn single_dimension(&self, command: &str) -> Result<Dimension> {
        match self.dimensions.as_deref() {
            Some([d]) => Ok(*d),
            Some(_) => Err(CliError::Usage(format!(
                "{command} takes exactly one --dimension"
            ))),
            None => Err(CliError::Usage(format!("{command} needs --dimension"))),
        }
    }

    /// Requested dimensions, all four when unset.
    pub fn all_dimensions(&self) -> Vec<Dimension> {
        self.dimensions
            .clone()
            .unwrap_or_else(|| Dimension::ALL.to_vec())
    }
}
