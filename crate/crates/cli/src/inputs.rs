//! Loading and validating everything a command reads.

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use tseval_core::features::{
    compute_matrix, vocabulary, Feature, FeatureMatrix, ResourceKind, Resources, SentencePair,
};
use tseval_core::qats_io::{load_dataset, Dataset};
use tseval_core::resources::{LmConfig, ResourcePaths};

use crate::config::{RunConfig, RESOURCES_ENV};
use crate::error::{io, CliError, Result};

/// A dataset together with its tokenized pairs.
pub struct Split {
    pub name: &'static str,
    pub dataset: Dataset,
    pub pairs: Vec<SentencePair>,
}

pub fn load_split(name: &'static str, path: &Path) -> Result<Split> {
    let dataset = load_dataset(path)?;
    let pairs = dataset
        .records
        .iter()
        .map(|r| SentencePair::new(r.id.clone(), &r.source_text, &r.output_text))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Split {
        name,
        dataset,
        pairs,
    })
}

pub fn require<'a>(path: &'a Option<PathBuf>, flag: &str, command: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| CliError::Usage(format!("{command} needs {flag}")))
}

pub fn require_labeled(split: &Split) -> Result<()> {
    if split.dataset.is_labeled() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "the {} dataset has no labels",
            split.name
        )))
    }
}

fn flag_for(kind: ResourceKind) -> &'static str {
    match kind {
        ResourceKind::LanguageModel => "--lm-corpus",
        ResourceKind::Vectors => "--vectors",
        ResourceKind::FreqTable => "--freq-table",
        ResourceKind::Concreteness => "--concreteness",
    }
}

/// Loads only the resources `which` needs, failing with the missing flag
/// named when one has no path.
pub fn load_resources(cfg: &RunConfig, which: &[Feature], splits: &[&Split]) -> Result<Resources> {
    let needed: HashSet<ResourceKind> = which.iter().filter_map(|f| f.requires()).collect();
    let p = &cfg.resources;
    let pick = |kind: ResourceKind, path: &Option<PathBuf>| -> Result<Option<PathBuf>> {
        if !needed.contains(&kind) {
            return Ok(None);
        }
        match path {
            Some(path) => Ok(Some(path.clone())),
            None => {
                let feature = which
                    .iter()
                    .find(|f| f.requires() == Some(kind))
                    .map_or("", |f| f.name());
                Err(CliError::Data(format!(
                    "feature {feature} needs a {kind}; pass {} or set {RESOURCES_ENV}, or choose --features without it",
                    flag_for(kind)
                )))
            }
        }
    };
    let paths = ResourcePaths {
        freq_table: pick(ResourceKind::FreqTable, &p.freq_table)?,
        concreteness: pick(ResourceKind::Concreteness, &p.concreteness)?,
        vectors: pick(ResourceKind::Vectors, &p.vectors)?,
        lm_corpus: pick(ResourceKind::LanguageModel, &p.lm_corpus)?,
    };
    let mut vocab = HashSet::new();
    if paths.vectors.is_some() {
        for s in splits {
            vocab.extend(vocabulary(&s.pairs));
        }
    }
    Ok(Resources::load(&paths, &vocab, &LmConfig::default())?)
}

pub fn read_matrix(path: &Path) -> Result<FeatureMatrix> {
    let file = File::open(path).map_err(|e| io(path, e))?;
    FeatureMatrix::read_tsv(BufReader::new(file))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Rows must be the dataset's records, in order.
pub fn check_rows(matrix: &FeatureMatrix, split: &Split) -> Result<()> {
    let ids: Vec<&str> = split
        .dataset
        .records
        .iter()
        .map(|r| r.id.as_str())
        .collect();
    let same = matrix.row_ids().len() == ids.len()
        && matrix.row_ids().iter().zip(&ids).all(|(a, b)| a == b);
    if same {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "feature matrix rows do not match the {} dataset records ({} rows, {} records)",
            split.name,
            matrix.n_rows(),
            ids.len()
        )))
    }
}

/// Restricts a precomputed matrix to `names`, failing on missing columns.
pub fn select_columns(
    matrix: FeatureMatrix,
    names: &[String],
    path: &Path,
) -> Result<FeatureMatrix> {
    if let Some(missing) = names.iter().find(|n| matrix.column_index(n).is_none()) {
        return Err(CliError::Data(format!(
            "{}: feature matrix has no column {missing}",
            path.display()
        )));
    }
    matrix
        .select(names)
        .ok_or_else(|| CliError::Internal("column selection failed after validation".into()))
}

/// Feature matrices for `splits`, read from `precomputed` where given and
/// computed otherwise. `wanted` restricts the columns; `None` means all
/// columns of a precomputed matrix, or the full registry.
pub fn matrices(
    cfg: &RunConfig,
    splits: &[(&Split, Option<&Path>)],
    wanted: Option<&[Feature]>,
) -> Result<Vec<FeatureMatrix>> {
    let to_compute: Vec<&Split> = splits
        .iter()
        .filter(|(_, p)| p.is_none())
        .map(|(s, _)| *s)
        .collect();
    let which = wanted.unwrap_or(Feature::ALL);
    let resources = if to_compute.is_empty() {
        Resources::default()
    } else {
        load_resources(cfg, which, &to_compute)?
    };
    let mut out = Vec::with_capacity(splits.len());
    for (split, precomputed) in splits {
        let m = match precomputed {
            Some(path) => {
                let m = read_matrix(path)?;
                match wanted {
                    Some(w) => {
                        let names: Vec<String> = w.iter().map(|f| f.name().to_string()).collect();
                        select_columns(m, &names, path)?
                    }
                    None => m,
                }
            }
            None => compute_matrix(&split.pairs, &resources, which)?,
        };
        check_rows(&m, split)?;
        out.push(m);
    }
    Ok(out)
}
