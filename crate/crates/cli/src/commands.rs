use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use tseval_core::features::{compute_matrix, Feature, FeatureMatrix};
use tseval_core::qats_io::{
    convert_parallel, encode_labels, label_distribution, serialize, Dimension, Label,
};
use tseval_core::qemodel::{
    cross_validate, effective_k, fit_pipeline, score, select_lambda, CvMetric, LinearModel,
    ModelKind, PipelineConfig, Target, TrainedPipeline,
};
use tseval_core::stats::rank_features;

use crate::args::ConvertArgs;
use crate::config::RunConfig;
use crate::error::{io, CliError, Result};
use crate::inputs::{load_resources, load_split, matrices, require, require_labeled, Split};
use crate::leaderboard;

/// Files a command produces, written only once everything has validated.
#[derive(Default)]
struct Outputs(Vec<(PathBuf, Vec<u8>)>);

impl Outputs {
    fn add(&mut self, path: PathBuf, contents: impl Into<Vec<u8>>) {
        self.0.push((path, contents.into()));
    }

    fn write(self) -> Result<()> {
        for (path, contents) in &self.0 {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
            }
            std::fs::write(path, contents).map_err(|e| io(path, e))?;
        }
        for (path, _) in &self.0 {
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn tag(d: Dimension) -> String {
    d.long_name().replace(' ', "_")
}

fn target_for<'a>(kind: ModelKind, scores: &'a [f64], labels: &'a [Label]) -> Target<'a> {
    if kind.is_classifier() {
        Target::Labels(labels)
    } else {
        Target::Scores(scores)
    }
}

fn load_optional(name: &'static str, path: &Option<PathBuf>) -> Result<Option<Split>> {
    path.as_deref().map(|p| load_split(name, p)).transpose()
}

pub fn features(cfg: &RunConfig) -> Result<()> {
    let splits: Vec<Split> = [
        load_optional("train", &cfg.train)?,
        load_optional("test", &cfg.test)?,
    ]
    .into_iter()
    .flatten()
    .collect();
    if splits.is_empty() {
        return Err(CliError::Usage(
            "features needs --train and/or --test".into(),
        ));
    }
    let which = cfg
        .features
        .clone()
        .unwrap_or_else(|| Feature::ALL.to_vec());
    let refs: Vec<&Split> = splits.iter().collect();
    let resources = load_resources(cfg, &which, &refs)?;

    // One feature at a time so the summary can attribute time per feature.
    let mut timings = vec![Duration::ZERO; which.len()];
    let mut outputs = Outputs::default();
    for split in &splits {
        let mut columns = Vec::with_capacity(which.len());
        for (i, &f) in which.iter().enumerate() {
            let start = Instant::now();
            let m = compute_matrix(&split.pairs, &resources, &[f])?;
            timings[i] += start.elapsed();
            columns.push(m.column(0));
        }
        let rows: Vec<Vec<f64>> = (0..split.pairs.len())
            .map(|r| columns.iter().map(|c| c[r]).collect())
            .collect();
        let matrix = FeatureMatrix::new(
            which.iter().map(|f| f.name().to_string()).collect(),
            split.pairs.iter().map(|p| p.id.clone()).collect(),
            rows,
        );
        let mut buf = Vec::new();
        matrix
            .write_tsv(&mut buf)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        outputs.add(cfg.out.join(format!("features_{}.tsv", split.name)), buf);
    }

    let rows: usize = splits.iter().map(|s| s.pairs.len()).sum();
    println!("feature\tseconds\t({rows} pairs)");
    for (f, t) in which.iter().zip(&timings) {
        println!("{}\t{:.4}", f.name(), t.as_secs_f64());
    }
    let total: Duration = timings.iter().sum();
    println!("total\t{:.4}", total.as_secs_f64());
    outputs.write()
}

fn precomputed(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}

pub fn rank(cfg: &RunConfig) -> Result<()> {
    let train = load_split("train", require(&cfg.train, "--train", "rank")?)?;
    require_labeled(&train)?;
    let test = load_optional("test", &cfg.test)?;
    if let Some(t) = &test {
        require_labeled(t)?;
    }
    let mut inputs = vec![(&train, precomputed(&cfg.train_features))];
    if let Some(t) = &test {
        inputs.push((t, precomputed(&cfg.test_features)));
    }
    let ms = matrices(cfg, &inputs, cfg.features.as_deref())?;
    let (xtr, xte) = (&ms[0], ms.get(1));

    let mut outputs = Outputs::default();
    for d in cfg.all_dimensions() {
        let y = encode_labels(&train.dataset, d)?;
        let test_y = test
            .as_ref()
            .map(|t| encode_labels(&t.dataset, d))
            .transpose()?;
        let table = rank_features(xtr, &y, d, xte.zip(test_y.as_deref()), 0.95)?;
        let md = table.to_markdown(Some(cfg.top));
        println!("{md}");
        outputs.add(
            cfg.out.join(format!("ranking_{}.tsv", tag(d))),
            table.to_tsv(),
        );
        outputs.add(cfg.out.join(format!("ranking_{}.md", tag(d))), md);
    }
    outputs.write()
}

fn metric_name(m: CvMetric) -> &'static str {
    match m {
        CvMetric::Pearson => "pearson",
        CvMetric::WeightedF1 => "weighted_f1",
    }
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let dim = cfg.single_dimension("train")?;
    let train = load_split("train", require(&cfg.train, "--train", "train")?)?;
    require_labeled(&train)?;
    let ms = matrices(
        cfg,
        &[(&train, precomputed(&cfg.train_features))],
        cfg.features.as_deref(),
    )?;
    let x = &ms[0];
    let scores = encode_labels(&train.dataset, dim)?;
    let labels = train.dataset.labels(dim)?;
    let target = target_for(cfg.model, &scores, &labels);

    // Clamp once against the smallest cross-validation training part so the
    // warning is not repeated for every fit.
    let smallest_fit = x.n_rows() - x.n_rows().div_ceil(cfg.folds);
    let mut pcfg = PipelineConfig {
        kind: cfg.model,
        lambda: cfg.lambda,
        pca_k: effective_k(cfg.pca_k, smallest_fit, x.n_cols()).max(1),
        folds: cfg.folds,
        seed: cfg.seed,
    };
    let mut table = String::new();
    let mut tsv = String::from("section\tkey\tvalue\n");
    if cfg.model.has_lambda() && cfg.lambda.is_none() {
        let (best, grid) = select_lambda(x, target, &pcfg)?;
        let _ = writeln!(table, "lambda\tmean CV score");
        for (l, s) in &grid {
            let _ = writeln!(table, "{l}\t{s:.4}");
            let _ = writeln!(tsv, "grid\t{l}\t{s}");
        }
        let _ = writeln!(table, "selected lambda {best}\n");
        pcfg.lambda = Some(best);
    }
    let report = cross_validate(x, target, &pcfg)?;
    let model = fit_pipeline(x, target, dim, &pcfg)?;

    let metric = metric_name(report.metric);
    let _ = writeln!(table, "fold\t{metric}");
    for (i, s) in report.fold_scores.iter().enumerate() {
        let _ = writeln!(table, "{}\t{s:.4}", i + 1);
        let _ = writeln!(tsv, "fold\t{}\t{s}", i + 1);
    }
    let _ = writeln!(table, "mean\t{:.4}", report.mean);
    let _ = writeln!(tsv, "mean\t{metric}\t{}", report.mean);
    let _ = writeln!(tsv, "lambda\tselected\t{}", report.lambda);

    println!(
        "{} model for {} on {} pairs x {} features, {}-fold CV (seed {})",
        cfg.model.name(),
        dim.long_name(),
        x.n_rows(),
        x.n_cols(),
        cfg.folds,
        cfg.seed
    );
    print!("{table}");

    let stem = format!("{}_{}", tag(dim), cfg.model.name());
    let model_path = cfg
        .model_file
        .clone()
        .unwrap_or_else(|| cfg.out.join(format!("model_{stem}.txt")));
    let mut outputs = Outputs::default();
    outputs.add(model_path, model.to_model_text());
    outputs.add(cfg.out.join(format!("cv_{stem}.tsv")), tsv);
    outputs.write()
}

fn leaderboard_markdown(dim: Dimension, is_classifier: bool, ours: f64, ours_name: &str) -> String {
    let (rows, unit) = if is_classifier {
        (leaderboard::weighted_f1(dim), "weighted F1 (%)")
    } else {
        (leaderboard::pearson(dim), "Pearson r")
    };
    let mut s = format!(
        "#### QATS 2016 leaderboard context: {}, {unit}\n\n| system | score |\n|---|---:|\n",
        dim.long_name()
    );
    let mut placed = false;
    for row in rows {
        if !placed && ours >= row.1 {
            let _ = writeln!(s, "| **{ours_name} (this run)** | {ours:.3} |");
            placed = true;
        }
        let _ = writeln!(s, "| {} | {:.3} |", row.0, row.1);
    }
    if !placed {
        let _ = writeln!(s, "| **{ours_name} (this run)** | {ours:.3} |");
    }
    s
}

pub fn evaluate(cfg: &RunConfig) -> Result<()> {
    let path = require(&cfg.model_file, "--model-file", "evaluate")?;
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    let model = TrainedPipeline::from_model_text(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if let Some(ds) = &cfg.dimensions {
        if ds != &[model.dimension] {
            return Err(CliError::Data(format!(
                "model was trained for {}, not the requested dimension",
                model.dimension.long_name()
            )));
        }
    }
    let test = load_split("test", require(&cfg.test, "--test", "evaluate")?)?;
    require_labeled(&test)?;
    let needed: Vec<Feature> = if cfg.test_features.is_some() {
        Vec::new()
    } else {
        model
            .feature_names
            .iter()
            .map(|n| {
                Feature::from_name(n).ok_or_else(|| {
                    CliError::Data(format!(
                        "model feature {n:?} is not a registered feature; pass --test-features"
                    ))
                })
            })
            .collect::<Result<_>>()?
    };
    let wanted = if cfg.test_features.is_some() {
        None
    } else {
        Some(needed.as_slice())
    };
    let ms = matrices(cfg, &[(&test, precomputed(&cfg.test_features))], wanted)?;
    let pred = model.predict(&ms[0])?;

    let dim = model.dimension;
    let scores = encode_labels(&test.dataset, dim)?;
    let labels = test.dataset.labels(dim)?;
    let kind = match &model.model {
        LinearModel::Regressor(r) => r.kind,
        LinearModel::Classifier(c) => c.kind,
        LinearModel::Majority(_) => ModelKind::Majority,
    };
    let classifier = kind.is_classifier();
    let raw = score(&pred, target_for(kind, &scores, &labels));
    let (metric, value) = if classifier {
        ("weighted_f1_percent", 100.0 * raw)
    } else {
        ("pearson", raw)
    };

    let mut md = format!(
        "### {} on {} test pairs\n\n| model | lambda | {metric} |\n|---|---:|---:|\n| {} | {} | {value:.3} |\n\n",
        dim.long_name(),
        test.pairs.len(),
        kind.name(),
        model.lambda()
    );
    md.push_str(&leaderboard_markdown(dim, classifier, value, kind.name()));
    let tsv = format!(
        "dimension\tmodel\tlambda\tn\tmetric\tvalue\n{}\t{}\t{}\t{}\t{metric}\t{value}\n",
        dim.column(),
        kind.name(),
        model.lambda(),
        test.pairs.len()
    );
    println!("{md}");
    let stem = format!("{}_{}", tag(dim), kind.name());
    let mut outputs = Outputs::default();
    outputs.add(cfg.out.join(format!("evaluation_{stem}.tsv")), tsv);
    outputs.add(cfg.out.join(format!("evaluation_{stem}.md")), md);
    outputs.write()
}

pub fn report(cfg: &RunConfig) -> Result<()> {
    let splits: Vec<Split> = [
        load_optional("train", &cfg.train)?,
        load_optional("test", &cfg.test)?,
    ]
    .into_iter()
    .flatten()
    .collect();
    if splits.is_empty() {
        return Err(CliError::Usage("report needs --train and/or --test".into()));
    }
    for s in &splits {
        require_labeled(s)?;
    }
    let labels = [Label::Good, Label::Ok, Label::Bad];
    let mut tsv = String::from("split\tdimension\tGood\tOK\tBad\ttotal\n");
    let mut md = String::new();
    for s in &splits {
        let _ = write!(
            md,
            "### {} ({} pairs)\n\n| dimension | Good | OK | Bad |\n|---|---:|---:|---:|\n",
            s.name,
            s.dataset.len()
        );
        for d in cfg.all_dimensions() {
            let counts = label_distribution(&s.dataset, d)?;
            let total: usize = counts.values().sum();
            let c: Vec<usize> = labels.iter().map(|l| counts[l]).collect();
            let _ = writeln!(
                tsv,
                "{}\t{}\t{}\t{}\t{}\t{total}",
                s.name,
                d.column(),
                c[0],
                c[1],
                c[2]
            );
            let pct = |n: usize| 100.0 * n as f64 / total as f64;
            let _ = writeln!(
                md,
                "| {} | {} ({:.1}%) | {} ({:.1}%) | {} ({:.1}%) |",
                d.long_name(),
                c[0],
                pct(c[0]),
                c[1],
                pct(c[1]),
                c[2],
                pct(c[2])
            );
        }
        md.push('\n');
    }
    print!("{md}");
    let mut outputs = Outputs::default();
    outputs.add(cfg.out.join("label_distribution.tsv"), tsv);
    outputs.add(cfg.out.join("label_distribution.md"), md);
    outputs.write()
}

pub fn convert(args: &ConvertArgs) -> Result<()> {
    let labels: Option<[&Path; 4]> = args.labels.as_ref().map(|l| {
        [
            l[0].as_path(),
            l[1].as_path(),
            l[2].as_path(),
            l[3].as_path(),
        ]
    });
    let ds = convert_parallel(&args.source, &args.simplified, labels)?;
    let mut buf = Vec::new();
    serialize(&ds, &mut buf)?;
    let mut outputs = Outputs::default();
    outputs.add(args.dest.clone(), buf);
    outputs.write()
}
