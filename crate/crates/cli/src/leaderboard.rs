//! Selected rows of the published QATS 2016 shared-task leaderboard, shown
//! next to evaluation results for context. Pearson rows score regressors,
//! weighted F1 rows (in percent) score classifiers.

use tseval_core::qats_io::Dimension;

/// System name and score.
pub type Entry = (&'static str, f64);

pub fn pearson(d: Dimension) -> &'static [Entry] {
    match d {
        Dimension::Grammaticality => &[
            ("OSVCML1", 0.482),
            ("METEOR", 0.384),
            ("BLEU", 0.344),
            ("Lasso", 0.327),
            ("TER", 0.323),
            ("WER", 0.308),
        ],
        Dimension::Meaning => &[
            ("IIT-Meteor", 0.588),
            ("OSVCML", 0.585),
            ("Ridge", 0.575),
            ("Lasso", 0.555),
            ("BLEU", 0.533),
            ("METEOR", 0.527),
            ("TER", 0.513),
            ("WER", 0.495),
        ],
        Dimension::Simplicity => &[
            ("Ridge", 0.487),
            ("LinearSVR", 0.456),
            ("OSVCML1", 0.382),
            ("METEOR", -0.169),
            ("TER", -0.242),
            ("WER", -0.260),
            ("BLEU", -0.267),
        ],
        Dimension::Overall => &[
            ("Ridge", 0.423),
            ("LinearRegression", 0.423),
            ("OSVCML2", 0.343),
            ("METEOR", 0.196),
            ("TER", 0.130),
            ("WER", 0.111),
            ("BLEU", 0.107),
        ],
    }
}

pub fn weighted_f1(d: Dimension) -> &'static [Entry] {
    match d {
        Dimension::Grammaticality => &[
            ("SMH-RandForest", 71.84),
            ("LogisticRegression", 70.43),
            ("BLEU", 69.09),
            ("TER", 68.36),
            ("WER", 66.79),
            ("Majority-class", 65.89),
            ("METEOR", 65.72),
        ],
        Dimension::Meaning => &[
            ("SVC", 70.14),
            ("SMH-Logistic", 68.07),
            ("TER", 63.74),
            ("BLEU", 62.82),
            ("METEOR", 60.12),
            ("WER", 59.06),
            ("Majority-class", 42.51),
        ],
        Dimension::Simplicity => &[
            ("SVC", 61.60),
            ("AdaBoostClassifier", 56.95),
            ("SMH-RandForest-b", 56.42),
            ("Majority-class", 39.68),
            ("WER", 34.48),
            ("TER", 33.52),
            ("METEOR", 33.34),
            ("BLEU", 33.00),
        ],
        Dimension::Overall => &[
            ("LogisticRegression", 49.61),
            ("SMH-RandForest-b", 48.57),
            ("METEOR", 40.94),
            ("TER", 34.08),
            ("BLEU", 32.92),
            ("WER", 31.28),
            ("Majority-class", 26.53),
        ],
    }
}
