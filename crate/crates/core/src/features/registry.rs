use std::fmt;
use std::str::FromStr;

/// External resource a feature depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResourceKind {
    LanguageModel,
    Vectors,
    FreqTable,
    Concreteness,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LanguageModel => "language model corpus",
            Self::Vectors => "word vectors",
            Self::FreqTable => "frequency table",
            Self::Concreteness => "concreteness lexicon",
        })
    }
}

/// Expected sign of a feature's correlation with human judgments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Unknown,
}

/// Expected signs for grammaticality, meaning preservation and simplicity.
/// Informational only; nothing downstream depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionHint {
    pub grammaticality: Sign,
    pub meaning: Sign,
    pub simplicity: Sign,
}

macro_rules! features {
    ($($variant:ident => $name:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Feature {
            $($variant,)*
        }

        impl Feature {
            /// Every feature, in registry order.
            pub const ALL: &'static [Feature] = &[$(Feature::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Feature::$variant => $name,)*
                }
            }
        }
    };
}

features! {
    NbSourcePunct => "NBSourcePunct",
    NbSourceWords => "NBSourceWords",
    NbOutputPunct => "NBOutputPunct",
    TypeTokenRatio => "TypeTokenRatio",
    TerpDel => "TERp_Del",
    TerpNumEr => "TERp_NumEr",
    TerpSub => "TERp_Sub",
    Terp => "TERp",
    Bleu1 => "BLEU_1gram",
    Bleu2 => "BLEU_2gram",
    Bleu3 => "BLEU_3gram",
    Bleu4 => "BLEU_4gram",
    Meteor => "METEOR",
    Rouge => "ROUGE",
    BleuSmoothed => "BLEUSmoothed",
    AvgCosineSim => "AvgCosineSim",
    NbOutputChars => "NBOutputChars",
    NbOutputCharsPerSent => "NBOutputCharsPerSent",
    NbOutputSyllables => "NBOutputSyllables",
    NbOutputSyllablesPerSent => "NBOutputSyllablesPerSent",
    NbOutputWords => "NBOutputWords",
    NbOutputWordsPerSent => "NBOutputWordsPerSent",
    AvgLmProbsOutput => "AvgLMProbsOutput",
    MinLmProbsOutput => "MinLMProbsOutput",
    MaxPosInFreqTable => "MaxPosInFreqTable",
    AvgConcreteness => "AvgConcreteness",
    OutputFkgl => "OutputFKGL",
    OutputFre => "OutputFRE",
    WordsInCommon => "WordsInCommon",
}

impl Feature {
    pub fn requires(self) -> Option<ResourceKind> {
        use Feature::*;
        match self {
            AvgLmProbsOutput | MinLmProbsOutput => Some(ResourceKind::LanguageModel),
            AvgCosineSim => Some(ResourceKind::Vectors),
            MaxPosInFreqTable => Some(ResourceKind::FreqTable),
            AvgConcreteness => Some(ResourceKind::Concreteness),
            _ => None,
        }
    }

    pub fn direction_hint(self) -> DirectionHint {
        use Feature::*;
        use Sign::{Negative as N, Positive as P, Unknown as U};
        let (grammaticality, meaning, simplicity) = match self {
            Meteor | BleuSmoothed | Bleu2 | Bleu3 | Bleu4 | Bleu1 | Rouge | WordsInCommon => {
                (P, P, U)
            }
            AvgCosineSim | AvgLmProbsOutput => (P, P, U),
            Terp | TerpNumEr | TerpDel => (N, N, U),
            TerpSub => (U, U, U),
            NbSourceWords => (N, N, N),
            MinLmProbsOutput => (P, U, P),
            AvgConcreteness => (U, N, P),
            NbOutputChars
            | NbOutputCharsPerSent
            | NbOutputSyllables
            | NbOutputSyllablesPerSent
            | NbOutputWords
            | NbOutputWordsPerSent
            | NbOutputPunct
            | NbSourcePunct => (U, U, N),
            OutputFkgl | TypeTokenRatio | MaxPosInFreqTable => (U, U, N),
            OutputFre => (U, U, P),
        };
        DirectionHint {
            grammaticality,
            meaning,
            simplicity,
        }
    }

    /// Looks a feature up by its short name (exact match).
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.name() == name)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = super::FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s).ok_or_else(|| super::FeatureError::UnknownFeature(s.to_string()))
    }
}

/// Metadata for one registered feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSpec {
    pub feature: Feature,
    pub name: &'static str,
    pub requires: Option<ResourceKind>,
    pub direction_hint: DirectionHint,
}

pub fn registry() -> Vec<FeatureSpec> {
    Feature::ALL
        .iter()
        .map(|&feature| FeatureSpec {
            feature,
            name: feature.name(),
            requires: feature.requires(),
            direction_hint: feature.direction_hint(),
        })
        .collect()
}

/// Parses a comma-separated list of feature names; `all` selects everything.
pub fn parse_feature_list(list: &str) -> Result<Vec<Feature>, super::FeatureError> {
    let list = list.trim();
    if list.eq_ignore_ascii_case("all") {
        return Ok(Feature::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let f: Feature = name.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}
