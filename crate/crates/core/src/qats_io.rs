//! QATS-format datasets: tab-separated source/output pairs with optional
//! Good/OK/Bad labels for grammaticality, meaning preservation, simplicity
//! and overall quality.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Bad,
    Ok,
    Good,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Bad, Label::Ok, Label::Good];

    /// Ordinal encoding: Bad = 0, OK = 1, Good = 2.
    pub fn encode(self) -> f64 {
        match self {
            Label::Bad => 0.0,
            Label::Ok => 1.0,
            Label::Good => 2.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Bad => "Bad",
            Label::Ok => "OK",
            Label::Good => "Good",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "good" => Ok(Label::Good),
            "ok" => Ok(Label::Ok),
            "bad" => Ok(Label::Bad),
            other => Err(format!("invalid label {other:?}; expected good, ok or bad")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Grammaticality,
    Meaning,
    Simplicity,
    Overall,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Grammaticality,
        Dimension::Meaning,
        Dimension::Simplicity,
        Dimension::Overall,
    ];

    /// Column name in the TSV schema.
    pub fn column(self) -> &'static str {
        match self {
            Dimension::Grammaticality => "G",
            Dimension::Meaning => "M",
            Dimension::Simplicity => "S",
            Dimension::Overall => "Overall",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            Dimension::Grammaticality => "grammaticality",
            Dimension::Meaning => "meaning preservation",
            Dimension::Simplicity => "simplicity",
            Dimension::Overall => "overall",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g" | "grammaticality" => Ok(Dimension::Grammaticality),
            "m" | "meaning" | "meaning-preservation" => Ok(Dimension::Meaning),
            "s" | "simplicity" => Ok(Dimension::Simplicity),
            "overall" | "o" => Ok(Dimension::Overall),
            other => Err(format!(
                "unknown dimension {other:?}; expected G, M, S or overall"
            )),
        }
    }
}

/// Labels for all four dimensions of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Labels([Label; 4]);

impl Labels {
    pub fn new(g: Label, m: Label, s: Label, overall: Label) -> Self {
        Self([g, m, s, overall])
    }

    pub fn get(&self, d: Dimension) -> Label {
        self.0[d.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QatsRecord {
    pub id: String,
    pub source_text: String,
    pub output_text: String,
    pub labels: Option<Labels>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitTag {
    Train,
    Test,
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<QatsRecord>,
    pub split: SplitTag,
}

#[derive(Debug, Error)]
pub enum QatsError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: empty file (a header line is required)", path.display())]
    NoHeader { path: PathBuf },
    #[error("{}: missing required column {column:?}", path.display())]
    MissingColumn { path: PathBuf, column: &'static str },
    #[error("{}: label columns must be all present or all absent; missing {missing:?}", path.display())]
    PartialLabels {
        path: PathBuf,
        missing: Vec<&'static str>,
    },
    #[error("{}: row {row}, column {column}: {message}", path.display())]
    BadLabel {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },
    #[error("{}: row {row}: expected {expected} fields, found {found}", path.display())]
    FieldCount {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{}: row {row}: empty source text", path.display())]
    EmptySource { path: PathBuf, row: usize },
    #[error("{}: row {row}: duplicate id {id:?}", path.display())]
    DuplicateId {
        path: PathBuf,
        row: usize,
        id: String,
    },
    #[error("{}: ambiguous header, columns {first:?} and {second:?} both map to {role}", path.display())]
    AmbiguousColumn {
        path: PathBuf,
        role: &'static str,
        first: String,
        second: String,
    },
    #[error("{}: {found} lines, expected {expected} to match the source file", path.display())]
    LineCount {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("dataset has no labels")]
    Unlabeled,
    #[error("record {id}: text contains a tab or newline and cannot be written as TSV")]
    UnwritableText { id: String },
    #[error("write failed: {0}")]
    Write(#[from] io::Error),
}

fn open(path: &Path) -> Result<BufReader<File>, QatsError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| QatsError::Io {
            path: path.to_path_buf(),
            source,
        })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Id,
    Source,
    Output,
    Label(Dimension),
}

impl Role {
    fn from_header(h: &str) -> Option<Role> {
        Some(match h.trim().to_ascii_lowercase().as_str() {
            "id" => Role::Id,
            "original" | "source" => Role::Source,
            "simplified" | "simplification" | "output" => Role::Output,
            "g" | "grammaticality" => Role::Label(Dimension::Grammaticality),
            "m" | "meaning" | "meaning_preservation" => Role::Label(Dimension::Meaning),
            "s" | "simplicity" => Role::Label(Dimension::Simplicity),
            "overall" => Role::Label(Dimension::Overall),
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Role::Id => "id",
            Role::Source => "original",
            Role::Output => "simplified",
            Role::Label(d) => d.column(),
        }
    }
}

/// Loads a QATS TSV file with a header naming at least `original` and
/// `simplified` (aliases `source` and `simplification`/`output`),
/// optionally `id` and the four label columns `G`, `M`, `S`, `Overall`.
/// Header names are case-insensitive and unknown columns are ignored.
///
/// Rows without an `id` column get their 1-based row number as id. The
/// split tag is [`SplitTag::Unlabeled`] without labels, otherwise `Test`
/// when the file name contains "test" and `Train` otherwise; use
/// [`Dataset::with_split`] to override.
pub fn load_dataset(path: &Path) -> Result<Dataset, QatsError> {
    let reader = open(path)?;
    let io = |source| QatsError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(io)?,
        None => {
            return Err(QatsError::NoHeader {
                path: path.to_path_buf(),
            })
        }
    };
    let header = header.trim_end_matches('\r');
    let columns: Vec<&str> = header.split('\t').collect();

    let mut index: BTreeMap<usize, Role> = BTreeMap::new();
    let mut position = |role: Role| -> Result<Option<usize>, QatsError> {
        let hits: Vec<usize> = columns
            .iter()
            .enumerate()
            .filter(|(_, h)| Role::from_header(h) == Some(role))
            .map(|(i, _)| i)
            .collect();
        if hits.len() > 1 {
            return Err(QatsError::AmbiguousColumn {
                path: path.to_path_buf(),
                role: role.name(),
                first: columns[hits[0]].to_string(),
                second: columns[hits[1]].to_string(),
            });
        }
        if let Some(&i) = hits.first() {
            index.insert(i, role);
        }
        Ok(hits.first().copied())
    };
    let id_col = position(Role::Id)?;
    let missing = |role: Role| QatsError::MissingColumn {
        path: path.to_path_buf(),
        column: role.name(),
    };
    let src_col = position(Role::Source)?.ok_or_else(|| missing(Role::Source))?;
    let out_col = position(Role::Output)?.ok_or_else(|| missing(Role::Output))?;
    let mut label_cols = Vec::new();
    for d in Dimension::ALL {
        label_cols.push((d, position(Role::Label(d))?));
    }
    let present = label_cols.iter().filter(|(_, c)| c.is_some()).count();
    if present != 0 && present != label_cols.len() {
        return Err(QatsError::PartialLabels {
            path: path.to_path_buf(),
            missing: label_cols
                .iter()
                .filter(|(_, c)| c.is_none())
                .map(|(d, _)| d.column())
                .collect(),
        });
    }
    let labeled = present > 0;

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let line = line.map_err(io)?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns.len() {
            return Err(QatsError::FieldCount {
                path: path.to_path_buf(),
                row,
                expected: columns.len(),
                found: fields.len(),
            });
        }
        let source_text = fields[src_col].to_string();
        if source_text.trim().is_empty() {
            return Err(QatsError::EmptySource {
                path: path.to_path_buf(),
                row,
            });
        }
        let labels = if labeled {
            let mut parsed = [Label::Bad; 4];
            for (d, col) in &label_cols {
                let col = col.expect("all label columns present");
                parsed[d.index()] = fields[col].parse().map_err(|message| QatsError::BadLabel {
                    path: path.to_path_buf(),
                    row,
                    column: columns[col].to_string(),
                    message,
                })?;
            }
            Some(Labels(parsed))
        } else {
            None
        };
        let id = match id_col {
            Some(c) => fields[c].trim().to_string(),
            None => row.to_string(),
        };
        if !seen.insert(id.clone()) {
            return Err(QatsError::DuplicateId {
                path: path.to_path_buf(),
                row,
                id,
            });
        }
        records.push(QatsRecord {
            id,
            source_text,
            output_text: fields[out_col].to_string(),
            labels,
        });
    }

    let split = if !labeled {
        SplitTag::Unlabeled
    } else if path
        .file_name()
        .is_some_and(|n| n.to_string_lossy().to_lowercase().contains("test"))
    {
        SplitTag::Test
    } else {
        SplitTag::Train
    };
    Ok(Dataset { records, split })
}

impl Dataset {
    pub fn with_split(mut self, split: SplitTag) -> Self {
        self.split = split;
        self
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.labels.is_some())
    }

    /// Labels of one dimension in record order.
    pub fn labels(&self, dimension: Dimension) -> Result<Vec<Label>, QatsError> {
        self.records
            .iter()
            .map(|r| {
                r.labels
                    .map(|l| l.get(dimension))
                    .ok_or(QatsError::Unlabeled)
            })
            .collect()
    }
}

/// Counts per label, every label present as a key.
pub fn label_distribution(
    ds: &Dataset,
    dimension: Dimension,
) -> Result<BTreeMap<Label, usize>, QatsError> {
    let mut counts: BTreeMap<Label, usize> = Label::ALL.iter().map(|&l| (l, 0)).collect();
    for l in ds.labels(dimension)? {
        *counts.get_mut(&l).expect("all labels seeded") += 1;
    }
    Ok(counts)
}

/// Bad = 0, OK = 1, Good = 2, in record order.
pub fn encode_labels(ds: &Dataset, dimension: Dimension) -> Result<Vec<f64>, QatsError> {
    Ok(ds
        .labels(dimension)?
        .into_iter()
        .map(Label::encode)
        .collect())
}

/// Writes the canonical TSV form that [`load_dataset`] reads back.
pub fn serialize<W: Write>(ds: &Dataset, mut w: W) -> Result<(), QatsError> {
    for r in &ds.records {
        for text in [&r.id, &r.source_text, &r.output_text] {
            if text.contains(['\t', '\n', '\r']) {
                return Err(QatsError::UnwritableText { id: r.id.clone() });
            }
        }
    }
    let labeled = ds.records.iter().any(|r| r.labels.is_some());
    if labeled && !ds.is_labeled() {
        return Err(QatsError::Unlabeled);
    }
    write!(w, "id\toriginal\tsimplified")?;
    if labeled {
        for d in Dimension::ALL {
            write!(w, "\t{}", d.column())?;
        }
    }
    writeln!(w)?;
    for r in &ds.records {
        write!(w, "{}\t{}\t{}", r.id, r.source_text, r.output_text)?;
        if let Some(l) = r.labels {
            for d in Dimension::ALL {
                write!(w, "\t{}", l.get(d))?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>, QatsError> {
    let reader = open(path)?;
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|source| QatsError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        out.push(line.trim_end_matches('\r').to_string());
    }
    while out.last().is_some_and(|l| l.trim().is_empty()) {
        out.pop();
    }
    Ok(out)
}

/// Builds a dataset from aligned plain-text files, one sentence (or label)
/// per line. `label_files` are in `G, M, S, Overall` order.
pub fn convert_parallel(
    source: &Path,
    output: &Path,
    label_files: Option<[&Path; 4]>,
) -> Result<Dataset, QatsError> {
    let sources = read_lines(source)?;
    let outputs = read_lines(output)?;
    let check = |path: &Path, found: usize| {
        if found == sources.len() {
            Ok(())
        } else {
            Err(QatsError::LineCount {
                path: path.to_path_buf(),
                expected: sources.len(),
                found,
            })
        }
    };
    check(output, outputs.len())?;
    let mut labels: Option<Vec<[Label; 4]>> = None;
    if let Some(files) = label_files {
        let mut all = vec![[Label::Bad; 4]; sources.len()];
        for (d, file) in Dimension::ALL.iter().zip(files) {
            let lines = read_lines(file)?;
            check(file, lines.len())?;
            for (row, value) in lines.iter().enumerate() {
                all[row][d.index()] = value.parse().map_err(|message| QatsError::BadLabel {
                    path: file.to_path_buf(),
                    row: row + 1,
                    column: d.column().to_string(),
                    message,
                })?;
            }
        }
        labels = Some(all);
    }
    let mut records = Vec::with_capacity(sources.len());
    for (i, (s, o)) in sources.into_iter().zip(outputs).enumerate() {
        if s.trim().is_empty() {
            return Err(QatsError::EmptySource {
                path: source.to_path_buf(),
                row: i + 1,
            });
        }
        records.push(QatsRecord {
            id: (i + 1).to_string(),
            source_text: s,
            output_text: o,
            labels: labels.as_ref().map(|l| Labels(l[i])),
        });
    }
    let split = if labels.is_some() {
        SplitTag::Train
    } else {
        SplitTag::Unlabeled
    };
    Ok(Dataset { records, split })
}
