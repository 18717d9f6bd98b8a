use std::io::{BufRead, Write};

use super::FeatureError;

/// Rows of feature values aligned with `feature_names`, one per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    row_ids: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    /// # Panics
    ///
    /// Panics if ids and rows disagree in number or a row has the wrong width.
    pub fn new(feature_names: Vec<String>, row_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(row_ids.len(), rows.len(), "one id per row");
        assert!(
            rows.iter().all(|r| r.len() == feature_names.len()),
            "every row needs one value per feature"
        );
        Self {
            feature_names,
            row_ids,
            rows,
        }
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.feature_names.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }

    /// Sub-matrix with the named columns, in the order given.
    pub fn select(&self, names: &[String]) -> Option<FeatureMatrix> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.column_index(n))
            .collect::<Option<_>>()?;
        Some(FeatureMatrix {
            feature_names: names.to_vec(),
            row_ids: self.row_ids.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i]).collect())
                .collect(),
        })
    }

    /// TSV with header `id<TAB>name...`; values use the shortest decimal
    /// that parses back to the same `f64`.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "id")?;
        for name in &self.feature_names {
            write!(w, "\t{name}")?;
        }
        writeln!(w)?;
        for (id, row) in self.row_ids.iter().zip(&self.rows) {
            write!(w, "{id}")?;
            for v in row {
                write!(w, "\t{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self, FeatureError> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| FeatureError::MatrixParse {
            line: 1,
            message: "missing header".into(),
        })??;
        let mut cols = header.split('\t');
        if cols.next() != Some("id") {
            return Err(FeatureError::MatrixParse {
                line: 1,
                message: "header must start with \"id\"".into(),
            });
        }
        let feature_names: Vec<String> = cols.map(str::to_string).collect();

        let mut row_ids = Vec::new();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let id = fields.next().unwrap_or_default().to_string();
            let row = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| FeatureError::MatrixParse {
                        line: line_no,
                        message: format!("invalid number {f:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != feature_names.len() {
                return Err(FeatureError::MatrixParse {
                    line: line_no,
                    message: format!(
                        "expected {} values, found {}",
                        feature_names.len(),
                        row.len()
                    ),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(FeatureError::MatrixParse {
                    line: line_no,
                    message: "non-finite value".into(),
                });
            }
            row_ids.push(id);
            rows.push(row);
        }
        Ok(Self {
            feature_names,
            row_ids,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> FeatureMatrix {
        FeatureMatrix::new(
            vec!["A".into(), "B".into()],
            vec!["r1".into(), "r2".into()],
            vec![vec![0.1, -3.0], vec![1e-300, 2.0 / 3.0]],
        )
    }

    #[test]
    fn tsv_layout() {
        let mut buf = Vec::new();
        sample().write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("id\tA\tB\nr1\t0.1\t-3\n"));
    }

    #[test]
    fn select_columns() {
        let m = sample().select(&["B".to_string()]).unwrap();
        assert_eq!(m.column(0), vec![-3.0, 2.0 / 3.0]);
        assert!(sample().select(&["C".to_string()]).is_none());
    }

    #[test]
    fn bad_rows_rejected() {
        let short = "id\tA\tB\nr1\t1\n";
        assert!(matches!(
            FeatureMatrix::read_tsv(short.as_bytes()),
            Err(FeatureError::MatrixParse { line: 2, .. })
        ));
        assert!(FeatureMatrix::read_tsv("name\tA\n".as_bytes()).is_err());
        assert!(FeatureMatrix::read_tsv("id\tA\nr\tNaN\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(values in prop::collection::vec(-1e12f64..1e12, 6)) {
            let m = FeatureMatrix::new(
                vec!["a".into(), "b".into(), "c".into()],
                vec!["x".into(), "y".into()],
                values.chunks(3).map(<[f64]>::to_vec).collect(),
            );
            let mut buf = Vec::new();
            m.write_tsv(&mut buf).unwrap();
            let back = FeatureMatrix::read_tsv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
