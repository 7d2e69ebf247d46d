//! Dataset ingestion, min-max normalisation and stratified fold planning.

mod folds;
mod load;
mod normalize;
pub mod synthetic;

use std::io;
use std::path::Path;

use ndarray::{Array2, Axis};
use thiserror::Error;

pub use folds::{stratified_kfold, stratified_split, Fold, FoldPlan};
pub use load::{load_dataset, parse_arff, parse_csv, Format, LabelRule, LoadOptions};
pub use normalize::{fit_normalizer, normalize, NormalizationParams};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("label column `{0}` not found")]
    MissingLabelColumn(String),
    #[error("row {row}, column `{column}`: `{value}` is not a finite number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: unknown label value `{value}`")]
    UnknownLabel { row: usize, value: String },
    #[error("dataset has {0} rows, at least 2 are required")]
    TooFewRows(usize),
    #[error("dataset has no feature columns")]
    NoFeatures,
    #[error("dataset contains a single class")]
    SingleClass,
    #[error("{rows} rows but {labels} labels")]
    LabelCountMismatch { rows: usize, labels: usize },
    #[error("expected {expected} feature columns, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("cannot build {k} stratified folds: a class has only {members} members")]
    Stratification { k: usize, members: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
}

/// A labelled defect dataset. Rows are modules, columns are metrics.
///
/// Labels are `true` for defective modules.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub features: Array2<f64>,
    pub labels: Vec<bool>,
}

impl Dataset {
    /// Builds a dataset, checking shape and finiteness.
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        features: Array2<f64>,
        labels: Vec<bool>,
    ) -> Result<Self, DataError> {
        if features.nrows() != labels.len() {
            return Err(DataError::LabelCountMismatch {
                rows: features.nrows(),
                labels: labels.len(),
            });
        }
        if features.ncols() == 0 {
            return Err(DataError::NoFeatures);
        }
        if feature_names.len() != features.ncols() {
            return Err(DataError::WidthMismatch {
                expected: features.ncols(),
                found: feature_names.len(),
            });
        }
        if let Some(((row, col), value)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(DataError::NonNumeric {
                row,
                column: feature_names[col].clone(),
                value: value.to_string(),
            });
        }
        Ok(Self {
            name: name.into(),
            feature_names,
            features,
            labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// `(defective, non_defective)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let defective = self.labels.iter().filter(|&&l| l).count();
        (defective, self.labels.len() - defective)
    }

    pub fn has_both_classes(&self) -> bool {
        let (pos, neg) = self.class_counts();
        pos > 0 && neg > 0
    }

    /// A new dataset holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            features: self.features.select(Axis(0), rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }

    /// Writes the dataset as CSV with a trailing `defective` column (0/1).
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push("defective");
        w.write_record(&header)?;
        for (row, &label) in self.features.rows().into_iter().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            record.push(if label { "1" } else { "0" }.to_string());
            w.write_record(&record)?;
        }
        w.flush().map_err(|source| DataError::Io {
            path: "<writer>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), DataError> {
        let file = std::fs::File::create(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.write_csv(io::BufWriter::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_non_finite_values() {
        let err = Dataset::new(
            "x",
            vec!["a".into()],
            array![[1.0], [f64::NAN]],
            vec![true, false],
        )
        .unwrap_err();
        assert!(matches!(err, DataError::NonNumeric { row: 1, .. }));
    }

    #[test]
    fn select_rows_keeps_labels_aligned() {
        let ds = Dataset::new(
            "x",
            vec!["a".into()],
            array![[1.0], [2.0], [3.0]],
            vec![true, false, true],
        )
        .unwrap();
        let sub = ds.select_rows(&[2, 1]);
        assert_eq!(sub.features, array![[3.0], [2.0]]);
        assert_eq!(sub.labels, vec![true, false]);
    }

    #[test]
    fn csv_output_round_trips_through_loader() {
        let ds = Dataset::new(
            "x",
            vec!["a".into(), "b".into()],
            array![[1.5, 0.0], [2.0, -3.25]],
            vec![true, false],
        )
        .unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = parse_csv(&buf[..], "x", &LoadOptions::default()).unwrap();
        assert_eq!(back.features, ds.features);
        assert_eq!(back.labels, ds.labels);
    }
}
