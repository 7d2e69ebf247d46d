use std::io::Read;

use super::StatsError;

/// A `rows x columns` score table (datasets by methods) read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub row_names: Vec<String>,
    pub column_names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    /// Reads a CSV with a header row. A first column whose cells are not all
    /// numeric is taken as row names.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, StatsError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| StatsError::Format(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut records: Vec<Vec<String>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| StatsError::Format(e.to_string()))?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            records.push(rec.iter().map(str::to_string).collect());
        }
        if records.is_empty() {
            return Err(StatsError::Format("no data rows".into()));
        }
        let labelled = records.iter().any(|r| r[0].parse::<f64>().is_err());
        let skip = usize::from(labelled);
        let column_names = header[skip..].to_vec();
        let mut row_names = Vec::with_capacity(records.len());
        let mut values = Vec::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            row_names.push(if labelled { rec[0].clone() } else { format!("row{}", i + 1) });
            let row = rec[skip..]
                .iter()
                .map(|cell| {
                    cell.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| StatsError::Format(format!("row {}: `{cell}` is not a number", i + 1)))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if row.len() != column_names.len() {
                return Err(StatsError::Ragged);
            }
            values.push(row);
        }
        Ok(Self {
            row_names,
            column_names,
            values,
        })
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    /// Pairs of columns `a` and `b`, row by row.
    pub fn pairs(&self, a: usize, b: usize) -> Vec<(f64, f64)> {
        self.values.iter().map(|r| (r[a], r[b])).collect()
    }
}
