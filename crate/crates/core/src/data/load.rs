use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Arff,
}

impl Format {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "arff" => Some(Format::Arff),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "arff" => Ok(Format::Arff),
            other => Err(DataError::UnknownFormat(other.to_string())),
        }
    }
}

/// Maps raw label cells to the defective flag.
///
/// Numeric cells are defective when greater than zero (this covers `1`/`0`
/// flags and PROMISE bug counts). Other cells are matched case-insensitively
/// against the token lists.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRule {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub numeric_above_zero: bool,
}

impl Default for LabelRule {
    fn default() -> Self {
        Self {
            positive: ["y", "yes", "true", "defective", "buggy"]
                .map(String::from)
                .to_vec(),
            negative: ["n", "no", "false", "clean", "non-defective"]
                .map(String::from)
                .to_vec(),
            numeric_above_zero: true,
        }
    }
}

impl LabelRule {
    pub fn classify(&self, raw: &str) -> Option<bool> {
        let token = raw.trim().trim_matches(|c| c == '\'' || c == '"');
        if self.numeric_above_zero {
            if let Ok(v) = token.parse::<f64>() {
                return v.is_finite().then_some(v > 0.0);
            }
        }
        if self.positive.iter().any(|p| p.eq_ignore_ascii_case(token)) {
            Some(true)
        } else if self.negative.iter().any(|n| n.eq_ignore_ascii_case(token)) {
            Some(false)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Forced format; inferred from the extension when `None`.
    pub format: Option<Format>,
    /// Label column name; the last column when `None`.
    pub label_column: Option<String>,
    /// Non-feature columns to skip (e.g. PROMISE `name`/`version`).
    pub drop_columns: Vec<String>,
    pub labels: LabelRule,
}

pub fn load_dataset(path: &Path, options: &LoadOptions) -> Result<Dataset, DataError> {
    let format = match options.format {
        Some(f) => f,
        None => Format::from_path(path).ok_or_else(|| {
            DataError::UnknownFormat(
                path.extension()
                    .map(|e| e.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            )
        })?,
    };
    let io_err = |source| DataError::Io {
        path: path.display().to_string(),
        source,
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = std::fs::File::open(path).map_err(io_err)?;
    match format {
        Format::Csv => parse_csv(file, &name, options),
        Format::Arff => {
            let mut text = String::new();
            std::io::BufReader::new(file)
                .read_to_string(&mut text)
                .map_err(io_err)?;
            parse_arff(&text, &name, options)
        }
    }
}

/// Column-oriented staging shared by both parsers.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn into_dataset(self, name: &str, options: &LoadOptions) -> Result<Dataset, DataError> {
        let label_idx = match &options.label_column {
            Some(label) => self
                .columns
                .iter()
                .position(|c| c.eq_ignore_ascii_case(label))
                .ok_or_else(|| DataError::MissingLabelColumn(label.clone()))?,
            None => self
                .columns
                .len()
                .checked_sub(1)
                .ok_or(DataError::NoFeatures)?,
        };
        let feature_idx: Vec<usize> = (0..self.columns.len())
            .filter(|&i| i != label_idx)
            .filter(|&i| {
                !options
                    .drop_columns
                    .iter()
                    .any(|d| d.eq_ignore_ascii_case(&self.columns[i]))
            })
            .collect();
        if feature_idx.is_empty() {
            return Err(DataError::NoFeatures);
        }
        if self.rows.len() < 2 {
            return Err(DataError::TooFewRows(self.rows.len()));
        }

        let mut values = Vec::with_capacity(self.rows.len() * feature_idx.len());
        let mut labels = Vec::with_capacity(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(DataError::Parse {
                    line: r + 1,
                    message: format!(
                        "expected {} fields, found {}",
                        self.columns.len(),
                        row.len()
                    ),
                });
            }
            for &c in &feature_idx {
                let cell = row[c].trim();
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        return Err(DataError::NonNumeric {
                            row: r,
                            column: self.columns[c].clone(),
                            value: cell.to_string(),
                        })
                    }
                }
            }
            let label = options
                .labels
                .classify(&row[label_idx])
                .ok_or_else(|| DataError::UnknownLabel {
                    row: r,
                    value: row[label_idx].trim().to_string(),
                })?;
            labels.push(label);
        }
        let features = Array2::from_shape_vec((self.rows.len(), feature_idx.len()), values)
            .expect("row-major buffer matches shape");
        let feature_names = feature_idx.iter().map(|&i| self.columns[i].clone()).collect();
        Dataset::new(name, feature_names, features, labels)
    }
}

/// Parses a CSV file with a header row.
pub fn parse_csv<R: Read>(reader: R, name: &str, options: &LoadOptions) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let columns = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Table { columns, rows }.into_dataset(name, options)
}

fn strip_quotes(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2
        && ((s.starts_with('\'') && s.ends_with('\'')) || (s.starts_with('"') && s.ends_with('"')))
    {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Splits `@attribute <name> <type>` into name and type, honouring quotes.
fn split_attribute(rest: &str) -> Option<(&str, &str)> {
    let rest = rest.trim();
    let quote = rest.chars().next()?;
    if quote == '\'' || quote == '"' {
        let end = rest[1..].find(quote)? + 1;
        Some((&rest[1..end], rest[end + 1..].trim()))
    } else {
        let end = rest.find(char::is_whitespace)?;
        Some((&rest[..end], rest[end..].trim()))
    }
}

/// Parses the supported ARFF subset: `@relation`, numeric attributes, nominal
/// attributes (only as the label column), `@data` with dense rows.
///
/// `%` comment lines are skipped; sparse `{...}` rows are rejected.
pub fn parse_arff(text: &str, name: &str, options: &LoadOptions) -> Result<Dataset, DataError> {
    let mut columns = Vec::new();
    let mut nominal = Vec::new();
    let mut rows = Vec::new();
    let mut relation = None;
    let mut in_data = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parse_err = |message: String| DataError::Parse {
            line: lineno + 1,
            message,
        };
        if in_data {
            if line.starts_with('{') {
                return Err(parse_err("sparse ARFF rows are not supported".into()));
            }
            rows.push(line.split(',').map(|c| strip_quotes(c).to_string()).collect());
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            relation = Some(strip_quotes(&line["@relation".len()..]).to_string());
        } else if lower.starts_with("@attribute") {
            let (attr, ty) = split_attribute(&line["@attribute".len()..])
                .ok_or_else(|| parse_err("malformed @attribute".into()))?;
            let ty_lower = ty.to_ascii_lowercase();
            let is_nominal = ty.starts_with('{');
            if !is_nominal && !matches!(ty_lower.as_str(), "numeric" | "real" | "integer") {
                return Err(parse_err(format!("unsupported attribute type `{ty}`")));
            }
            columns.push(attr.to_string());
            nominal.push(is_nominal);
        } else if lower.starts_with("@data") {
            in_data = true;
        } else {
            return Err(parse_err(format!("unexpected header line `{line}`")));
        }
    }
    if !in_data {
        return Err(DataError::Parse {
            line: text.lines().count(),
            message: "missing @data section".into(),
        });
    }

    let table = Table { columns, rows };
    let label_idx = match &options.label_column {
        Some(label) => table
            .columns
            .iter()
            .position(|c| c.eq_ignore_ascii_case(label))
            .ok_or_else(|| DataError::MissingLabelColumn(label.clone()))?,
        None => table.columns.len().saturating_sub(1),
    };
    if let Some(i) = nominal
        .iter()
        .enumerate()
        .position(|(i, &n)| n && i != label_idx)
    {
        return Err(DataError::Parse {
            line: 0,
            message: format!(
                "nominal attribute `{}` is only supported as the class column",
                table.columns[i]
            ),
        });
    }
    let name = relation.unwrap_or_else(|| name.to_string());
    table.into_dataset(&name, options)
}
