//! Datasets: loading, encoding and resampling.

mod bundled;
mod split;
pub mod synthetic;

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bundled::{bundled, bundled_names, default_target};
pub use split::{fast_holdout, initial_split, vfold, FoldAssignment, TrainTestSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Binary,
    Continuous,
}

impl ResponseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ResponseKind::Binary => "binary",
            ResponseKind::Continuous => "continuous",
        }
    }
}

/// Response values. Binary labels are stored as 0.0 / 1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    kind: ResponseKind,
    values: Vec<f64>,
}

impl Response {
    pub fn binary(labels: Vec<f64>) -> Result<Self> {
        if labels.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidDataset(
                "binary labels must be 0 or 1".into(),
            ));
        }
        let r = Response {
            kind: ResponseKind::Binary,
            values: labels,
        };
        if !r.has_both_classes() {
            return Err(Error::SingleClass);
        }
        Ok(r)
    }

    pub fn continuous(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite response value".into()));
        }
        Ok(Response {
            kind: ResponseKind::Continuous,
            values,
        })
    }

    pub fn kind(&self) -> ResponseKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_both_classes(&self) -> bool {
        self.values.contains(&0.0) && self.values.contains(&1.0)
    }

    fn select(&self, rows: &[usize]) -> Response {
        Response {
            kind: self.kind,
            values: rows.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Dense row-major matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::RaggedRow {
                    row: i,
                    found: r.len(),
                    expected: cols,
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Encoded feature matrix plus response. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    feature_names: Vec<String>,
    response: Response,
    class_labels: Option<[String; 2]>,
}

impl Dataset {
    pub fn new(features: Matrix, feature_names: Vec<String>, response: Response) -> Result<Self> {
        let (n, p) = (features.nrows(), features.ncols());
        if n < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 rows, got {n}")));
        }
        if p < 1 {
            return Err(Error::InvalidDataset("need at least one feature".into()));
        }
        if feature_names.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: feature_names.len(),
            });
        }
        if response.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: response.len(),
            });
        }
        if features.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite feature value".into()));
        }
        Ok(Dataset {
            features,
            feature_names,
            response,
            class_labels: None,
        })
    }

    /// Convenience constructor from row vectors with generated feature names.
    pub fn from_rows(rows: &[Vec<f64>], response: Response) -> Result<Self> {
        let features = Matrix::from_rows(rows)?;
        let names = (1..=features.ncols()).map(|j| format!("x{j}")).collect();
        Dataset::new(features, names, response)
    }

    pub fn with_class_labels(mut self, negative: String, positive: String) -> Self {
        self.class_labels = Some([negative, positive]);
        self
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn response(&self) -> &Response {
        &self.response
    }

    pub fn y(&self) -> &[f64] {
        self.response.values()
    }

    pub fn kind(&self) -> ResponseKind {
        self.response.kind()
    }

    /// Original string labels for classes 0 and 1, when loaded from text.
    pub fn class_labels(&self) -> Option<&[String; 2]> {
        self.class_labels.as_ref()
    }

    /// Row subset in the given order. Class balance is not re-validated, so a
    /// subset of a binary dataset may hold a single class.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(rows),
            feature_names: self.feature_names.clone(),
            response: self.response.select(rows),
            class_labels: self.class_labels.clone(),
        }
    }
}

/// Loads a CSV file. See [`load_csv_reader`].
pub fn load_csv(path: impl AsRef<Path>, target: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_csv_reader(file, target)
}

/// Parses a headed, comma-delimited table.
///
/// Columns that are entirely numeric stay numeric; any other column is one-hot
/// encoded with one indicator per distinct level (levels in sorted order).
/// A numeric target gives a continuous response. A text target must have
/// exactly two levels; the lexicographically larger one becomes class 1.
/// Empty cells and `NA` / `?` markers are load errors.
pub fn load_csv_reader<R: Read>(reader: R, target: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let target_idx = headers
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::MissingTarget(target.to_string()))?;

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != headers.len() {
            return Err(Error::RaggedRow {
                row,
                found: rec.len(),
                expected: headers.len(),
            });
        }
        for (j, v) in rec.iter().enumerate() {
            if is_missing(v) {
                return Err(Error::Unparseable {
                    row,
                    column: headers[j].clone(),
                    value: v.to_string(),
                });
            }
            cells[j].push(v.to_string());
        }
    }
    let n = cells[0].len();

    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (j, col) in cells.iter().enumerate() {
        if j == target_idx {
            continue;
        }
        match parse_numeric(col) {
            Some(values) => {
                if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::Unparseable {
                        row,
                        column: headers[j].clone(),
                        value: col[row].clone(),
                    });
                }
                names.push(headers[j].clone());
                columns.push(values);
            }
            None => {
                let levels: BTreeSet<&str> = col.iter().map(String::as_str).collect();
                for level in levels {
                    names.push(format!("{}={}", headers[j], level));
                    columns.push(
                        col.iter()
                            .map(|v| if v == level { 1.0 } else { 0.0 })
                            .collect(),
                    );
                }
            }
        }
    }

    let p = columns.len();
    let mut data = Vec::with_capacity(n * p);
    for i in 0..n {
        data.extend(columns.iter().map(|c| c[i]));
    }
    let features = Matrix::from_vec(n, p, data)?;

    let tcol = &cells[target_idx];
    match parse_numeric(tcol) {
        Some(y) => {
            if let Some(row) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::Unparseable {
                    row,
                    column: target.to_string(),
                    value: tcol[row].clone(),
                });
            }
            if y.iter().all(|&v| v == y[0]) {
                return Err(Error::ConstantTarget);
            }
            Dataset::new(features, names, Response::continuous(y)?)
        }
        None => {
            let levels: Vec<&str> = tcol
                .iter()
                .map(String::as_str)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            match levels.len() {
                0 | 1 => Err(Error::SingleClass),
                2 => {
                    let y = tcol
                        .iter()
                        .map(|v| if v == levels[1] { 1.0 } else { 0.0 })
                        .collect();
                    let (neg, pos) = (levels[0].to_string(), levels[1].to_string());
                    Ok(Dataset::new(features, names, Response::binary(y)?)?
                        .with_class_labels(neg, pos))
                }
                k => Err(Error::InvalidDataset(format!(
                    "target `{target}` has {k} levels; only binary or numeric targets are supported"
                ))),
            }
        }
    }
}

fn is_missing(v: &str) -> bool {
    v.is_empty() || v == "NA" || v == "?"
}

fn parse_numeric(col: &[String]) -> Option<Vec<f64>> {
    col.iter().map(|v| v.parse::<f64>().ok()).collect()
}
