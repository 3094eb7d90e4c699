//! CSV ingestion with a missingness mask, and hot-deck imputation.

use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numkit::SeededRng;
use crate::simgen::Dataset;

/// A typed view of the columns an analysis uses: treatment, response, and
/// covariates, with a cell-level missingness mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Column names, in storage order.
    pub names: Vec<String>,
    /// Column-major values; missing cells hold NaN and set the mask.
    pub columns: Vec<Vec<f64>>,
    /// `missing[c][r]` is true where cell (r, c) was empty or `NA`.
    pub missing: Vec<Vec<bool>>,
    /// Storage index of the treatment column.
    pub treatment: usize,
    /// Storage index of the response column; absent for response-free
    /// pipelines such as score density comparison.
    pub response: Option<usize>,
    /// Storage indices of the covariate columns, in the order requested.
    pub covariates: Vec<usize>,
}

impl CsvTable {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|col| col.iter().any(|&m| m))
    }

    pub fn missing_cells(&self) -> usize {
        self.missing
            .iter()
            .map(|col| col.iter().filter(|&&m| m).count())
            .sum()
    }

    /// Converts to an estimator-ready dataset. Refuses tables that still
    /// contain missing cells. Tables ingested without a response column
    /// load a zero response, which score-only pipelines never read.
    pub fn to_dataset(&self) -> Result<Dataset> {
        if self.has_missing() {
            return Err(Error::MissingData);
        }
        let n = self.n_rows();
        let treatment: Vec<u8> = self.columns[self.treatment]
            .iter()
            .map(|&v| v as u8)
            .collect();
        let covariates = DMatrix::from_fn(n, self.covariates.len(), |i, j| {
            self.columns[self.covariates[j]][i]
        });
        let response = match self.response {
            Some(c) => DVector::from_fn(n, |i, _| self.columns[c][i]),
            None => DVector::zeros(n),
        };
        Dataset::new(covariates, treatment, response)
    }
}

/// Reads the named columns from a CSV file. Empty cells and the token `NA`
/// are missing; every other cell must parse as a finite number, and the
/// treatment column must be 0/1 wherever observed.
pub fn ingest_csv(
    path: &Path,
    treatment: &str,
    response: Option<&str>,
    covariates: &[String],
) -> Result<CsvTable> {
    let file = std::fs::File::open(path)?;
    ingest_csv_reader(file, treatment, response, covariates)
}

/// As [`ingest_csv`], from any reader.
pub fn ingest_csv_reader<R: Read>(
    reader: R,
    treatment: &str,
    response: Option<&str>,
    covariates: &[String],
) -> Result<CsvTable> {
    let mut requested: Vec<&str> = vec![treatment];
    requested.extend(response);
    requested.extend(covariates.iter().map(String::as_str));
    {
        let mut unique = std::collections::BTreeSet::new();
        for name in &requested {
            if !unique.insert(*name) {
                return Err(Error::Config(format!("column `{name}` requested twice")));
            }
        }
    }

    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 0,
            column: String::new(),
            message: e.to_string(),
        })?
        .clone();

    let mut file_index = Vec::with_capacity(requested.len());
    for name in &requested {
        let idx = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        file_index.push(idx);
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); requested.len()];
    let mut missing: Vec<Vec<bool>> = vec![Vec::new(); requested.len()];
    for (row_idx, record) in csv_reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        for (c, &file_col) in file_index.iter().enumerate() {
            let raw = record.get(file_col).ok_or_else(|| Error::Parse {
                row,
                column: requested[c].to_string(),
                message: "row has too few fields".into(),
            })?;
            if raw.is_empty() || raw == "NA" {
                columns[c].push(f64::NAN);
                missing[c].push(true);
                continue;
            }
            let value: f64 = raw.parse().map_err(|_| Error::Parse {
                row,
                column: requested[c].to_string(),
                message: format!("`{raw}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: requested[c].to_string(),
                    message: format!("`{raw}` is not finite"),
                });
            }
            if c == 0 && value != 0.0 && value != 1.0 {
                return Err(Error::NonBinaryTreatment {
                    row,
                    value: raw.to_string(),
                });
            }
            columns[c].push(value);
            missing[c].push(false);
        }
    }

    let covariate_base = if response.is_some() { 2 } else { 1 };
    Ok(CsvTable {
        names: requested.into_iter().map(String::from).collect(),
        columns,
        missing,
        treatment: 0,
        response: response.map(|_| 1),
        covariates: (covariate_base..covariate_base + covariates.len()).collect(),
    })
}

/// Replaces every missing cell by a uniform draw (with replacement) from its
/// column's observed values, clearing the mask. Deterministic given the
/// generator state; columns are visited in storage order, rows ascending.
pub fn hot_deck_impute(table: &CsvTable, rng: &mut SeededRng) -> Result<CsvTable> {
    let mut out = table.clone();
    for c in 0..out.columns.len() {
        if !table.missing[c].iter().any(|&m| m) {
            continue;
        }
        let observed: Vec<f64> = table.columns[c]
            .iter()
            .zip(&table.missing[c])
            .filter(|&(_, &m)| !m)
            .map(|(&v, _)| v)
            .collect();
        if observed.is_empty() {
            return Err(Error::AllMissingColumn(table.names[c].clone()));
        }
        for r in 0..table.n_rows() {
            if table.missing[c][r] {
                out.columns[c][r] = observed[rng.index(observed.len())];
                out.missing[c][r] = false;
            }
        }
    }
    Ok(out)
}
