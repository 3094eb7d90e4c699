//! The unit of data every estimator consumes.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `n` observations of (covariate vector, binary treatment, response).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Covariates, one observation per row.
    pub covariates: DMatrix<f64>,
    /// Treatment indicators, entries 0 or 1.
    pub treatment: Vec<u8>,
    /// Responses.
    pub response: DVector<f64>,
}

impl Dataset {
    pub fn new(covariates: DMatrix<f64>, treatment: Vec<u8>, response: DVector<f64>) -> Result<Self> {
        let n = covariates.nrows();
        if treatment.len() != n || response.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "covariates have {n} rows, treatment {} entries, response {}",
                treatment.len(),
                response.len()
            )));
        }
        if let Some(&bad) = treatment.iter().find(|&&t| t > 1) {
            return Err(Error::Domain(format!(
                "treatment entries must be 0 or 1, found {bad}"
            )));
        }
        if covariates.iter().any(|v| !v.is_finite()) || response.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("dataset entries must be finite".into()));
        }
        Ok(Dataset {
            covariates,
            treatment,
            response,
        })
    }

    pub fn n(&self) -> usize {
        self.treatment.len()
    }

    pub fn p(&self) -> usize {
        self.covariates.ncols()
    }

    pub fn treated_count(&self) -> usize {
        self.treatment.iter().filter(|&&t| t == 1).count()
    }

    pub fn control_count(&self) -> usize {
        self.n() - self.treated_count()
    }

    /// Covariate rows as owned vectors, convenient for repeated evaluation
    /// of score and outcome functions.
    pub fn covariate_rows(&self) -> Vec<DVector<f64>> {
        (0..self.n())
            .map(|i| DVector::from_fn(self.p(), |j, _| self.covariates[(i, j)]))
            .collect()
    }

    /// Treatment as 0.0/1.0, for design matrices.
    pub fn treatment_f64(&self) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.treatment.iter().map(|&t| t as f64))
    }

    /// Writes `x1,..,xp,t,y` rows with full-precision floats.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let p = self.p();
        for j in 0..p {
            write!(out, "x{},", j + 1)?;
        }
        writeln!(out, "t,y")?;
        for i in 0..self.n() {
            for j in 0..p {
                write!(out, "{},", self.covariates[(i, j)])?;
            }
            writeln!(out, "{},{}", self.treatment[i], self.response[i])?;
        }
        Ok(())
    }
}
