//! Regression adjustment: the treatment coefficient of a linear regression
//! of the response on treatment plus an adjustment set.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimators::{AceEstimate, Diagnostics};
use crate::numkit::ols;
use crate::propensity::PropensityFunction;
use crate::simgen::Dataset;

/// What to adjust for alongside the treatment indicator.
#[derive(Debug, Clone)]
pub enum Adjustment<'a> {
    /// Every covariate column.
    AllCovariates,
    /// A subset of covariate columns (0-based).
    Columns(&'a [usize]),
    /// The evaluation of a single scored function (probability for
    /// probability kinds, raw score otherwise).
    Score(&'a PropensityFunction),
}

/// The coefficient of T in the least-squares regression of the response on
/// (1, T, adjustment columns), with its classical standard error.
pub fn regression_adjusted_ace(data: &Dataset, adjust: Adjustment) -> Result<AceEstimate> {
    let n = data.n();
    let p = data.p();
    let adjustment_columns: Vec<Vec<f64>> = match &adjust {
        Adjustment::AllCovariates => (0..p)
            .map(|j| (0..n).map(|i| data.covariates[(i, j)]).collect())
            .collect(),
        Adjustment::Columns(cols) => {
            if let Some(&bad) = cols.iter().find(|&&c| c >= p) {
                return Err(Error::DimensionMismatch(format!(
                    "covariate column {bad} out of range (p = {p})"
                )));
            }
            cols.iter()
                .map(|&j| (0..n).map(|i| data.covariates[(i, j)]).collect())
                .collect()
        }
        Adjustment::Score(score) => {
            if score.dim() != p {
                return Err(Error::DimensionMismatch(format!(
                    "score has dimension {} but data has {p} covariates",
                    score.dim()
                )));
            }
            let rows = data.covariate_rows();
            vec![rows.iter().map(|x| score.evaluate(x)).collect()]
        }
    };

    let k = 2 + adjustment_columns.len();
    let design = DMatrix::from_fn(n, k, |i, j| match j {
        0 => 1.0,
        1 => data.treatment[i] as f64,
        _ => adjustment_columns[j - 2][i],
    });
    let fit = ols(&design, &data.response)?;
    let estimate = fit.coefficients[1];
    if !estimate.is_finite() {
        return Err(Error::NonFinite("regression-adjusted contrast"));
    }
    Ok(AceEstimate {
        method: "reg".into(),
        estimate,
        se: Some(fit.standard_error(1)),
        diagnostics: Diagnostics::of(data),
    })
}
