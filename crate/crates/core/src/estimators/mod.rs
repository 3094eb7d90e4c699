//! The average-causal-effect estimator catalogue.
//!
//! Every estimator is a pure function of a [`Dataset`] and its
//! configuration, returning an [`AceEstimate`]: point estimate, standard
//! error where the method carries one, and per-method diagnostics.

mod asymptotics;
mod contrast;
mod logistic_ace;
mod outcome;
mod regression;
mod subclass;
mod weighting;

pub use asymptotics::{asymptotic_variance_multiplier, ToyRegression};
pub use contrast::{face, plug_in_ace};
pub use logistic_ace::{logistic_ace_closed_form, logistic_ace_enumerate};
pub use outcome::{OutcomeModel, Provenance};
pub use regression::{regression_adjusted_ace, Adjustment};
pub use subclass::subclassification_ace;
pub use weighting::{
    aipw_ace, aipw_ace_with, ipw_ace, ipw_ace_with, weighted_response_ace,
    weighted_response_ace_with,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propensity::PropensityFunction;
use crate::simgen::Dataset;

/// A point estimate of the average causal effect with method metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AceEstimate {
    pub method: String,
    pub estimate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    pub diagnostics: Diagnostics,
}

/// Method-dependent extras: sample composition, weight extremes, subclass
/// occupancy.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n: usize,
    pub n_treated: usize,
    pub n_control: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clipped_rows: Option<usize>,
    /// (treated, control) occupancy per subclass.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subclass_counts: Vec<(usize, usize)>,
}

impl Diagnostics {
    pub(crate) fn of(data: &Dataset) -> Self {
        let n_treated = data.treated_count();
        Diagnostics {
            n: data.n(),
            n_treated,
            n_control: data.n() - n_treated,
            ..Diagnostics::default()
        }
    }
}

/// How out-of-range propensity evaluations are handled by the weighting
/// estimators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsPolicy {
    /// Any evaluation outside (0,1) is an error.
    #[default]
    Strict,
    /// Evaluations are clipped into [1e-6, 1 - 1e-6] and the clips counted.
    Clip,
}

pub(crate) const PS_CLIP: f64 = 1e-6;

/// Row-wise assignment probabilities under a policy. Returns the
/// probabilities and the number of clipped rows.
pub(crate) fn propensity_probabilities(
    data: &Dataset,
    ps: &PropensityFunction,
    policy: PsPolicy,
) -> Result<(Vec<f64>, usize)> {
    if !ps.is_probability() {
        return Err(Error::Domain(format!(
            "weighting needs a probability-kind propensity function, got {:?}",
            ps.kind()
        )));
    }
    if ps.dim() != data.p() {
        return Err(Error::DimensionMismatch(format!(
            "propensity function has dimension {} but data has {} covariates",
            ps.dim(),
            data.p()
        )));
    }
    let rows = data.covariate_rows();
    let mut clipped = 0;
    let mut values = Vec::with_capacity(data.n());
    for (row, x) in rows.iter().enumerate() {
        let mut pi = ps.evaluate(x);
        match policy {
            PsPolicy::Strict => {
                if !(pi > 0.0 && pi < 1.0) {
                    return Err(Error::DegeneratePs { row, value: pi });
                }
            }
            PsPolicy::Clip => {
                if !(PS_CLIP..=1.0 - PS_CLIP).contains(&pi) {
                    pi = pi.clamp(PS_CLIP, 1.0 - PS_CLIP);
                    clipped += 1;
                }
            }
        }
        values.push(pi);
    }
    Ok((values, clipped))
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
pub(crate) fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}
