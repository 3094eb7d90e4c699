//! The average causal effect of the all-binary logistic model, by the
//! closed four-term expression and by exact enumeration.

use crate::error::{Error, Result};
use crate::numkit::expit;
use crate::simgen::BinaryLogisticModel;

const ENUMERATION_LIMIT: usize = 20;

/// Closed form for the three-covariate shape with a zero first outcome
/// coefficient: only the second and third covariates enter the response, so
/// the effect is a four-term expectation over their joint law.
pub fn logistic_ace_closed_form(model: &BinaryLogisticModel) -> Result<f64> {
    model.validate()?;
    if model.p() != 3 || model.outcome_coef[0] != 0.0 {
        return Err(Error::WrongShape(
            "closed form needs p = 3 with a zero first outcome coefficient".into(),
        ));
    }
    let d = model.outcome_intercept;
    let delta = model.treatment_effect;
    let b2 = model.outcome_coef[1];
    let b3 = model.outcome_coef[2];
    let p2 = model.covariate_probs[1];
    let p3 = model.covariate_probs[2];

    let contrast = |shift: f64| expit(d + delta + shift) - expit(d + shift);
    Ok(p2 * p3 * contrast(b2 + b3)
        + (1.0 - p2) * p3 * contrast(b3)
        + p2 * (1.0 - p3) * contrast(b2)
        + (1.0 - p2) * (1.0 - p3) * contrast(0.0))
}

/// Exact effect by enumerating all `2^p` covariate patterns, weighting each
/// by its Bernoulli probability. Serves as the independent reference for the
/// closed form.
pub fn logistic_ace_enumerate(model: &BinaryLogisticModel) -> Result<f64> {
    model.validate()?;
    let p = model.p();
    if p > ENUMERATION_LIMIT {
        return Err(Error::TooManyCovariates {
            p,
            max: ENUMERATION_LIMIT,
        });
    }
    let d = model.outcome_intercept;
    let delta = model.treatment_effect;
    let mut total = 0.0;
    for pattern in 0u32..(1 << p) {
        let mut weight = 1.0;
        let mut shift = 0.0;
        for j in 0..p {
            if pattern >> j & 1 == 1 {
                weight *= model.covariate_probs[j];
                shift += model.outcome_coef[j];
            } else {
                weight *= 1.0 - model.covariate_probs[j];
            }
        }
        total += weight * (expit(d + delta + shift) - expit(d + shift));
    }
    Ok(total)
}
