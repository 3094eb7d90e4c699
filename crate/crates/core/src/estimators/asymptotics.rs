//! Closed-form asymptotic variance multipliers for the two-covariate toy
//! model where the first covariate drives assignment and the second drives
//! the response.

use crate::error::{Error, Result};
use crate::simgen::NormalLinearModel;

/// Which regression the multiplier refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyRegression {
    /// Response on (1, T, X1, X2). Adjusting for the sample linear
    /// discriminant instead gives the identical coefficient, hence the
    /// identical multiplier.
    FullAdjustment,
    /// Response on (1, T, X1): the assignment-driving covariate only.
    DiscriminantOnly,
    /// Response on (1, T, X2): the response predictor only.
    PredictorOnly,
}

/// The n-free multiplier `n * Var_asy(treatment coefficient)`; divide by the
/// sample size for the asymptotic variance.
///
/// Requires p = 2, equal diagonal arm covariance `tau * I`, and equal arm
/// means of the second covariate. `PredictorOnly` additionally requires a
/// zero first outcome coefficient, otherwise the omitted assignment
/// covariate would bias that regression.
pub fn asymptotic_variance_multiplier(
    model: &NormalLinearModel,
    which: ToyRegression,
) -> Result<f64> {
    model.validate()?;
    if model.p() != 2 {
        return Err(Error::WrongShape("toy multipliers need p = 2".into()));
    }
    if !model.is_homoscedastic() {
        return Err(Error::WrongShape(
            "toy multipliers need equal arm covariances".into(),
        ));
    }
    let cov = &model.cov_control;
    let tau = cov[(0, 0)];
    if cov[(0, 1)] != 0.0 || cov[(1, 0)] != 0.0 || cov[(1, 1)] != tau {
        return Err(Error::WrongShape(
            "toy multipliers need a diagonal covariance with equal entries".into(),
        ));
    }
    if model.mean_control[1] != model.mean_treated[1] {
        return Err(Error::WrongShape(
            "toy multipliers need equal arm means of the second covariate".into(),
        ));
    }

    let theta = model.treated_prob;
    let phi = model.residual_variance;
    let b2 = model.outcome_coef[1];
    let delta_x1 = model.mean_treated[0] - model.mean_control[0];
    // Var(X1) = tau + theta (1 - theta) delta^2; the centered-within-arms
    // second moment of X1 is exactly tau.
    let var_x1 = tau + theta * (1.0 - theta) * delta_x1 * delta_x1;

    match which {
        ToyRegression::FullAdjustment => Ok(phi * var_x1 / (theta * (1.0 - theta) * tau)),
        ToyRegression::DiscriminantOnly => {
            Ok((phi + b2 * b2 * tau) * var_x1 / (theta * (1.0 - theta) * tau))
        }
        ToyRegression::PredictorOnly => {
            if model.outcome_coef[0] != 0.0 {
                return Err(Error::WrongShape(
                    "predictor-only multiplier needs a zero first outcome coefficient".into(),
                ));
            }
            Ok(phi / (theta * (1.0 - theta)))
        }
    }
}
