//! Group-contrast estimators: the naive observed difference and the
//! outcome-model plug-in.

use crate::error::{Error, Result};
use crate::estimators::{sample_sd, AceEstimate, Diagnostics, OutcomeModel};
use crate::simgen::Dataset;

/// The face-value contrast: mean response of the treated minus mean response
/// of the controls, with the two-sample standard error. Biased whenever
/// assignment depends on outcome-relevant covariates.
pub fn face(data: &Dataset) -> Result<AceEstimate> {
    let diagnostics = Diagnostics::of(data);
    if diagnostics.n_treated == 0 {
        return Err(Error::EmptyGroup(1));
    }
    if diagnostics.n_control == 0 {
        return Err(Error::EmptyGroup(0));
    }

    let (mut sum1, mut sum0) = (0.0, 0.0);
    for i in 0..data.n() {
        if data.treatment[i] == 1 {
            sum1 += data.response[i];
        } else {
            sum0 += data.response[i];
        }
    }
    let mean1 = sum1 / diagnostics.n_treated as f64;
    let mean0 = sum0 / diagnostics.n_control as f64;
    let estimate = mean1 - mean0;
    if !estimate.is_finite() {
        return Err(Error::NonFinite("face contrast"));
    }

    let se = if diagnostics.n_treated >= 2 && diagnostics.n_control >= 2 {
        let (mut ss1, mut ss0) = (0.0, 0.0);
        for i in 0..data.n() {
            if data.treatment[i] == 1 {
                ss1 += (data.response[i] - mean1).powi(2);
            } else {
                ss0 += (data.response[i] - mean0).powi(2);
            }
        }
        let var1 = ss1 / (diagnostics.n_treated - 1) as f64;
        let var0 = ss0 / (diagnostics.n_control - 1) as f64;
        Some((var1 / diagnostics.n_treated as f64 + var0 / diagnostics.n_control as f64).sqrt())
    } else {
        None
    };

    Ok(AceEstimate {
        method: "face".into(),
        estimate,
        se,
        diagnostics,
    })
}

/// Outcome-model plug-in: the average of `m(1, x) - m(0, x)` over the
/// sample. With correctly specified arm models this is the minimum-variance
/// way to use them.
pub fn plug_in_ace(data: &Dataset, model: &OutcomeModel) -> Result<AceEstimate> {
    let diagnostics = Diagnostics::of(data);
    let rows = data.covariate_rows();
    let contrasts: Vec<f64> = rows
        .iter()
        .map(|x| model.evaluate(1, x) - model.evaluate(0, x))
        .collect();
    let estimate = contrasts.iter().sum::<f64>() / data.n() as f64;
    if !estimate.is_finite() {
        return Err(Error::NonFinite("plug-in contrast"));
    }
    let se = Some(sample_sd(&contrasts) / (data.n() as f64).sqrt());
    Ok(AceEstimate {
        method: "plugin".into(),
        estimate,
        se,
        diagnostics,
    })
}
