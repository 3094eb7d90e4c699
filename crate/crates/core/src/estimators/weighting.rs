//! Inverse-probability weighting and its augmented, doubly robust form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimators::{
    propensity_probabilities, sample_sd, AceEstimate, Diagnostics, OutcomeModel, PsPolicy,
};
use crate::numkit::ols;
use crate::propensity::PropensityFunction;
use crate::simgen::Dataset;

/// Horvitz-Thompson style contrast: treated responses weighted by `1/pi`,
/// control responses by `1/(1-pi)`, each averaged over the whole sample.
pub fn ipw_ace(data: &Dataset, ps: &PropensityFunction) -> Result<AceEstimate> {
    ipw_ace_with(data, ps, PsPolicy::default())
}

pub fn ipw_ace_with(
    data: &Dataset,
    ps: &PropensityFunction,
    policy: PsPolicy,
) -> Result<AceEstimate> {
    let (probs, clipped) = propensity_probabilities(data, ps, policy)?;
    let n = data.n();
    let contributions: Vec<f64> = (0..n)
        .map(|i| {
            let t = data.treatment[i] as f64;
            let y = data.response[i];
            t * y / probs[i] - (1.0 - t) * y / (1.0 - probs[i])
        })
        .collect();
    let estimate = contributions.iter().sum::<f64>() / n as f64;
    if !estimate.is_finite() {
        return Err(Error::NonFinite("inverse-probability contrast"));
    }
    let se = Some(sample_sd(&contributions) / (n as f64).sqrt());
    Ok(AceEstimate {
        method: "ipw".into(),
        estimate,
        se,
        diagnostics: weight_diagnostics(data, &probs, clipped, policy),
    })
}

/// Augmented inverse-probability weighting.
///
/// Per-arm means are estimated as the weighted response plus the
/// complementary-weighted outcome-model prediction, and their difference is
/// returned. The estimate is unbiased when either the propensity function or
/// the outcome model is correct.
pub fn aipw_ace(
    data: &Dataset,
    ps: &PropensityFunction,
    outcome: &OutcomeModel,
) -> Result<AceEstimate> {
    aipw_ace_with(data, ps, outcome, PsPolicy::default())
}

pub fn aipw_ace_with(
    data: &Dataset,
    ps: &PropensityFunction,
    outcome: &OutcomeModel,
    policy: PsPolicy,
) -> Result<AceEstimate> {
    let (probs, clipped) = propensity_probabilities(data, ps, policy)?;
    let diagnostics = weight_diagnostics(data, &probs, clipped, policy);
    let (estimate, se) = aipw_core(data, &probs, outcome)?;
    Ok(AceEstimate {
        method: "aipw".into(),
        estimate,
        se,
        diagnostics,
    })
}

fn aipw_core(data: &Dataset, probs: &[f64], outcome: &OutcomeModel) -> Result<(f64, Option<f64>)> {
    let n = data.n();
    let rows = data.covariate_rows();
    let contributions: Vec<f64> = (0..n)
        .map(|i| {
            let t = data.treatment[i] as f64;
            let y = data.response[i];
            let pi = probs[i];
            let mu1 = t * y / pi + (1.0 - t / pi) * outcome.evaluate(1, &rows[i]);
            let mu0 =
                (1.0 - t) * y / (1.0 - pi) + (1.0 - (1.0 - t) / (1.0 - pi)) * outcome.evaluate(0, &rows[i]);
            mu1 - mu0
        })
        .collect();
    let estimate = contributions.iter().sum::<f64>() / n as f64;
    if !estimate.is_finite() {
        return Err(Error::NonFinite("augmented weighting contrast"));
    }
    let se = Some(sample_sd(&contributions) / (n as f64).sqrt());
    Ok((estimate, se))
}

/// Weighted-response estimator: regress
/// `y_tilde = [(1/pi - 1) t + (1/(1-pi) - 1)(1 - t)] y` on the covariates
/// and use the fit as the augmentation. The weight factor blows up for
/// treated units with small `pi` (and controls with large `pi`), which the
/// diagnostics expose.
pub fn weighted_response_ace(data: &Dataset, ps: &PropensityFunction) -> Result<AceEstimate> {
    weighted_response_ace_with(data, ps, PsPolicy::default())
}

pub fn weighted_response_ace_with(
    data: &Dataset,
    ps: &PropensityFunction,
    policy: PsPolicy,
) -> Result<AceEstimate> {
    let (probs, clipped) = propensity_probabilities(data, ps, policy)?;
    let n = data.n();
    let p = data.p();

    let mut max_factor = f64::NEG_INFINITY;
    let mut min_factor = f64::INFINITY;
    let weighted: DVector<f64> = DVector::from_fn(n, |i, _| {
        let t = data.treatment[i] as f64;
        let factor = (1.0 / probs[i] - 1.0) * t + (1.0 / (1.0 - probs[i]) - 1.0) * (1.0 - t);
        max_factor = max_factor.max(factor);
        min_factor = min_factor.min(factor);
        factor * data.response[i]
    });

    let design = DMatrix::from_fn(n, p + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            data.covariates[(i, j - 1)]
        }
    });
    let fit = ols(&design, &weighted)?;
    let augmentation = OutcomeModel::known_linear(
        fit.coefficients[0],
        0.0,
        DVector::from_fn(p, |j, _| fit.coefficients[j + 1]),
    );

    let (estimate, se) = aipw_core(data, &probs, &augmentation)?;
    let mut diagnostics = weight_diagnostics(data, &probs, clipped, policy);
    diagnostics.min_weight = Some(min_factor);
    diagnostics.max_weight = Some(max_factor);
    Ok(AceEstimate {
        method: "wresp".into(),
        estimate,
        se,
        diagnostics,
    })
}

fn weight_diagnostics(
    data: &Dataset,
    probs: &[f64],
    clipped: usize,
    policy: PsPolicy,
) -> Diagnostics {
    let mut d = Diagnostics::of(data);
    let mut min_ps = f64::INFINITY;
    let mut max_ps = f64::NEG_INFINITY;
    let mut min_w = f64::INFINITY;
    let mut max_w = f64::NEG_INFINITY;
    for (i, &pi) in probs.iter().enumerate() {
        min_ps = min_ps.min(pi);
        max_ps = max_ps.max(pi);
        let w = if data.treatment[i] == 1 {
            1.0 / pi
        } else {
            1.0 / (1.0 - pi)
        };
        min_w = min_w.min(w);
        max_w = max_w.max(w);
    }
    d.min_ps = Some(min_ps);
    d.max_ps = Some(max_ps);
    d.min_weight = Some(min_w);
    d.max_weight = Some(max_w);
    if policy == PsPolicy::Clip {
        d.clipped_rows = Some(clipped);
    }
    d
}
