//! Dataset generation under observational and interventional regimes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numkit::{expit, SeededRng};
use crate::simgen::{BinaryLogisticModel, Dataset, LogitTreatmentModel, NormalLinearModel, Regime};

const MAX_LABEL_RESAMPLES: usize = 1000;

/// Draws observational treatment labels, resampling (seeded) until both arms
/// are present. Degenerate replicates are possible at small n and would make
/// every group-contrast estimator undefined.
fn observational_labels(
    rng: &mut SeededRng,
    probs: impl Fn(usize) -> f64,
    n: usize,
) -> Result<Vec<u8>> {
    if n < 2 {
        return Err(Error::Domain(
            "observational generation needs at least 2 observations".into(),
        ));
    }
    for attempt in 0..MAX_LABEL_RESAMPLES {
        let t: Vec<u8> = (0..n).map(|i| rng.bernoulli(probs(i)) as u8).collect();
        let n1: usize = t.iter().map(|&v| v as usize).sum();
        if n1 > 0 && n1 < n {
            return Ok(t);
        }
        log::debug!(
            "treatment draw {attempt} produced an empty arm (n1 = {n1}); resampling"
        );
    }
    Err(Error::Domain(
        "could not generate both treatment arms".into(),
    ))
}

/// Generates from a [`NormalLinearModel`].
///
/// Observationally, arm labels come first, then covariates conditional on the
/// label. Under an intervention the same label draw selects the covariate
/// mixture component, so the covariate law — and, for a fixed seed, the
/// drawn covariates themselves — do not depend on the regime.
pub fn generate_normal(
    model: &NormalLinearModel,
    n: usize,
    regime: Regime,
    rng: &mut SeededRng,
) -> Result<Dataset> {
    model.validate()?;
    let p = model.p();
    let chol_control = crate::numkit::sampling_cholesky(&model.cov_control)?;
    let chol_treated = if model.is_homoscedastic() {
        chol_control.clone()
    } else {
        crate::numkit::sampling_cholesky(&model.cov_treated)?
    };

    let components = match regime.forced_arm() {
        None => observational_labels(rng, |_| model.treated_prob, n)?,
        Some(_) => (0..n)
            .map(|_| rng.bernoulli(model.treated_prob) as u8)
            .collect(),
    };

    let mut covariates = DMatrix::zeros(n, p);
    let mut z = DVector::zeros(p);
    for i in 0..n {
        let (mean, chol) = if components[i] == 1 {
            (&model.mean_treated, &chol_treated)
        } else {
            (&model.mean_control, &chol_control)
        };
        for j in 0..p {
            z[j] = rng.standard_normal();
        }
        let x = mean + chol.l() * &z;
        for j in 0..p {
            covariates[(i, j)] = x[j];
        }
    }

    let treatment: Vec<u8> = match regime.forced_arm() {
        None => components,
        Some(arm) => vec![arm; n],
    };

    let noise_sd = model.residual_variance.sqrt();
    let response = DVector::from_fn(n, |i, _| {
        let xb: f64 = (0..p).map(|j| model.outcome_coef[j] * covariates[(i, j)]).sum();
        model.intercept
            + model.treatment_effect * treatment[i] as f64
            + xb
            + noise_sd * rng.standard_normal()
    });

    Dataset::new(covariates, treatment, response)
}

/// Generates from a [`BinaryLogisticModel`]. Covariates are drawn first and
/// identically in every regime.
pub fn generate_logistic(
    model: &BinaryLogisticModel,
    n: usize,
    regime: Regime,
    rng: &mut SeededRng,
) -> Result<Dataset> {
    model.validate()?;
    let p = model.p();

    let mut covariates = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            covariates[(i, j)] = rng.bernoulli(model.covariate_probs[j]) as u8 as f64;
        }
    }

    let assignment_prob = |i: usize| {
        let eta: f64 = model.treat_intercept
            + (0..p)
                .map(|j| model.treat_coef[j] * covariates[(i, j)])
                .sum::<f64>();
        expit(eta)
    };
    let treatment: Vec<u8> = match regime.forced_arm() {
        None => observational_labels(rng, assignment_prob, n)?,
        Some(arm) => vec![arm; n],
    };

    let response = DVector::from_fn(n, |i, _| {
        let eta: f64 = model.outcome_intercept
            + model.treatment_effect * treatment[i] as f64
            + (0..p)
                .map(|j| model.outcome_coef[j] * covariates[(i, j)])
                .sum::<f64>();
        rng.bernoulli(expit(eta)) as u8 as f64
    });

    Dataset::new(covariates, treatment, response)
}

/// Generates from a [`LogitTreatmentModel`]. Covariates are drawn first and
/// identically in every regime.
pub fn generate_logit_treatment(
    model: &LogitTreatmentModel,
    n: usize,
    regime: Regime,
    rng: &mut SeededRng,
) -> Result<Dataset> {
    model.validate()?;
    let p = model.p();
    let chol = crate::numkit::sampling_cholesky(&model.covariate_cov)?;

    let mut covariates = DMatrix::zeros(n, p);
    let mut z = DVector::zeros(p);
    for i in 0..n {
        for j in 0..p {
            z[j] = rng.standard_normal();
        }
        let x = &model.covariate_mean + chol.l() * &z;
        for j in 0..p {
            covariates[(i, j)] = x[j];
        }
    }

    let assignment_prob = |i: usize| {
        let eta: f64 = model.ps_intercept
            + (0..p)
                .map(|j| model.ps_coef[j] * covariates[(i, j)])
                .sum::<f64>();
        expit(eta)
    };
    let treatment: Vec<u8> = match regime.forced_arm() {
        None => observational_labels(rng, assignment_prob, n)?,
        Some(arm) => vec![arm; n],
    };

    let noise_sd = model.residual_variance.sqrt();
    let response = DVector::from_fn(n, |i, _| {
        let xb: f64 = (0..p).map(|j| model.outcome_coef[j] * covariates[(i, j)]).sum();
        model.outcome_intercept
            + model.treatment_effect * treatment[i] as f64
            + xb
            + noise_sd * rng.standard_normal()
    });

    Dataset::new(covariates, treatment, response)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::ols;
    use crate::simgen::{scenario, ModelSpec, Scenario};

    fn fig5_model() -> NormalLinearModel {
        match scenario(Scenario::Fig5).model {
            ModelSpec::Normal(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn discriminant_only_regression_has_doubled_residual_variance() {
        // Regressing the response on (1, T, X1) leaves the X2 signal in the
        // residual: the T coefficient stays near 0.5 and the residual
        // variance approaches 2.
        let model = fig5_model();
        let mut rng = SeededRng::new(42, 0);
        let data = generate_normal(&model, 20_000, Regime::Observational, &mut rng).unwrap();
        let n = data.n();
        let design = DMatrix::from_fn(n, 3, |i, j| match j {
            0 => 1.0,
            1 => data.treatment[i] as f64,
            _ => data.covariates[(i, 0)],
        });
        let fit = ols(&design, &data.response).unwrap();
        assert!(
            (fit.coefficients[1] - 0.5).abs() < 4.0 * fit.standard_error(1),
            "T coefficient {} (se {})",
            fit.coefficients[1],
            fit.standard_error(1)
        );
        assert!(
            (fit.residual_variance - 2.0).abs() < 0.1,
            "residual variance {}",
            fit.residual_variance
        );
    }

    #[test]
    fn interventional_contrast_recovers_the_effect() {
        let model = fig5_model();
        let n = 100_000;
        let mut rng1 = SeededRng::new(7, 1);
        let mut rng0 = SeededRng::new(7, 2);
        let treated =
            generate_normal(&model, n, Regime::InterventionTreatment, &mut rng1).unwrap();
        let control = generate_normal(&model, n, Regime::InterventionControl, &mut rng0).unwrap();
        assert!(treated.treatment.iter().all(|&t| t == 1));
        assert!(control.treatment.iter().all(|&t| t == 0));
        let diff = treated.response.mean() - control.response.mean();
        assert!(
            (diff - model.treatment_effect).abs() < 0.05,
            "interventional contrast {diff}"
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let bundle = scenario(Scenario::Fig67);
        let a = bundle
            .model
            .generate(100, Regime::Observational, &mut SeededRng::new(11, 3))
            .unwrap();
        let b = bundle
            .model
            .generate(100, Regime::Observational, &mut SeededRng::new(11, 3))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn covariate_law_is_regime_invariant() {
        // With the same stream, the covariate block is identical under
        // observation and intervention: the regime only changes labels.
        let model = fig5_model();
        let n = 5_000;
        let obs = generate_normal(&model, n, Regime::Observational, &mut SeededRng::new(3, 5))
            .unwrap();
        let forced =
            generate_normal(&model, n, Regime::InterventionTreatment, &mut SeededRng::new(3, 5))
                .unwrap();
        assert_eq!(obs.covariates, forced.covariates);

        // And across independent streams the moments agree within Monte
        // Carlo tolerance.
        let other =
            generate_normal(&model, n, Regime::InterventionControl, &mut SeededRng::new(3, 6))
                .unwrap();
        let tol = 4.0 / (n as f64).sqrt();
        for j in 0..model.p() {
            let a = obs.covariates.column(j).sum() / n as f64;
            let b = other.covariates.column(j).sum() / n as f64;
            assert!((a - b).abs() < 2.0 * tol, "column {j}: {a} vs {b}");
        }
    }

    #[test]
    fn pooled_interventional_regression_recovers_all_parameters() {
        let model = fig5_model();
        let n = 30_000;
        let t1 = generate_normal(&model, n, Regime::InterventionTreatment, &mut SeededRng::new(9, 0))
            .unwrap();
        let t0 = generate_normal(&model, n, Regime::InterventionControl, &mut SeededRng::new(9, 1))
            .unwrap();
        let total = 2 * n;
        let design = DMatrix::from_fn(total, 4, |i, j| {
            let (data, row) = if i < n { (&t1, i) } else { (&t0, i - n) };
            match j {
                0 => 1.0,
                1 => data.treatment[row] as f64,
                _ => data.covariates[(row, j - 2)],
            }
        });
        let response = DVector::from_fn(total, |i, _| {
            if i < n {
                t1.response[i]
            } else {
                t0.response[i - n]
            }
        });
        let fit = ols(&design, &response).unwrap();
        for (k, target) in [
            (0, model.intercept),
            (1, model.treatment_effect),
            (2, model.outcome_coef[0]),
            (3, model.outcome_coef[1]),
        ] {
            assert!(
                (fit.coefficients[k] - target).abs() < 4.0 * fit.standard_error(k),
                "coefficient {k}: {} vs {target}",
                fit.coefficients[k]
            );
        }
    }

    #[test]
    fn randomized_binary_assignment_is_marginal() {
        // With zero assignment coefficients T is Bernoulli(expit(c))
        // independent of X.
        let bundle = scenario(Scenario::LogitToy);
        let ModelSpec::Logistic(mut model) = bundle.model else {
            unreachable!()
        };
        model.treat_coef = DVector::zeros(3);
        model.treat_intercept = 0.4;
        let n = 50_000;
        let data =
            generate_logistic(&model, n, Regime::Observational, &mut SeededRng::new(21, 0))
                .unwrap();
        let frac = data.treated_count() as f64 / n as f64;
        let target = expit(0.4);
        assert!((frac - target).abs() < 0.01, "treated fraction {frac}");
    }

    #[test]
    fn binary_covariates_identical_across_regimes() {
        let bundle = scenario(Scenario::LogitToy);
        let obs = bundle
            .model
            .generate(2_000, Regime::Observational, &mut SeededRng::new(5, 8))
            .unwrap();
        let forced = bundle
            .model
            .generate(2_000, Regime::InterventionControl, &mut SeededRng::new(5, 8))
            .unwrap();
        assert_eq!(obs.covariates, forced.covariates);
    }

    #[test]
    fn logit_treatment_generation_matches_its_propensity() {
        let bundle = scenario(Scenario::Fig10);
        let ModelSpec::LogitTreatment(model) = &bundle.model else {
            unreachable!()
        };
        let n = 50_000;
        let data =
            generate_logit_treatment(model, n, Regime::Observational, &mut SeededRng::new(13, 0))
                .unwrap();
        // Bin by the true assignment probability and compare observed
        // treated fractions.
        let mut bins = [(0usize, 0usize); 10];
        for i in 0..n {
            let eta: f64 = (0..model.p())
                .map(|j| model.ps_coef[j] * data.covariates[(i, j)])
                .sum::<f64>()
                + model.ps_intercept;
            let pi = expit(eta);
            let b = ((pi * 10.0) as usize).min(9);
            bins[b].0 += 1;
            bins[b].1 += data.treatment[i] as usize;
        }
        for (b, &(count, treated)) in bins.iter().enumerate() {
            if count < 500 {
                continue;
            }
            let mid = (b as f64 + 0.5) / 10.0;
            let frac = treated as f64 / count as f64;
            assert!(
                (frac - mid).abs() < 0.06,
                "bin {b}: treated fraction {frac} vs {mid}"
            );
        }
    }
}
