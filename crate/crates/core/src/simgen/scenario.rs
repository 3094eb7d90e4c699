//! Named benchmark scenarios.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::simgen::{BinaryLogisticModel, LogitTreatmentModel, ModelSpec, NormalLinearModel};

/// The built-in benchmark configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Homoscedastic normal model, p = 2: the discriminant and the outcome
    /// predictor are distinct covariates. Small samples, many replicates.
    Fig5,
    /// Heteroscedastic normal model, p = 20: quadratic discriminant
    /// territory, with subclassification in the estimator roster.
    Fig67,
    /// Gaussian covariates with logistic assignment and a linear outcome:
    /// the weighting-estimator benchmark.
    Fig10,
    /// Small all-binary model with a known closed-form effect.
    LogitToy,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Fig5,
        Scenario::Fig67,
        Scenario::Fig10,
        Scenario::LogitToy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig5 => "fig5",
            Scenario::Fig67 => "fig6_7",
            Scenario::Fig10 => "fig10",
            Scenario::LogitToy => "logit_toy",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fig5" => Ok(Scenario::Fig5),
            "fig6_7" => Ok(Scenario::Fig67),
            "fig10" => Ok(Scenario::Fig10),
            "logit_toy" => Ok(Scenario::LogitToy),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

/// A model together with its benchmark sample size and replicate count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioBundle {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: ModelSpec,
    pub n: usize,
    pub replicates: usize,
}

/// The exact parameter bundle of a named scenario.
pub fn scenario(which: Scenario) -> ScenarioBundle {
    match which {
        Scenario::Fig5 => ScenarioBundle {
            name: Some("fig5".into()),
            model: ModelSpec::Normal(NormalLinearModel::homoscedastic(
                0.0,
                0.5,
                DVector::from_vec(vec![0.0, 1.0]),
                1.0,
                0.5,
                DVector::zeros(2),
                DVector::from_vec(vec![1.0, 0.0]),
                DMatrix::identity(2, 2),
            )),
            n: 20,
            replicates: 200,
        },
        Scenario::Fig67 => {
            let p = 20;
            let mut outcome_coef = DVector::zeros(p);
            outcome_coef[1] = 1.0;
            let mut mean_treated = DVector::zeros(p);
            mean_treated[0] = 0.5;
            let cov_control = DMatrix::from_diagonal(&DVector::from_fn(p, |j, _| {
                if j < 10 {
                    0.8
                } else {
                    1.3
                }
            }));
            ScenarioBundle {
                name: Some("fig6_7".into()),
                model: ModelSpec::Normal(NormalLinearModel {
                    intercept: 0.0,
                    treatment_effect: 0.5,
                    outcome_coef,
                    residual_variance: 1.0,
                    treated_prob: 0.5,
                    mean_control: DVector::zeros(p),
                    mean_treated,
                    cov_control,
                    cov_treated: DMatrix::identity(p, p),
                }),
                n: 500,
                replicates: 200,
            }
        }
        Scenario::Fig10 => ScenarioBundle {
            name: Some("fig10".into()),
            model: ModelSpec::LogitTreatment(LogitTreatmentModel {
                covariate_mean: DVector::zeros(4),
                covariate_cov: DMatrix::identity(4, 4),
                ps_intercept: 0.0,
                ps_coef: DVector::from_vec(vec![0.4, 0.4, 0.0, 0.0]),
                outcome_intercept: 0.0,
                treatment_effect: 0.5,
                outcome_coef: DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]),
                residual_variance: 1.0,
            }),
            n: 500,
            replicates: 100,
        },
        Scenario::LogitToy => ScenarioBundle {
            name: Some("logit_toy".into()),
            model: ModelSpec::Logistic(BinaryLogisticModel {
                covariate_probs: DVector::from_vec(vec![0.5, 0.4, 0.6]),
                treat_intercept: -0.2,
                treat_coef: DVector::from_vec(vec![0.8, 0.5, 0.0]),
                outcome_intercept: -0.5,
                treatment_effect: 1.0,
                outcome_coef: DVector::from_vec(vec![0.0, 0.7, -0.4]),
            }),
            n: 1000,
            replicates: 200,
        },
    }
}
