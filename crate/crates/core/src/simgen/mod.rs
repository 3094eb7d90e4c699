//! Data-generating processes and benchmark scenarios.
//!
//! Three generative families are provided: a normal linear model whose
//! covariates are multivariate normal within each treatment arm (optionally
//! with unequal arm covariances), an all-binary logistic model, and a model
//! with normal covariates, logistic treatment assignment and a linear
//! outcome. Each family generates under an observational regime or under
//! either intervention; interventions fix the treatment while leaving the
//! covariate law untouched.

mod dataset;
mod generate;
mod models;
mod scenario;

pub use dataset::Dataset;
pub use generate::{generate_logistic, generate_logit_treatment, generate_normal};
pub use models::{BinaryLogisticModel, LogitTreatmentModel, ModelSpec, NormalLinearModel};
pub use scenario::{scenario, Scenario, ScenarioBundle};

/// The treatment-assignment regime a dataset is generated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Treatment assigned by the model's own mechanism.
    Observational,
    /// Treatment forced to 0 for every unit.
    InterventionControl,
    /// Treatment forced to 1 for every unit.
    InterventionTreatment,
}

impl Regime {
    pub(crate) fn forced_arm(self) -> Option<u8> {
        match self {
            Regime::Observational => None,
            Regime::InterventionControl => Some(0),
            Regime::InterventionTreatment => Some(1),
        }
    }
}
