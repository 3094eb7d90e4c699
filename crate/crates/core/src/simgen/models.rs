//! Generative model parameter bundles and their JSON forms.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonrep::{all_finite, matrix_to_rows, rows_to_matrix, vec_to_vector, vector_to_vec};
use crate::numkit::SeededRng;
use crate::simgen::{generate_logistic, generate_logit_treatment, generate_normal, Dataset, Regime};

/// Normal linear outcome model with per-arm multivariate-normal covariates.
///
/// Observationally the treatment is Bernoulli(`treated_prob`), covariates are
/// N(mean_t, cov_t) given arm `t`, and the response is
/// `intercept + treatment_effect * t + outcome_coef'x` plus N(0,
/// `residual_variance`) noise. The model is homoscedastic when the two arm
/// covariances coincide; then `treatment_effect` is recovered by linear
/// regression on any sufficient adjustment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormalLinearModelRepr", into = "NormalLinearModelRepr")]
pub struct NormalLinearModel {
    pub intercept: f64,
    /// The true average causal effect.
    pub treatment_effect: f64,
    pub outcome_coef: DVector<f64>,
    pub residual_variance: f64,
    pub treated_prob: f64,
    pub mean_control: DVector<f64>,
    pub mean_treated: DVector<f64>,
    pub cov_control: DMatrix<f64>,
    pub cov_treated: DMatrix<f64>,
}

impl NormalLinearModel {
    /// Convenience constructor for the equal-covariance case.
    #[allow(clippy::too_many_arguments)]
    pub fn homoscedastic(
        intercept: f64,
        treatment_effect: f64,
        outcome_coef: DVector<f64>,
        residual_variance: f64,
        treated_prob: f64,
        mean_control: DVector<f64>,
        mean_treated: DVector<f64>,
        cov: DMatrix<f64>,
    ) -> Self {
        NormalLinearModel {
            intercept,
            treatment_effect,
            outcome_coef,
            residual_variance,
            treated_prob,
            mean_control,
            mean_treated,
            cov_control: cov.clone(),
            cov_treated: cov,
        }
    }

    pub fn p(&self) -> usize {
        self.mean_control.len()
    }

    pub fn is_homoscedastic(&self) -> bool {
        self.cov_control == self.cov_treated
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if self.mean_treated.len() != p
            || self.outcome_coef.len() != p
            || self.cov_control.nrows() != p
            || self.cov_control.ncols() != p
            || self.cov_treated.nrows() != p
            || self.cov_treated.ncols() != p
        {
            return Err(Error::DimensionMismatch(
                "model parameter dimensions disagree".into(),
            ));
        }
        if !(self.residual_variance.is_finite() && self.residual_variance > 0.0) {
            return Err(Error::Domain("residual variance must be positive".into()));
        }
        if !(self.treated_prob > 0.0 && self.treated_prob < 1.0) {
            return Err(Error::Domain("treated probability must be in (0,1)".into()));
        }
        for m in [&self.cov_control, &self.cov_treated] {
            if (m - m.transpose()).amax() > 1e-9 * m.amax().max(1.0) {
                return Err(Error::Domain("covariance matrix is not symmetric".into()));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct NormalLinearModelRepr {
    intercept: f64,
    treatment_effect: f64,
    outcome_coef: Vec<f64>,
    residual_variance: f64,
    treated_prob: f64,
    mean_control: Vec<f64>,
    mean_treated: Vec<f64>,
    cov_control: Vec<Vec<f64>>,
    cov_treated: Vec<Vec<f64>>,
}

impl TryFrom<NormalLinearModelRepr> for NormalLinearModel {
    type Error = String;

    fn try_from(r: NormalLinearModelRepr) -> std::result::Result<Self, String> {
        if !all_finite(
            r.outcome_coef
                .iter()
                .chain(&r.mean_control)
                .chain(&r.mean_treated)
                .chain(r.cov_control.iter().flatten())
                .chain(r.cov_treated.iter().flatten())
                .chain([&r.intercept, &r.treatment_effect, &r.residual_variance, &r.treated_prob]),
        ) {
            return Err("model parameters must be finite".into());
        }
        let model = NormalLinearModel {
            intercept: r.intercept,
            treatment_effect: r.treatment_effect,
            outcome_coef: vec_to_vector(&r.outcome_coef),
            residual_variance: r.residual_variance,
            treated_prob: r.treated_prob,
            mean_control: vec_to_vector(&r.mean_control),
            mean_treated: vec_to_vector(&r.mean_treated),
            cov_control: rows_to_matrix(&r.cov_control)?,
            cov_treated: rows_to_matrix(&r.cov_treated)?,
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }
}

impl From<NormalLinearModel> for NormalLinearModelRepr {
    fn from(m: NormalLinearModel) -> Self {
        NormalLinearModelRepr {
            intercept: m.intercept,
            treatment_effect: m.treatment_effect,
            outcome_coef: vector_to_vec(&m.outcome_coef),
            residual_variance: m.residual_variance,
            treated_prob: m.treated_prob,
            mean_control: vector_to_vec(&m.mean_control),
            mean_treated: vector_to_vec(&m.mean_treated),
            cov_control: matrix_to_rows(&m.cov_control),
            cov_treated: matrix_to_rows(&m.cov_treated),
        }
    }
}

/// All-binary model: independent Bernoulli covariates, logistic treatment,
/// logistic response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BinaryLogisticModelRepr", into = "BinaryLogisticModelRepr")]
pub struct BinaryLogisticModel {
    /// Success probability of each covariate component.
    pub covariate_probs: DVector<f64>,
    pub treat_intercept: f64,
    pub treat_coef: DVector<f64>,
    pub outcome_intercept: f64,
    /// Log-odds shift of the response under treatment.
    pub treatment_effect: f64,
    pub outcome_coef: DVector<f64>,
}

impl BinaryLogisticModel {
    pub fn p(&self) -> usize {
        self.covariate_probs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if self.treat_coef.len() != p || self.outcome_coef.len() != p {
            return Err(Error::DimensionMismatch(
                "model parameter dimensions disagree".into(),
            ));
        }
        if self
            .covariate_probs
            .iter()
            .any(|&pi| !(pi > 0.0 && pi < 1.0))
        {
            return Err(Error::Domain(
                "covariate probabilities must be in (0,1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BinaryLogisticModelRepr {
    covariate_probs: Vec<f64>,
    treat_intercept: f64,
    treat_coef: Vec<f64>,
    outcome_intercept: f64,
    treatment_effect: f64,
    outcome_coef: Vec<f64>,
}

impl TryFrom<BinaryLogisticModelRepr> for BinaryLogisticModel {
    type Error = String;

    fn try_from(r: BinaryLogisticModelRepr) -> std::result::Result<Self, String> {
        if !all_finite(
            r.covariate_probs
                .iter()
                .chain(&r.treat_coef)
                .chain(&r.outcome_coef)
                .chain([&r.treat_intercept, &r.outcome_intercept, &r.treatment_effect]),
        ) {
            return Err("model parameters must be finite".into());
        }
        let model = BinaryLogisticModel {
            covariate_probs: vec_to_vector(&r.covariate_probs),
            treat_intercept: r.treat_intercept,
            treat_coef: vec_to_vector(&r.treat_coef),
            outcome_intercept: r.outcome_intercept,
            treatment_effect: r.treatment_effect,
            outcome_coef: vec_to_vector(&r.outcome_coef),
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }
}

impl From<BinaryLogisticModel> for BinaryLogisticModelRepr {
    fn from(m: BinaryLogisticModel) -> Self {
        BinaryLogisticModelRepr {
            covariate_probs: vector_to_vec(&m.covariate_probs),
            treat_intercept: m.treat_intercept,
            treat_coef: vector_to_vec(&m.treat_coef),
            outcome_intercept: m.outcome_intercept,
            treatment_effect: m.treatment_effect,
            outcome_coef: vector_to_vec(&m.outcome_coef),
        }
    }
}

/// Normal covariates, logistic treatment assignment, linear outcome.
///
/// The assignment probability is known in closed form, which makes this the
/// natural benchmark family for weighting estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LogitTreatmentModelRepr", into = "LogitTreatmentModelRepr")]
pub struct LogitTreatmentModel {
    pub covariate_mean: DVector<f64>,
    pub covariate_cov: DMatrix<f64>,
    /// Intercept of the assignment log-odds.
    pub ps_intercept: f64,
    /// Covariate coefficients of the assignment log-odds.
    pub ps_coef: DVector<f64>,
    pub outcome_intercept: f64,
    pub treatment_effect: f64,
    pub outcome_coef: DVector<f64>,
    pub residual_variance: f64,
}

impl LogitTreatmentModel {
    pub fn p(&self) -> usize {
        self.covariate_mean.len()
    }

    /// The same model with assignment log-odds coefficients scaled, widening
    /// or narrowing the propensity range.
    pub fn with_ps_scale(&self, factor: f64) -> Self {
        let mut model = self.clone();
        model.ps_intercept *= factor;
        model.ps_coef *= factor;
        model
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if self.ps_coef.len() != p
            || self.outcome_coef.len() != p
            || self.covariate_cov.nrows() != p
            || self.covariate_cov.ncols() != p
        {
            return Err(Error::DimensionMismatch(
                "model parameter dimensions disagree".into(),
            ));
        }
        if !(self.residual_variance.is_finite() && self.residual_variance > 0.0) {
            return Err(Error::Domain("residual variance must be positive".into()));
        }
        if (&self.covariate_cov - self.covariate_cov.transpose()).amax()
            > 1e-9 * self.covariate_cov.amax().max(1.0)
        {
            return Err(Error::Domain("covariance matrix is not symmetric".into()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct LogitTreatmentModelRepr {
    covariate_mean: Vec<f64>,
    covariate_cov: Vec<Vec<f64>>,
    ps_intercept: f64,
    ps_coef: Vec<f64>,
    outcome_intercept: f64,
    treatment_effect: f64,
    outcome_coef: Vec<f64>,
    residual_variance: f64,
}

impl TryFrom<LogitTreatmentModelRepr> for LogitTreatmentModel {
    type Error = String;

    fn try_from(r: LogitTreatmentModelRepr) -> std::result::Result<Self, String> {
        if !all_finite(
            r.covariate_mean
                .iter()
                .chain(r.covariate_cov.iter().flatten())
                .chain(&r.ps_coef)
                .chain(&r.outcome_coef)
                .chain([
                    &r.ps_intercept,
                    &r.outcome_intercept,
                    &r.treatment_effect,
                    &r.residual_variance,
                ]),
        ) {
            return Err("model parameters must be finite".into());
        }
        let model = LogitTreatmentModel {
            covariate_mean: vec_to_vector(&r.covariate_mean),
            covariate_cov: rows_to_matrix(&r.covariate_cov)?,
            ps_intercept: r.ps_intercept,
            ps_coef: vec_to_vector(&r.ps_coef),
            outcome_intercept: r.outcome_intercept,
            treatment_effect: r.treatment_effect,
            outcome_coef: vec_to_vector(&r.outcome_coef),
            residual_variance: r.residual_variance,
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }
}

impl From<LogitTreatmentModel> for LogitTreatmentModelRepr {
    fn from(m: LogitTreatmentModel) -> Self {
        LogitTreatmentModelRepr {
            covariate_mean: vector_to_vec(&m.covariate_mean),
            covariate_cov: matrix_to_rows(&m.covariate_cov),
            ps_intercept: m.ps_intercept,
            ps_coef: vector_to_vec(&m.ps_coef),
            outcome_intercept: m.outcome_intercept,
            treatment_effect: m.treatment_effect,
            outcome_coef: vector_to_vec(&m.outcome_coef),
            residual_variance: m.residual_variance,
        }
    }
}

/// Any of the generative families, as stored in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    Normal(NormalLinearModel),
    Logistic(BinaryLogisticModel),
    LogitTreatment(LogitTreatmentModel),
}

impl ModelSpec {
    pub fn p(&self) -> usize {
        match self {
            ModelSpec::Normal(m) => m.p(),
            ModelSpec::Logistic(m) => m.p(),
            ModelSpec::LogitTreatment(m) => m.p(),
        }
    }

    pub fn generate(&self, n: usize, regime: Regime, rng: &mut SeededRng) -> Result<Dataset> {
        match self {
            ModelSpec::Normal(m) => generate_normal(m, n, regime, rng),
            ModelSpec::Logistic(m) => generate_logistic(m, n, regime, rng),
            ModelSpec::LogitTreatment(m) => generate_logit_treatment(m, n, regime, rng),
        }
    }
}
