//! Scored propensity objects: assignment probabilities and the linear and
//! quadratic discriminant scores that stand in for them.
//!
//! Every variant evaluates `intercept + linear'x + x'Q x`; probability kinds
//! pass the score through the logistic function, so their evaluations lie
//! strictly in (0,1).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonrep::{all_finite, matrix_to_rows, rows_to_matrix, vec_to_vector, vector_to_vec};
use crate::numkit::{expit, logistic_irls, logit, IrlsOptions};
use crate::propensity::{sample_moments, GroupMoments};
use crate::simgen::{Dataset, NormalLinearModel};

/// What a propensity function's score means and where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// Population assignment probability.
    Ps,
    /// Population linear discriminant score.
    Ld,
    /// Population quadratic discriminant score.
    Qd,
    /// Assignment probability estimated from data.
    EstimatedPs,
    /// Linear discriminant estimated from sample moments.
    EstimatedLd,
    /// Quadratic discriminant estimated from sample moments.
    EstimatedQd,
}

impl ScoreKind {
    pub fn is_probability(self) -> bool {
        matches!(self, ScoreKind::Ps | ScoreKind::EstimatedPs)
    }

    fn is_linear(self) -> bool {
        matches!(self, ScoreKind::Ld | ScoreKind::EstimatedLd)
    }
}

/// A scored mapping from covariates to an adjustment variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PropensityFunctionRepr", into = "PropensityFunctionRepr")]
pub struct PropensityFunction {
    kind: ScoreKind,
    intercept: f64,
    linear: DVector<f64>,
    quad: DMatrix<f64>,
}

impl PropensityFunction {
    fn new(kind: ScoreKind, intercept: f64, linear: DVector<f64>, quad: DMatrix<f64>) -> Self {
        debug_assert_eq!(quad.nrows(), linear.len());
        debug_assert_eq!(quad.ncols(), linear.len());
        debug_assert!(!kind.is_linear() || quad.amax() == 0.0);
        PropensityFunction {
            kind,
            intercept,
            linear,
            quad,
        }
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn is_probability(&self) -> bool {
        self.kind.is_probability()
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.linear
    }

    pub fn quad(&self) -> &DMatrix<f64> {
        &self.quad
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    /// The raw score `intercept + linear'x + x'Q x`.
    pub fn score(&self, x: &DVector<f64>) -> f64 {
        let mut s = self.intercept + self.linear.dot(x);
        if self.quad.amax() != 0.0 {
            s += (x.transpose() * &self.quad * x)[(0, 0)];
        }
        s
    }

    /// The adjustment value at `x`: the probability for probability kinds,
    /// the raw score otherwise.
    pub fn evaluate(&self, x: &DVector<f64>) -> f64 {
        let s = self.score(x);
        if self.is_probability() {
            expit(s)
        } else {
            s
        }
    }

    /// Fisher's linear discriminant direction `pooled^-1 (mean1 - mean0)`,
    /// with zero intercept and zero quadratic part.
    pub fn ld_from_moments(moments: &GroupMoments, kind: ScoreKind) -> Result<Self> {
        if !kind.is_linear() {
            return Err(Error::Domain("kind must be a linear discriminant".into()));
        }
        let p = moments.mean_control.len();
        let chol = nalgebra::Cholesky::new(moments.pooled_cov.clone())
            .ok_or(Error::NotPositiveDefinite)?;
        let gamma = chol.solve(&(&moments.mean_treated - &moments.mean_control));
        Ok(Self::new(kind, 0.0, gamma, DMatrix::zeros(p, p)))
    }

    /// Quadratic discriminant: linear part `cov1^-1 mean1 - cov0^-1 mean0`,
    /// quadratic part `-1/2 (cov1^-1 - cov0^-1)`, zero intercept. The
    /// additive constant of the underlying log likelihood ratio is dropped;
    /// [`log_lambda_constant`] recovers it.
    pub fn qd_from_moments(moments: &GroupMoments, kind: ScoreKind) -> Result<Self> {
        if !matches!(kind, ScoreKind::Qd | ScoreKind::EstimatedQd) {
            return Err(Error::Domain("kind must be a quadratic discriminant".into()));
        }
        let chol0 = nalgebra::Cholesky::new(moments.cov_control.clone())
            .ok_or(Error::NotPositiveDefinite)?;
        let chol1 = nalgebra::Cholesky::new(moments.cov_treated.clone())
            .ok_or(Error::NotPositiveDefinite)?;
        let linear = chol1.solve(&moments.mean_treated) - chol0.solve(&moments.mean_control);
        let mut quad = -0.5 * (chol1.inverse() - chol0.inverse());
        // Symmetrize away factorization roundoff.
        quad = (&quad + quad.transpose()) * 0.5;
        Ok(Self::new(kind, 0.0, linear, quad))
    }

    /// Population linear discriminant of a normal model, using the
    /// arm-probability-weighted pooled covariance.
    pub fn population_ld(model: &NormalLinearModel) -> Result<Self> {
        Self::ld_from_moments(&GroupMoments::population(model), ScoreKind::Ld)
    }

    /// Population quadratic discriminant of a normal model.
    pub fn population_qd(model: &NormalLinearModel) -> Result<Self> {
        Self::qd_from_moments(&GroupMoments::population(model), ScoreKind::Qd)
    }

    /// Sample linear discriminant: [`sample_moments`] composed with
    /// [`Self::ld_from_moments`].
    pub fn sample_ld(data: &Dataset) -> Result<Self> {
        Self::ld_from_moments(&sample_moments(data)?, ScoreKind::EstimatedLd)
    }

    /// Sample quadratic discriminant.
    pub fn sample_qd(data: &Dataset) -> Result<Self> {
        Self::qd_from_moments(&sample_moments(data)?, ScoreKind::EstimatedQd)
    }

    /// Assignment probability from a logistic regression of T on X.
    pub fn estimate_ps_logistic(data: &Dataset) -> Result<Self> {
        let n = data.n();
        let p = data.p();
        let design = DMatrix::from_fn(n, p + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                data.covariates[(i, j - 1)]
            }
        });
        let fit = logistic_irls(&design, &data.treatment_f64(), IrlsOptions::default())?;
        let intercept = fit.coefficients[0];
        let linear = DVector::from_fn(p, |j, _| fit.coefficients[j + 1]);
        Ok(Self::new(
            ScoreKind::EstimatedPs,
            intercept,
            linear,
            DMatrix::zeros(p, p),
        ))
    }

    /// A probability function with known assignment log-odds
    /// `intercept + linear'x`.
    pub fn ps_from_logit(intercept: f64, linear: DVector<f64>) -> Self {
        let p = linear.len();
        Self::new(ScoreKind::Ps, intercept, linear, DMatrix::zeros(p, p))
    }

    /// The constant probability `value` regardless of covariates.
    pub fn constant_ps(value: f64, dim: usize) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::Domain(format!(
                "constant propensity {value} must be in (0,1)"
            )));
        }
        Ok(Self::new(
            ScoreKind::Ps,
            logit(value),
            DVector::zeros(dim),
            DMatrix::zeros(dim, dim),
        ))
    }

    /// The assignment probability implied by per-arm normal covariate laws:
    /// the prior log odds plus the log likelihood ratio, mapped through the
    /// logistic function. With `quadratic` false the pooled covariance
    /// serves both arms and the score is linear.
    pub fn ps_from_discriminant(
        moments: &GroupMoments,
        quadratic: bool,
        kind: ScoreKind,
    ) -> Result<Self> {
        if !kind.is_probability() {
            return Err(Error::Domain("kind must be a probability kind".into()));
        }
        let theta = moments.treated_fraction;
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Domain(format!(
                "treated fraction {theta} must be in (0,1)"
            )));
        }
        let base = if quadratic {
            Self::qd_from_moments(moments, ScoreKind::Qd)?
        } else {
            Self::ld_from_moments(moments, ScoreKind::Ld)?
        };
        let constant = log_lambda_constant(moments, quadratic)?;
        Ok(Self::new(
            kind,
            logit(theta) + constant,
            base.linear,
            base.quad,
        ))
    }

    /// Population assignment probability of a normal model.
    pub fn population_ps(model: &NormalLinearModel) -> Result<Self> {
        Self::ps_from_discriminant(
            &GroupMoments::population(model),
            !model.is_homoscedastic(),
            ScoreKind::Ps,
        )
    }
}

/// The probability implied by a likelihood ratio `lambda` and a prior
/// treated probability `theta`: `theta * lambda / (1 - theta + theta * lambda)`.
pub fn ps_from_lambda(lambda: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("theta {theta} must be in (0,1)")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("lambda {lambda} must be positive")));
    }
    Ok(theta * lambda / (1.0 - theta + theta * lambda))
}

/// The additive constant of the log likelihood ratio of two normal covariate
/// laws, dropped from stored discriminants. With `quadratic` false the
/// pooled covariance serves both arms and the determinant term vanishes.
pub fn log_lambda_constant(moments: &GroupMoments, quadratic: bool) -> Result<f64> {
    let (cov0, cov1) = if quadratic {
        (&moments.cov_control, &moments.cov_treated)
    } else {
        (&moments.pooled_cov, &moments.pooled_cov)
    };
    let chol0 = nalgebra::Cholesky::new(cov0.clone()).ok_or(Error::NotPositiveDefinite)?;
    let chol1 = nalgebra::Cholesky::new(cov1.clone()).ok_or(Error::NotPositiveDefinite)?;
    let log_det = |chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>| {
        2.0 * (0..chol.l_dirty().nrows())
            .map(|i| chol.l_dirty()[(i, i)].ln())
            .sum::<f64>()
    };
    let q1 = moments.mean_treated.dot(&chol1.solve(&moments.mean_treated));
    let q0 = moments.mean_control.dot(&chol0.solve(&moments.mean_control));
    Ok(-0.5 * (log_det(&chol1) - log_det(&chol0) + q1 - q0))
}

#[derive(Serialize, Deserialize)]
struct PropensityFunctionRepr {
    kind: ScoreKind,
    intercept: f64,
    linear: Vec<f64>,
    quad: Vec<Vec<f64>>,
}

impl TryFrom<PropensityFunctionRepr> for PropensityFunction {
    type Error = String;

    fn try_from(r: PropensityFunctionRepr) -> std::result::Result<Self, String> {
        if !all_finite(r.linear.iter().chain(r.quad.iter().flatten()).chain([&r.intercept])) {
            return Err("propensity function entries must be finite".into());
        }
        let linear = vec_to_vector(&r.linear);
        let quad = rows_to_matrix(&r.quad)?;
        let p = linear.len();
        if quad.nrows() != p || quad.ncols() != p {
            return Err(format!(
                "quad is {}x{} but linear has length {p}",
                quad.nrows(),
                quad.ncols()
            ));
        }
        if (&quad - quad.transpose()).amax() > 1e-9 * quad.amax().max(1.0) {
            return Err("quad must be symmetric".into());
        }
        if r.kind.is_linear() && quad.amax() != 0.0 {
            return Err("linear discriminant kinds must have a zero quad".into());
        }
        Ok(PropensityFunction {
            kind: r.kind,
            intercept: r.intercept,
            linear,
            quad,
        })
    }
}

impl From<PropensityFunction> for PropensityFunctionRepr {
    fn from(f: PropensityFunction) -> Self {
        PropensityFunctionRepr {
            kind: f.kind,
            intercept: f.intercept,
            linear: vector_to_vec(&f.linear),
            quad: matrix_to_rows(&f.quad),
        }
    }
}
