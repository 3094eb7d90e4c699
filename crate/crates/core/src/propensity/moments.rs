//! Per-arm first and second moments, in population and sample form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::simgen::{Dataset, NormalLinearModel};

/// Treated fraction, per-arm means and covariances, and the pooled
/// within-group covariance that discriminant construction uses.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMoments {
    pub treated_fraction: f64,
    pub mean_control: DVector<f64>,
    pub mean_treated: DVector<f64>,
    pub cov_control: DMatrix<f64>,
    pub cov_treated: DMatrix<f64>,
    /// Population form: the arm-probability-weighted mixture
    /// `(1-theta) cov_control + theta cov_treated`. Sample form: the
    /// bias-corrected pooled within-group covariance (scatter weights
    /// `n_g - 1`); this is the pooling for which regression adjustment on
    /// the linear discriminant reproduces the covariate-adjusted treatment
    /// coefficient identically.
    pub pooled_cov: DMatrix<f64>,
}

impl GroupMoments {
    /// Moments of a generative model's covariate law.
    pub fn population(model: &NormalLinearModel) -> Self {
        let theta = model.treated_prob;
        GroupMoments {
            treated_fraction: theta,
            mean_control: model.mean_control.clone(),
            mean_treated: model.mean_treated.clone(),
            cov_control: model.cov_control.clone(),
            cov_treated: model.cov_treated.clone(),
            pooled_cov: (1.0 - theta) * &model.cov_control + theta * &model.cov_treated,
        }
    }
}

/// Per-arm sample means and unbiased covariances; the treated fraction is
/// `n1 / n`.
pub fn sample_moments(data: &Dataset) -> Result<GroupMoments> {
    let n = data.n();
    let p = data.p();
    let n1 = data.treated_count();
    let n0 = n - n1;
    for (arm, size) in [(0u8, n0), (1u8, n1)] {
        if size == 0 {
            return Err(Error::EmptyGroup(arm));
        }
        if size <= p {
            return Err(Error::InsufficientGroupSize {
                group: arm,
                size,
                dim: p,
            });
        }
    }

    let mut mean_control = DVector::zeros(p);
    let mut mean_treated = DVector::zeros(p);
    for i in 0..n {
        let target = if data.treatment[i] == 1 {
            &mut mean_treated
        } else {
            &mut mean_control
        };
        for j in 0..p {
            target[j] += data.covariates[(i, j)];
        }
    }
    mean_control /= n0 as f64;
    mean_treated /= n1 as f64;

    let mut scatter_control = DMatrix::zeros(p, p);
    let mut scatter_treated = DMatrix::zeros(p, p);
    let mut centered = DVector::zeros(p);
    for i in 0..n {
        let (mean, scatter) = if data.treatment[i] == 1 {
            (&mean_treated, &mut scatter_treated)
        } else {
            (&mean_control, &mut scatter_control)
        };
        for j in 0..p {
            centered[j] = data.covariates[(i, j)] - mean[j];
        }
        scatter.syger(1.0, &centered, &centered, 1.0);
    }
    // syger fills the lower triangle; mirror it.
    for m in [&mut scatter_control, &mut scatter_treated] {
        for i in 0..p {
            for j in (i + 1)..p {
                m[(i, j)] = m[(j, i)];
            }
        }
    }

    let pooled_cov = (&scatter_control + &scatter_treated) / (n - 2) as f64;
    Ok(GroupMoments {
        treated_fraction: n1 as f64 / n as f64,
        mean_control,
        mean_treated,
        cov_control: scatter_control / (n0 - 1) as f64,
        cov_treated: scatter_treated / (n1 - 1) as f64,
        pooled_cov,
    })
}
