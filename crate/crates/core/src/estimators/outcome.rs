//! Outcome (response regression) models pluggable into the augmented
//! weighting estimator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::ols;
use crate::propensity::PropensityFunction;
use crate::simgen::Dataset;

/// Where an outcome model came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// One least-squares fit of the response on treatment and covariates.
    FittedJoint,
    /// Separate per-arm least-squares fits of the response on covariates.
    FittedPerArm,
    /// Externally supplied, e.g. the generating model's own regression.
    Known,
    /// Identically zero: the augmentation vanishes.
    Zero,
    /// Variance-minimizing mixture of two arm models through a propensity.
    OptimalBlend,
}

#[derive(Debug, Clone, PartialEq)]
struct LinearOutcome {
    intercept: f64,
    treatment_coef: f64,
    covariate_coef: DVector<f64>,
}

impl LinearOutcome {
    fn evaluate(&self, t: u8, x: &DVector<f64>) -> f64 {
        self.intercept + self.treatment_coef * t as f64 + self.covariate_coef.dot(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum OutcomeKind {
    Zero,
    Constant(f64),
    Linear(LinearOutcome),
    PerArm {
        control: LinearOutcome,
        treated: LinearOutcome,
    },
    Blend {
        ps: Box<PropensityFunction>,
        treated: Box<OutcomeModel>,
        control: Box<OutcomeModel>,
    },
}

/// An evaluation `(t, x) -> m(t, x)` with a provenance tag.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    provenance: Provenance,
    kind: OutcomeKind,
}

impl OutcomeModel {
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn zero() -> Self {
        OutcomeModel {
            provenance: Provenance::Zero,
            kind: OutcomeKind::Zero,
        }
    }

    /// The constant function `value`, typically a deliberately wrong model.
    pub fn constant(value: f64) -> Self {
        OutcomeModel {
            provenance: Provenance::Known,
            kind: OutcomeKind::Constant(value),
        }
    }

    /// A known linear response surface `intercept + effect t + coef'x`.
    pub fn known_linear(intercept: f64, treatment_coef: f64, covariate_coef: DVector<f64>) -> Self {
        OutcomeModel {
            provenance: Provenance::Known,
            kind: OutcomeKind::Linear(LinearOutcome {
                intercept,
                treatment_coef,
                covariate_coef,
            }),
        }
    }

    /// Least squares of the response on (1, T, X).
    pub fn fit_joint(data: &Dataset) -> Result<Self> {
        let all: Vec<usize> = (0..data.p()).collect();
        Self::fit_joint_on(data, &all)
    }

    /// Least squares of the response on (1, T, selected covariate columns).
    /// Omitted columns get a zero coefficient, so omitting a confounder
    /// yields a deliberately misspecified model.
    pub fn fit_joint_on(data: &Dataset, columns: &[usize]) -> Result<Self> {
        let p = data.p();
        if let Some(&bad) = columns.iter().find(|&&c| c >= p) {
            return Err(Error::DimensionMismatch(format!(
                "covariate column {bad} out of range (p = {p})"
            )));
        }
        let n = data.n();
        let design = DMatrix::from_fn(n, 2 + columns.len(), |i, j| match j {
            0 => 1.0,
            1 => data.treatment[i] as f64,
            _ => data.covariates[(i, columns[j - 2])],
        });
        let fit = ols(&design, &data.response)?;
        let mut covariate_coef = DVector::zeros(p);
        for (slot, &col) in columns.iter().enumerate() {
            covariate_coef[col] = fit.coefficients[slot + 2];
        }
        Ok(OutcomeModel {
            provenance: Provenance::FittedJoint,
            kind: OutcomeKind::Linear(LinearOutcome {
                intercept: fit.coefficients[0],
                treatment_coef: fit.coefficients[1],
                covariate_coef,
            }),
        })
    }

    /// Separate least-squares fits of the response on (1, X) within each
    /// arm.
    pub fn fit_per_arm(data: &Dataset) -> Result<Self> {
        let control = fit_arm_linear(data, 0)?;
        let treated = fit_arm_linear(data, 1)?;
        Ok(OutcomeModel {
            provenance: Provenance::FittedPerArm,
            kind: OutcomeKind::PerArm { control, treated },
        })
    }

    /// The single-arm regression of the response on (1, X), applied to both
    /// arms. Useful as the "one arm only" augmentation baseline.
    pub fn fit_arm(data: &Dataset, arm: u8) -> Result<Self> {
        let fitted = fit_arm_linear(data, arm)?;
        Ok(OutcomeModel {
            provenance: Provenance::FittedPerArm,
            kind: OutcomeKind::Linear(fitted),
        })
    }

    /// The variance-minimizing augmentation
    /// `m(x) = (1 - pi(x)) m1(x) + pi(x) m0(x)`, evaluated identically for
    /// both arms.
    pub fn optimal_blend(
        ps: PropensityFunction,
        treated: OutcomeModel,
        control: OutcomeModel,
    ) -> Self {
        OutcomeModel {
            provenance: Provenance::OptimalBlend,
            kind: OutcomeKind::Blend {
                ps: Box::new(ps),
                treated: Box::new(treated),
                control: Box::new(control),
            },
        }
    }

    pub fn evaluate(&self, t: u8, x: &DVector<f64>) -> f64 {
        match &self.kind {
            OutcomeKind::Zero => 0.0,
            OutcomeKind::Constant(c) => *c,
            OutcomeKind::Linear(linear) => linear.evaluate(t, x),
            OutcomeKind::PerArm { control, treated } => {
                if t == 1 {
                    treated.evaluate(1, x)
                } else {
                    control.evaluate(0, x)
                }
            }
            OutcomeKind::Blend {
                ps,
                treated,
                control,
            } => {
                let pi = ps.evaluate(x);
                (1.0 - pi) * treated.evaluate(1, x) + pi * control.evaluate(0, x)
            }
        }
    }
}

fn fit_arm_linear(data: &Dataset, arm: u8) -> Result<LinearOutcome> {
    let rows: Vec<usize> = (0..data.n())
        .filter(|&i| data.treatment[i] == arm)
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyGroup(arm));
    }
    let p = data.p();
    let design = DMatrix::from_fn(rows.len(), p + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            data.covariates[(rows[i], j - 1)]
        }
    });
    let response = DVector::from_fn(rows.len(), |i, _| data.response[rows[i]]);
    let fit = ols(&design, &response)?;
    Ok(LinearOutcome {
        intercept: fit.coefficients[0],
        treatment_coef: 0.0,
        covariate_coef: DVector::from_fn(p, |j, _| fit.coefficients[j + 1]),
    })
}
