//! Experiment plans: a model, a replicate schedule, and a roster of
//! estimator configurations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simgen::{scenario, ModelSpec, Scenario};

/// A scored function an estimator can adjust for, stratify on, or weight by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreSpec {
    /// Population linear discriminant (normal models only).
    PopulationLd,
    /// Population quadratic discriminant (normal models only).
    PopulationQd,
    /// Linear discriminant from sample moments.
    SampleLd,
    /// Quadratic discriminant from sample moments.
    SampleQd,
    /// Assignment probability from a logistic regression of T on X.
    LogisticPs,
    /// The generating model's own assignment probability.
    TruePs,
    /// A fixed probability for every unit.
    ConstantPs(f64),
    /// A fixed logistic probability with the given log-odds coefficients.
    LogitPs { intercept: f64, coef: Vec<f64> },
    /// Probability reconstructed from sample moments through the
    /// prior-odds formula, linear-discriminant form.
    DiscriminantPsLd,
    /// As above, quadratic-discriminant form.
    DiscriminantPsQd,
}

/// Adjustment sets for the regression estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjustSpec {
    AllCovariates,
    Columns(Vec<usize>),
    Score(ScoreSpec),
}

/// How arm-mean estimates feed an optimal augmentation blend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmEstimates {
    /// One joint fit of the response on (1, T, X).
    Joint,
    /// Separate per-arm fits of the response on (1, X).
    PerArm,
    /// The generating model's own regression.
    TrueModel,
}

/// Outcome-model configurations for augmentation and plug-in estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeSpec {
    Zero,
    Constant(f64),
    /// Joint fit of the response on (1, T, X).
    Joint,
    /// Joint fit restricted to the listed covariate columns.
    JointColumns(Vec<usize>),
    /// Per-arm fits dispatching on the arm.
    PerArm,
    /// The treated-arm fit used for both arms.
    TreatedArmOnly,
    /// The generating model's own regression.
    TrueModel,
    /// Variance-minimizing blend of arm estimates through a probability.
    Optimal { ps: ScoreSpec, arms: ArmEstimates },
}

/// One estimator invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSpec {
    Face,
    Regression { adjust: AdjustSpec },
    Subclassification { score: ScoreSpec, classes: usize },
    Ipw { ps: ScoreSpec },
    Aipw { ps: ScoreSpec, outcome: OutcomeSpec },
    WeightedResponse { ps: ScoreSpec },
    PlugIn { outcome: OutcomeSpec },
}

/// An estimator with the label used in summaries and output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedEstimator {
    pub label: String,
    pub spec: EstimatorSpec,
}

impl PlannedEstimator {
    pub fn new(label: &str, spec: EstimatorSpec) -> Self {
        PlannedEstimator {
            label: label.to_string(),
            spec,
        }
    }
}

/// Everything a Monte Carlo run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub model: ModelSpec,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub estimators: Vec<PlannedEstimator>,
    /// Histogram bin edges, strictly increasing.
    pub histogram_edges: Vec<f64>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("need at least one replicate".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimator roster is empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for est in &self.estimators {
            if est.label.is_empty()
                || !est
                    .label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(Error::Config(format!(
                    "label `{}` must be non-empty and filesystem-safe",
                    est.label
                )));
            }
            if !seen.insert(est.label.clone()) {
                return Err(Error::Config(format!("duplicate label `{}`", est.label)));
            }
        }
        if self.histogram_edges.len() < 2
            || self.histogram_edges.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Config(
                "histogram edges must be strictly increasing with at least two entries".into(),
            ));
        }
        Ok(())
    }
}

/// Evenly spaced edges `lo, lo + step, ..., hi`.
pub fn histogram_edges(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Config(format!(
            "bad histogram range {lo}:{hi}:{step}"
        )));
    }
    let count = ((hi - lo) / step).round() as usize;
    if count == 0 || count > 10_000 {
        return Err(Error::Config(format!(
            "bad histogram range {lo}:{hi}:{step}"
        )));
    }
    Ok((0..=count).map(|i| lo + i as f64 * step).collect())
}

/// The default experiment plan of a named scenario: the benchmark replicate
/// schedule plus the estimator roster its figures compare.
pub fn scenario_plan(which: Scenario, seed: u64) -> ExperimentPlan {
    let bundle = scenario(which);
    use EstimatorSpec::*;
    let (estimators, edges) = match which {
        Scenario::Fig5 => (
            vec![
                PlannedEstimator::new(
                    "reg_x",
                    Regression {
                        adjust: AdjustSpec::AllCovariates,
                    },
                ),
                PlannedEstimator::new(
                    "reg_ld_sample",
                    Regression {
                        adjust: AdjustSpec::Score(ScoreSpec::SampleLd),
                    },
                ),
                PlannedEstimator::new(
                    "reg_ld",
                    Regression {
                        adjust: AdjustSpec::Score(ScoreSpec::PopulationLd),
                    },
                ),
                PlannedEstimator::new(
                    "reg_lp",
                    Regression {
                        adjust: AdjustSpec::Columns(vec![1]),
                    },
                ),
            ],
            histogram_edges(-2.5, 2.5, 0.5).unwrap(),
        ),
        Scenario::Fig67 => (
            vec![
                PlannedEstimator::new(
                    "reg_lp",
                    Regression {
                        adjust: AdjustSpec::Columns(vec![1]),
                    },
                ),
                PlannedEstimator::new(
                    "reg_ld",
                    Regression {
                        adjust: AdjustSpec::Score(ScoreSpec::PopulationLd),
                    },
                ),
                PlannedEstimator::new(
                    "reg_qd",
                    Regression {
                        adjust: AdjustSpec::Score(ScoreSpec::PopulationQd),
                    },
                ),
                PlannedEstimator::new(
                    "subclass_qd",
                    Subclassification {
                        score: ScoreSpec::PopulationQd,
                        classes: 5,
                    },
                ),
                PlannedEstimator::new(
                    "reg_x",
                    Regression {
                        adjust: AdjustSpec::AllCovariates,
                    },
                ),
                PlannedEstimator::new(
                    "reg_ld_sample",
                    Regression {
                        adjust: AdjustSpec::Score(ScoreSpec::SampleLd),
                    },
                ),
                PlannedEstimator::new(
                    "reg_qd_sample",
                    Regression {
                        adjust: AdjustSpec::Score(ScoreSpec::SampleQd),
                    },
                ),
                PlannedEstimator::new(
                    "subclass_qd_sample",
                    Subclassification {
                        score: ScoreSpec::SampleQd,
                        classes: 5,
                    },
                ),
            ],
            histogram_edges(-0.1, 1.1, 0.1).unwrap(),
        ),
        Scenario::Fig10 => (
            vec![
                PlannedEstimator::new(
                    "aipw_joint",
                    Aipw {
                        ps: ScoreSpec::TruePs,
                        outcome: OutcomeSpec::Optimal {
                            ps: ScoreSpec::TruePs,
                            arms: ArmEstimates::Joint,
                        },
                    },
                ),
                PlannedEstimator::new(
                    "aipw_arm",
                    Aipw {
                        ps: ScoreSpec::TruePs,
                        outcome: OutcomeSpec::Optimal {
                            ps: ScoreSpec::TruePs,
                            arms: ArmEstimates::PerArm,
                        },
                    },
                ),
                PlannedEstimator::new("ht", Ipw { ps: ScoreSpec::TruePs }),
                PlannedEstimator::new(
                    "wresp",
                    WeightedResponse {
                        ps: ScoreSpec::TruePs,
                    },
                ),
            ],
            histogram_edges(-0.1, 1.1, 0.1).unwrap(),
        ),
        Scenario::LogitToy => (
            vec![
                PlannedEstimator::new("face", Face),
                PlannedEstimator::new(
                    "ipw_logistic",
                    Ipw {
                        ps: ScoreSpec::LogisticPs,
                    },
                ),
                PlannedEstimator::new(
                    "aipw_logistic",
                    Aipw {
                        ps: ScoreSpec::LogisticPs,
                        outcome: OutcomeSpec::Joint,
                    },
                ),
            ],
            histogram_edges(-0.1, 1.1, 0.1).unwrap(),
        ),
    };
    ExperimentPlan {
        scenario: Some(bundle.name.clone().unwrap_or_else(|| which.name().into())),
        model: bundle.model,
        n: bundle.n,
        replicates: bundle.replicates,
        seed,
        estimators,
        histogram_edges: edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_generation() {
        let edges = histogram_edges(-2.5, 2.5, 0.5).unwrap();
        assert_eq!(edges.len(), 11);
        assert_eq!(edges[0], -2.5);
        assert_eq!(*edges.last().unwrap(), 2.5);
        assert!(histogram_edges(1.0, 0.0, 0.5).is_err());
        assert!(histogram_edges(0.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn scenario_plans_validate() {
        for s in Scenario::ALL {
            let plan = scenario_plan(s, 7);
            plan.validate().unwrap();
            assert_eq!(plan.scenario.as_deref(), Some(s.name()));
        }
    }

    #[test]
    fn validation_rejects_bad_plans() {
        let mut plan = scenario_plan(Scenario::Fig5, 7);
        plan.replicates = 0;
        assert!(plan.validate().is_err());

        let mut plan = scenario_plan(Scenario::Fig5, 7);
        plan.estimators[1].label = plan.estimators[0].label.clone();
        assert!(plan.validate().is_err());

        let mut plan = scenario_plan(Scenario::Fig5, 7);
        plan.estimators[0].label = "has space".into();
        assert!(plan.validate().is_err());

        let mut plan = scenario_plan(Scenario::Fig5, 7);
        plan.histogram_edges = vec![0.0];
        assert!(plan.validate().is_err());
    }

    #[test]
    fn plans_round_trip_through_json() {
        let plan = scenario_plan(Scenario::Fig10, 13);
        let json = serde_json::to_string(&plan).unwrap();
        let back: ExperimentPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plan);
    }
}
