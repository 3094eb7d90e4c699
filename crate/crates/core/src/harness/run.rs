//! Replicate execution, estimator resolution, and summary statistics.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    aipw_ace, face, ipw_ace, logistic_ace_enumerate, plug_in_ace, regression_adjusted_ace,
    subclassification_ace, weighted_response_ace, AceEstimate, Adjustment, OutcomeModel,
};
use crate::harness::plan::{
    AdjustSpec, ArmEstimates, EstimatorSpec, ExperimentPlan, OutcomeSpec, ScoreSpec,
};
use crate::numkit::SeededRng;
use crate::propensity::{sample_moments, PropensityFunction, ScoreKind};
use crate::simgen::{Dataset, ModelSpec, Regime};

/// The true effect a model's estimates are judged against.
pub fn true_ace(model: &ModelSpec) -> Result<f64> {
    match model {
        ModelSpec::Normal(m) => Ok(m.treatment_effect),
        ModelSpec::LogitTreatment(m) => Ok(m.treatment_effect),
        ModelSpec::Logistic(m) => logistic_ace_enumerate(m),
    }
}

/// Resolves a score specification against a dataset and, where needed, the
/// generating model.
pub fn resolve_score(
    spec: &ScoreSpec,
    data: &Dataset,
    model: Option<&ModelSpec>,
) -> Result<PropensityFunction> {
    let normal_model = || match model {
        Some(ModelSpec::Normal(m)) => Ok(m),
        Some(_) => Err(Error::Config(
            "population discriminants need a normal model".into(),
        )),
        None => Err(Error::Config(
            "population scores need a generating model".into(),
        )),
    };
    match spec {
        ScoreSpec::PopulationLd => PropensityFunction::population_ld(normal_model()?),
        ScoreSpec::PopulationQd => PropensityFunction::population_qd(normal_model()?),
        ScoreSpec::SampleLd => PropensityFunction::sample_ld(data),
        ScoreSpec::SampleQd => PropensityFunction::sample_qd(data),
        ScoreSpec::LogisticPs => PropensityFunction::estimate_ps_logistic(data),
        ScoreSpec::ConstantPs(value) => PropensityFunction::constant_ps(*value, data.p()),
        ScoreSpec::LogitPs { intercept, coef } => {
            if coef.len() != data.p() {
                return Err(Error::Config(format!(
                    "fixed logit propensity has {} coefficients but data has {} covariates",
                    coef.len(),
                    data.p()
                )));
            }
            Ok(PropensityFunction::ps_from_logit(
                *intercept,
                nalgebra::DVector::from_row_slice(coef),
            ))
        }
        ScoreSpec::DiscriminantPsLd => PropensityFunction::ps_from_discriminant(
            &sample_moments(data)?,
            false,
            ScoreKind::EstimatedPs,
        ),
        ScoreSpec::DiscriminantPsQd => PropensityFunction::ps_from_discriminant(
            &sample_moments(data)?,
            true,
            ScoreKind::EstimatedPs,
        ),
        ScoreSpec::TruePs => match model {
            Some(ModelSpec::Normal(m)) => PropensityFunction::population_ps(m),
            Some(ModelSpec::LogitTreatment(m)) => Ok(PropensityFunction::ps_from_logit(
                m.ps_intercept,
                m.ps_coef.clone(),
            )),
            Some(ModelSpec::Logistic(m)) => Ok(PropensityFunction::ps_from_logit(
                m.treat_intercept,
                m.treat_coef.clone(),
            )),
            None => Err(Error::Config(
                "the true propensity needs a generating model".into(),
            )),
        },
    }
}

/// Resolves an outcome-model specification.
pub fn resolve_outcome(
    spec: &OutcomeSpec,
    data: &Dataset,
    model: Option<&ModelSpec>,
) -> Result<OutcomeModel> {
    match spec {
        OutcomeSpec::Zero => Ok(OutcomeModel::zero()),
        OutcomeSpec::Constant(c) => Ok(OutcomeModel::constant(*c)),
        OutcomeSpec::Joint => OutcomeModel::fit_joint(data),
        OutcomeSpec::JointColumns(cols) => OutcomeModel::fit_joint_on(data, cols),
        OutcomeSpec::PerArm => OutcomeModel::fit_per_arm(data),
        OutcomeSpec::TreatedArmOnly => OutcomeModel::fit_arm(data, 1),
        OutcomeSpec::TrueModel => match model {
            Some(ModelSpec::Normal(m)) => Ok(OutcomeModel::known_linear(
                m.intercept,
                m.treatment_effect,
                m.outcome_coef.clone(),
            )),
            Some(ModelSpec::LogitTreatment(m)) => Ok(OutcomeModel::known_linear(
                m.outcome_intercept,
                m.treatment_effect,
                m.outcome_coef.clone(),
            )),
            Some(ModelSpec::Logistic(_)) => Err(Error::Config(
                "the binary family has no linear true outcome model".into(),
            )),
            None => Err(Error::Config(
                "the true outcome model needs a generating model".into(),
            )),
        },
        OutcomeSpec::Optimal { ps, arms } => {
            let ps_fn = resolve_score(ps, data, model)?;
            if !ps_fn.is_probability() {
                return Err(Error::Config(
                    "optimal blending needs a probability-kind score".into(),
                ));
            }
            let arm_spec = match arms {
                ArmEstimates::Joint => OutcomeSpec::Joint,
                ArmEstimates::PerArm => OutcomeSpec::PerArm,
                ArmEstimates::TrueModel => OutcomeSpec::TrueModel,
            };
            let arm_model = resolve_outcome(&arm_spec, data, model)?;
            Ok(OutcomeModel::optimal_blend(
                ps_fn,
                arm_model.clone(),
                arm_model,
            ))
        }
    }
}

/// Runs one estimator configuration on one dataset.
pub fn run_estimator(
    spec: &EstimatorSpec,
    data: &Dataset,
    model: Option<&ModelSpec>,
) -> Result<AceEstimate> {
    match spec {
        EstimatorSpec::Face => face(data),
        EstimatorSpec::Regression { adjust } => match adjust {
            AdjustSpec::AllCovariates => regression_adjusted_ace(data, Adjustment::AllCovariates),
            AdjustSpec::Columns(cols) => regression_adjusted_ace(data, Adjustment::Columns(cols)),
            AdjustSpec::Score(score) => {
                let f = resolve_score(score, data, model)?;
                regression_adjusted_ace(data, Adjustment::Score(&f))
            }
        },
        EstimatorSpec::Subclassification { score, classes } => {
            let f = resolve_score(score, data, model)?;
            subclassification_ace(data, &f, *classes)
        }
        EstimatorSpec::Ipw { ps } => {
            let f = resolve_score(ps, data, model)?;
            ipw_ace(data, &f)
        }
        EstimatorSpec::Aipw { ps, outcome } => {
            let f = resolve_score(ps, data, model)?;
            let m = resolve_outcome(outcome, data, model)?;
            aipw_ace(data, &f, &m)
        }
        EstimatorSpec::WeightedResponse { ps } => {
            let f = resolve_score(ps, data, model)?;
            weighted_response_ace(data, &f)
        }
        EstimatorSpec::PlugIn { outcome } => {
            let m = resolve_outcome(outcome, data, model)?;
            plug_in_ace(data, &m)
        }
    }
}

/// Histogram over fixed edges, with explicit out-of-range counters so the
/// counts always add up to the number of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    fn build(edges: &[f64], values: &[f64]) -> Self {
        let mut counts = vec![0u64; edges.len() - 1];
        let mut underflow = 0;
        let mut overflow = 0;
        for &v in values {
            if v < edges[0] {
                underflow += 1;
            } else if v > *edges.last().unwrap() {
                overflow += 1;
            } else {
                // Half-open bins, except the last which is closed above.
                let mut bin = edges.partition_point(|&e| e <= v).saturating_sub(1);
                bin = bin.min(counts.len() - 1);
                counts[bin] += 1;
            }
        }
        Histogram {
            edges: edges.to_vec(),
            counts,
            underflow,
            overflow,
        }
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }
}

/// Per-estimator Monte Carlo summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub label: String,
    pub successes: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd: Option<f64>,
    /// `sd^2 + (mean - true_ace)^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mse: Option<f64>,
    pub histogram: Histogram,
    /// Estimates of the successful replicates, in replicate order.
    pub estimates: Vec<f64>,
}

/// The result of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub true_ace: f64,
    pub estimators: Vec<EstimatorSummary>,
}

/// Runs every replicate of the plan and summarizes per estimator.
///
/// Replicate `r` generates its dataset from stream `r` of the master seed
/// and runs the full roster on it. Replicates execute in parallel on the
/// ambient thread pool; aggregation is in replicate order, so the summary
/// does not depend on the worker count. Estimator failures are counted and
/// excluded from the moments.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<McSummary> {
    plan.validate()?;
    let target = true_ace(&plan.model)?;

    let replicate_results: Vec<Vec<std::result::Result<f64, String>>> = (0..plan.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = SeededRng::new(plan.seed, r as u64);
            let data = match plan.model.generate(plan.n, Regime::Observational, &mut rng) {
                Ok(d) => d,
                Err(e) => {
                    let msg = format!("generation: {e}");
                    return vec![Err(msg); plan.estimators.len()];
                }
            };
            plan.estimators
                .iter()
                .map(|est| {
                    run_estimator(&est.spec, &data, Some(&plan.model))
                        .map(|a| a.estimate)
                        .map_err(|e| e.to_string())
                })
                .collect()
        })
        .collect();

    let estimators = plan
        .estimators
        .iter()
        .enumerate()
        .map(|(idx, est)| {
            let mut estimates = Vec::new();
            let mut failures = 0usize;
            let mut first_failure = None;
            for row in &replicate_results {
                match &row[idx] {
                    Ok(v) => estimates.push(*v),
                    Err(msg) => {
                        failures += 1;
                        if first_failure.is_none() {
                            first_failure = Some(msg.clone());
                        }
                    }
                }
            }
            let (mean, sd, mse) = if estimates.is_empty() {
                (None, None, None)
            } else {
                let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
                let sd = crate::estimators::sample_sd(&estimates);
                let mse = sd * sd + (mean - target) * (mean - target);
                (Some(mean), Some(sd), Some(mse))
            };
            EstimatorSummary {
                label: est.label.clone(),
                successes: estimates.len(),
                failures,
                first_failure,
                mean,
                sd,
                mse,
                histogram: Histogram::build(&plan.histogram_edges, &estimates),
                estimates,
            }
        })
        .collect();

    Ok(McSummary {
        scenario: plan.scenario.clone(),
        n: plan.n,
        replicates: plan.replicates,
        seed: plan.seed,
        true_ace: target,
        estimators,
    })
}

/// Writes `summary.json`, `summary.csv` (4-decimal view) and one
/// `hist_<label>.csv` per estimator into `dir`. Returns the paths written.
pub fn write_outputs(summary: &McSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let json_path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    std::fs::write(&json_path, json)?;
    written.push(json_path);

    let csv_path = dir.join("summary.csv");
    let mut csv = String::from("estimator,successes,failures,mean,sd,mse\n");
    for est in &summary.estimators {
        let cell = |v: Option<f64>| v.map_or(String::new(), |v| format!("{:.4}", v));
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            est.label,
            est.successes,
            est.failures,
            cell(est.mean),
            cell(est.sd),
            cell(est.mse)
        ));
    }
    std::fs::write(&csv_path, csv)?;
    written.push(csv_path);

    for est in &summary.estimators {
        let path = dir.join(format!("hist_{}.csv", est.label));
        let mut out = String::from("bin_left,bin_right,count\n");
        let edges = &est.histogram.edges;
        out.push_str(&format!("-inf,{},{}\n", edges[0], est.histogram.underflow));
        for (i, count) in est.histogram.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", edges[i], edges[i + 1], count));
        }
        out.push_str(&format!(
            "{},inf,{}\n",
            edges.last().unwrap(),
            est.histogram.overflow
        ));
        std::fs::write(&path, out)?;
        written.push(path);
    }
    Ok(written)
}

/// Convenience: write a dataset preview generated from the plan's model.
pub fn write_dataset_csv(plan: &ExperimentPlan, stream: u64, out: &mut dyn Write) -> Result<()> {
    let mut rng = SeededRng::new(plan.seed, stream);
    let data = plan.model.generate(plan.n, Regime::Observational, &mut rng)?;
    data.write_csv(out)
}
