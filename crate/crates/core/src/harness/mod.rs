//! Seeded, replicate-parallel Monte Carlo experiments over the estimator
//! catalogue.

mod plan;
mod run;

pub use plan::{
    histogram_edges, scenario_plan, AdjustSpec, ArmEstimates, EstimatorSpec, ExperimentPlan,
    OutcomeSpec, PlannedEstimator, ScoreSpec,
};
pub use run::{
    resolve_outcome, resolve_score, run_estimator, run_experiment, true_ace, write_dataset_csv,
    write_outputs, EstimatorSummary, Histogram, McSummary,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::Scenario;

    #[test]
    fn single_replicate_face_on_degenerate_response() {
        // One replicate of a model whose response equals the treatment:
        // mean 1, sd 0 for the naive contrast.
        let mut plan = scenario_plan(Scenario::LogitToy, 3);
        let crate::simgen::ModelSpec::Logistic(ref mut m) = plan.model else {
            unreachable!()
        };
        // Response driven entirely by treatment: huge effect, no covariate
        // terms, so y = t with overwhelming probability.
        m.outcome_intercept = -40.0;
        m.treatment_effect = 80.0;
        m.outcome_coef = nalgebra::DVector::zeros(3);
        plan.replicates = 1;
        plan.n = 50;
        plan.estimators
            .retain(|e| matches!(e.spec, EstimatorSpec::Face));
        let summary = run_experiment(&plan).unwrap();
        let face = &summary.estimators[0];
        assert_eq!(face.successes, 1);
        assert_eq!(face.mean, Some(1.0));
        assert_eq!(face.sd, Some(0.0));
    }

    #[test]
    fn mse_identity_holds_exactly() {
        let mut plan = scenario_plan(Scenario::Fig5, 11);
        plan.replicates = 40;
        let summary = run_experiment(&plan).unwrap();
        for est in &summary.estimators {
            let (mean, sd, mse) = (est.mean.unwrap(), est.sd.unwrap(), est.mse.unwrap());
            let expected = sd * sd + (mean - summary.true_ace) * (mean - summary.true_ace);
            assert!(
                (mse - expected).abs() < 1e-12,
                "{}: {mse} vs {expected}",
                est.label
            );
        }
    }

    #[test]
    fn histogram_conserves_successes() {
        let mut plan = scenario_plan(Scenario::Fig5, 23);
        plan.replicates = 60;
        // Narrow edges force out-of-range estimates into the end counters.
        plan.histogram_edges = histogram_edges(0.45, 0.55, 0.05).unwrap();
        let summary = run_experiment(&plan).unwrap();
        for est in &summary.estimators {
            assert_eq!(est.histogram.total(), est.successes as u64, "{}", est.label);
        }
    }

    #[test]
    fn worker_count_does_not_change_the_summary() {
        let mut plan = scenario_plan(Scenario::Fig10, 5);
        plan.replicates = 12;
        plan.n = 120;
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&plan))
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_experiment(&plan))
            .unwrap();
        assert_eq!(single, many);
        let json_a = serde_json::to_string(&single).unwrap();
        let json_b = serde_json::to_string(&many).unwrap();
        assert_eq!(json_a, json_b);
    }

    #[test]
    fn failures_are_counted_not_fatal() {
        // Subclassification into as many classes as observations guarantees
        // single-observation strata, which always lack one arm.
        let mut plan = scenario_plan(Scenario::Fig5, 9);
        plan.replicates = 5;
        plan.estimators = vec![
            PlannedEstimator::new("face", EstimatorSpec::Face),
            PlannedEstimator::new(
                "subclass_fine",
                EstimatorSpec::Subclassification {
                    score: ScoreSpec::SampleLd,
                    classes: 20,
                },
            ),
        ];
        let summary = run_experiment(&plan).unwrap();
        assert_eq!(summary.estimators[0].failures, 0);
        assert_eq!(summary.estimators[1].failures, 5);
        assert_eq!(summary.estimators[1].successes, 0);
        assert!(summary.estimators[1].first_failure.is_some());
        assert!(summary.estimators[1].mean.is_none());
    }

    #[test]
    fn outputs_land_on_disk() {
        let mut plan = scenario_plan(Scenario::Fig5, 2);
        plan.replicates = 8;
        let summary = run_experiment(&plan).unwrap();
        let dir = std::env::temp_dir().join(format!("acekit-harness-test-{}", std::process::id()));
        let written = write_outputs(&summary, &dir).unwrap();
        assert_eq!(written.len(), 2 + summary.estimators.len());
        let json = std::fs::read_to_string(dir.join("summary.json")).unwrap();
        let back: McSummary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, summary);
        let hist = std::fs::read_to_string(dir.join("hist_reg_x.csv")).unwrap();
        assert!(hist.starts_with("bin_left,bin_right,count\n-inf,-2.5,"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
