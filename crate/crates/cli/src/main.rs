//! `acekit`: simulate benchmark scenarios, estimate effects from CSV data,
//! print closed-form variance multipliers, and compare per-arm score
//! densities.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
//! Failures emit a one-line JSON object on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use acekit::error::{Error, ErrorCategory};
use acekit::estimators::{asymptotic_variance_multiplier, ToyRegression};
use acekit::harness::{
    histogram_edges, run_estimator, run_experiment, scenario_plan, write_outputs, AdjustSpec,
    ArmEstimates, EstimatorSpec, ExperimentPlan, OutcomeSpec, PlannedEstimator, ScoreSpec,
};
use acekit::numkit::SeededRng;
use acekit::simgen::{ModelSpec, Scenario, ScenarioBundle};
use acekit::table::{hot_deck_impute, ingest_csv, CsvTable};

const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(name = "acekit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write summary files.
    Simulate(SimulateArgs),
    /// Estimate the average causal effect from a CSV dataset.
    Estimate(EstimateArgs),
    /// Print the closed-form asymptotic variance multipliers of a scenario.
    Asymptotics(AsymptoticsArgs),
    /// Emit per-arm densities of the estimated propensity score.
    PsDensity(PsDensityArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in scenario name: fig5, fig6_7, fig10 or logit_toy.
    #[arg(long, conflicts_with = "scenario_file")]
    scenario: Option<String>,
    /// JSON scenario file holding a model bundle.
    #[arg(long)]
    scenario_file: Option<PathBuf>,
    /// Replicate count override.
    #[arg(long)]
    reps: Option<usize>,
    /// Sample size override.
    #[arg(long)]
    n: Option<usize>,
    /// Master seed; replicate r uses stream r.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores). Output is identical for any value.
    #[arg(long)]
    workers: Option<usize>,
    /// Histogram bin edges as lo:hi:step.
    #[arg(long)]
    bins: Option<String>,
    /// Output directory for summary.json, summary.csv and hist_<label>.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Treatment column (binary).
    #[arg(long)]
    treatment: String,
    /// Response column.
    #[arg(long)]
    response: String,
    /// Comma-separated covariate columns.
    #[arg(long, value_delimiter = ',')]
    covariates: Vec<String>,
    /// Estimator.
    #[arg(long)]
    method: Method,
    /// Score used for weighting, stratification, or regression adjustment.
    #[arg(long)]
    ps: Option<PsChoice>,
    /// Outcome model for the augmented estimator.
    #[arg(long, default_value = "joint")]
    m: MChoice,
    /// Subclass count for --method subclass.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Seed for hot-deck imputation of missing cells.
    #[arg(long, default_value_t = 0)]
    impute_seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Face,
    Reg,
    RegLd,
    RegQd,
    Subclass,
    Ipw,
    Aipw,
    Wresp,
}

#[derive(Clone, Copy, ValueEnum)]
enum PsChoice {
    /// Logistic regression of treatment on covariates.
    Logistic,
    /// Sample linear discriminant (probability form where one is needed).
    Ld,
    /// Sample quadratic discriminant (probability form where one is needed).
    Qd,
}

#[derive(Clone, Copy, ValueEnum)]
enum MChoice {
    Joint,
    PerArm,
    Zero,
    Optimal,
}

#[derive(Args)]
struct AsymptoticsArgs {
    /// Scenario name; must describe the two-covariate toy model.
    #[arg(long)]
    scenario: String,
}

#[derive(Args)]
struct PsDensityArgs {
    /// Input CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Treatment column (binary).
    #[arg(long)]
    treatment: String,
    /// Comma-separated covariate columns.
    #[arg(long, value_delimiter = ',')]
    covariates: Vec<String>,
    /// Optional response column (ignored by the score, checked if named).
    #[arg(long)]
    response: Option<String>,
    /// Grid points over [0, 1].
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Seed for hot-deck imputation of missing cells.
    #[arg(long, default_value_t = 0)]
    impute_seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

fn emit_error(kind: &str, message: String) {
    let body = serde_json::json!({ "error": ErrorBody { kind, message } });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit_error("usage", e.to_string());
            return ExitCode::from(2);
        }
    };

    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Estimate(args) => estimate(args),
        Command::Asymptotics(args) => asymptotics(args),
        Command::PsDensity(args) => ps_density(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = match e.category() {
                ErrorCategory::Usage => ("usage", 2),
                ErrorCategory::Data => ("data", 3),
                ErrorCategory::Numerical => ("numerical", 4),
            };
            emit_error(kind, e.to_string());
            ExitCode::from(code)
        }
    }
}

/// Estimator battery applied to user-supplied scenario files, where no
/// figure-specific roster exists.
fn generic_roster() -> Vec<PlannedEstimator> {
    vec![
        PlannedEstimator::new("face", EstimatorSpec::Face),
        PlannedEstimator::new(
            "reg_x",
            EstimatorSpec::Regression {
                adjust: AdjustSpec::AllCovariates,
            },
        ),
        PlannedEstimator::new(
            "reg_ld_sample",
            EstimatorSpec::Regression {
                adjust: AdjustSpec::Score(ScoreSpec::SampleLd),
            },
        ),
        PlannedEstimator::new(
            "subclass_ps",
            EstimatorSpec::Subclassification {
                score: ScoreSpec::LogisticPs,
                classes: 5,
            },
        ),
        PlannedEstimator::new(
            "ipw_logistic",
            EstimatorSpec::Ipw {
                ps: ScoreSpec::LogisticPs,
            },
        ),
        PlannedEstimator::new(
            "aipw_logistic",
            EstimatorSpec::Aipw {
                ps: ScoreSpec::LogisticPs,
                outcome: OutcomeSpec::Joint,
            },
        ),
    ]
}

fn parse_bins(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "--bins takes lo:hi:step, got `{spec}`"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            f64::from_str(p)
                .map_err(|_| Error::Config(format!("--bins component `{p}` is not a number")))
        })
        .collect::<Result<_, _>>()?;
    histogram_edges(nums[0], nums[1], nums[2])
}

fn simulate(args: SimulateArgs) -> Result<(), Error> {
    let mut plan: ExperimentPlan = match (&args.scenario, &args.scenario_file) {
        (Some(name), None) => scenario_plan(Scenario::from_str(name)?, args.seed),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let bundle: ScenarioBundle = serde_json::from_str(&text)?;
            ExperimentPlan {
                scenario: bundle.name.clone(),
                model: bundle.model,
                n: bundle.n,
                replicates: bundle.replicates,
                seed: args.seed,
                estimators: generic_roster(),
                histogram_edges: histogram_edges(-0.1, 1.1, 0.1)?,
            }
        }
        _ => {
            return Err(Error::Config(
                "exactly one of --scenario or --scenario-file is required".into(),
            ))
        }
    };
    if let Some(reps) = args.reps {
        plan.replicates = reps;
    }
    if let Some(n) = args.n {
        plan.n = n;
    }
    if let Some(bins) = &args.bins {
        plan.histogram_edges = parse_bins(bins)?;
    }

    let summary = match args.workers {
        None => run_experiment(&plan)?,
        Some(workers) => {
            if workers == 0 {
                return Err(Error::Config("--workers must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                .install(|| run_experiment(&plan))?
        }
    };
    let written = write_outputs(&summary, &args.out)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn load_dataset(
    data: &Path,
    treatment: &str,
    response: Option<&str>,
    covariates: &[String],
    impute_seed: u64,
) -> Result<acekit::Dataset, Error> {
    let table: CsvTable = ingest_csv(data, treatment, response, covariates)?;
    let complete = if table.has_missing() {
        hot_deck_impute(&table, &mut SeededRng::new(impute_seed, 0))?
    } else {
        table
    };
    complete.to_dataset()
}

fn estimate(args: EstimateArgs) -> Result<(), Error> {
    let data = load_dataset(
        &args.data,
        &args.treatment,
        Some(&args.response),
        &args.covariates,
        args.impute_seed,
    )?;

    let prob_ps = |choice: Option<PsChoice>| match choice.unwrap_or(PsChoice::Logistic) {
        PsChoice::Logistic => ScoreSpec::LogisticPs,
        PsChoice::Ld => ScoreSpec::DiscriminantPsLd,
        PsChoice::Qd => ScoreSpec::DiscriminantPsQd,
    };
    let ordering_score = |choice: Option<PsChoice>| match choice.unwrap_or(PsChoice::Logistic) {
        PsChoice::Logistic => ScoreSpec::LogisticPs,
        PsChoice::Ld => ScoreSpec::SampleLd,
        PsChoice::Qd => ScoreSpec::SampleQd,
    };
    let outcome = |choice: MChoice, ps: ScoreSpec| match choice {
        MChoice::Joint => OutcomeSpec::Joint,
        MChoice::PerArm => OutcomeSpec::PerArm,
        MChoice::Zero => OutcomeSpec::Zero,
        MChoice::Optimal => OutcomeSpec::Optimal {
            ps,
            arms: ArmEstimates::PerArm,
        },
    };

    let spec = match args.method {
        Method::Face => EstimatorSpec::Face,
        Method::Reg => match args.ps {
            None => EstimatorSpec::Regression {
                adjust: AdjustSpec::AllCovariates,
            },
            Some(choice) => EstimatorSpec::Regression {
                adjust: AdjustSpec::Score(match choice {
                    PsChoice::Logistic => ScoreSpec::LogisticPs,
                    PsChoice::Ld => ScoreSpec::SampleLd,
                    PsChoice::Qd => ScoreSpec::SampleQd,
                }),
            },
        },
        Method::RegLd => EstimatorSpec::Regression {
            adjust: AdjustSpec::Score(ScoreSpec::SampleLd),
        },
        Method::RegQd => EstimatorSpec::Regression {
            adjust: AdjustSpec::Score(ScoreSpec::SampleQd),
        },
        Method::Subclass => EstimatorSpec::Subclassification {
            score: ordering_score(args.ps),
            classes: args.k,
        },
        Method::Ipw => EstimatorSpec::Ipw {
            ps: prob_ps(args.ps),
        },
        Method::Aipw => {
            let ps = prob_ps(args.ps);
            EstimatorSpec::Aipw {
                ps: ps.clone(),
                outcome: outcome(args.m, ps),
            }
        }
        Method::Wresp => EstimatorSpec::WeightedResponse {
            ps: prob_ps(args.ps),
        },
    };

    let estimate = run_estimator(&spec, &data, None)?;
    println!("{}", serde_json::to_string_pretty(&estimate)?);
    Ok(())
}

#[derive(Serialize)]
struct Multipliers {
    m0: f64,
    m1: f64,
    m2: f64,
    /// Discriminant-estimate adjustment; identical to m0 by construction.
    m3: f64,
}

fn asymptotics(args: AsymptoticsArgs) -> Result<(), Error> {
    let bundle = acekit::simgen::scenario(Scenario::from_str(&args.scenario)?);
    let ModelSpec::Normal(model) = &bundle.model else {
        return Err(Error::WrongShape(
            "asymptotic multipliers need a normal-model scenario".into(),
        ));
    };
    let m0 = asymptotic_variance_multiplier(model, ToyRegression::FullAdjustment)?;
    let m1 = asymptotic_variance_multiplier(model, ToyRegression::DiscriminantOnly)?;
    let m2 = asymptotic_variance_multiplier(model, ToyRegression::PredictorOnly)?;
    let out = Multipliers { m0, m1, m2, m3: m0 };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn ps_density(args: PsDensityArgs) -> Result<(), Error> {
    let data = load_dataset(
        &args.data,
        &args.treatment,
        args.response.as_deref(),
        &args.covariates,
        args.impute_seed,
    )?;
    let ps = acekit::propensity::PropensityFunction::estimate_ps_logistic(&data)?;
    let rows = data.covariate_rows();
    let mut treated = Vec::new();
    let mut control = Vec::new();
    for (i, x) in rows.iter().enumerate() {
        if data.treatment[i] == 1 {
            treated.push(ps.evaluate(x));
        } else {
            control.push(ps.evaluate(x));
        }
    }
    let densities = acekit::density::score_densities(&treated, &control, args.points)?;

    let mut out = String::from("ps,treated,control\n");
    for i in 0..densities.grid.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            densities.grid[i], densities.treated[i], densities.control[i]
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(())
}
