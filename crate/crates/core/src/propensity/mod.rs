//! Propensity scores, propensity variables, and their estimation.

mod function;
mod moments;

pub use function::{log_lambda_constant, ps_from_lambda, PropensityFunction, ScoreKind};
pub use moments::{sample_moments, GroupMoments};
