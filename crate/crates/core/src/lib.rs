//! Estimation of average causal effects from observational data.
//!
//! The crate provides, as a library:
//!
//! - a small deterministic numerical kernel ([`numkit`]): QR-based least
//!   squares, logistic regression by IRLS, and seeded multivariate-normal
//!   and Bernoulli samplers;
//! - propensity machinery ([`propensity`]): propensity scores, linear and
//!   quadratic discriminants, in population and sample form;
//! - the estimator catalogue ([`estimators`]): naive group contrast,
//!   regression adjustment, subclassification, inverse-probability
//!   weighting, the augmented (doubly robust) weighting estimator with
//!   pluggable outcome models, and closed-form references;
//! - data-generating processes and named benchmark scenarios ([`simgen`]);
//! - a seeded, replicate-parallel Monte Carlo harness ([`harness`]) plus CSV
//!   ingestion with hot-deck imputation ([`table`]).
//!
//! The `acekit` binary in this workspace exposes the harness and the
//! estimators on the command line.

pub mod density;
pub mod error;
pub mod estimators;
pub mod harness;
mod jsonrep;
pub mod numkit;
pub mod propensity;
pub mod simgen;
pub mod table;

pub use error::{Error, ErrorCategory, Result};
pub use simgen::Dataset;
