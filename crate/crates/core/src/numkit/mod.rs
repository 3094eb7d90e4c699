//! Deterministic numerical kernel: least squares, logistic regression by
//! IRLS, and seeded samplers.
//!
//! Linear systems are always solved through QR or Cholesky factorizations;
//! no estimation path forms an explicit matrix inverse.

mod logistic;
mod ols;
mod rng;
mod sampling;

pub use logistic::{expit, ln_1p_exp, logistic_irls, logit, IrlsOptions, LogisticFit};
pub use ols::{ols, OlsFit};
pub use rng::SeededRng;
pub use sampling::{mvn_sample, sampling_cholesky};
