//! Logistic regression by iteratively reweighted least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Numerically stable `1 / (1 + exp(-x))`.
pub fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(p / (1 - p))`.
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Stable `ln(1 + exp(x))`.
pub fn ln_1p_exp(x: f64) -> f64 {
    if x > 33.0 {
        x
    } else if x < -33.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IrlsOptions {
    /// Convergence threshold on the sup-norm of the score X'(y - p).
    pub score_tolerance: f64,
    pub max_iterations: usize,
    /// Coefficient sup-norm beyond which the fit is declared separated.
    pub separation_bound: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        IrlsOptions {
            score_tolerance: 1e-10,
            max_iterations: 100,
            separation_bound: 1e4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub coefficients: DVector<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm of the score at the returned coefficients.
    pub score_norm: f64,
}

impl LogisticFit {
    /// Fitted probability at a design row.
    pub fn probability(&self, row: &DVector<f64>) -> f64 {
        expit(self.coefficients.dot(row))
    }
}

/// Maximizes the Bernoulli log-likelihood of `response01` given `design`.
///
/// Starts at zero coefficients and solves each weighted least-squares step by
/// QR, halving the step whenever the log-likelihood would decrease.
pub fn logistic_irls(
    design: &DMatrix<f64>,
    response01: &DVector<f64>,
    options: IrlsOptions,
) -> Result<LogisticFit> {
    let n = design.nrows();
    let k = design.ncols();
    if response01.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows but response has {} entries",
            response01.len()
        )));
    }
    if n <= k {
        return Err(Error::DimensionMismatch(format!(
            "need more observations ({n}) than design columns ({k})"
        )));
    }
    if response01.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::Domain(
            "logistic response entries must be 0 or 1".into(),
        ));
    }

    let log_likelihood = |beta: &DVector<f64>| -> f64 {
        let eta = design * beta;
        (0..n)
            .map(|i| response01[i] * eta[i] - ln_1p_exp(eta[i]))
            .sum()
    };

    let mut beta = DVector::zeros(k);
    let mut ll = log_likelihood(&beta);

    for iteration in 1..=options.max_iterations {
        let eta = design * &beta;
        let p = eta.map(expit);
        let w = p.map(|pi| (pi * (1.0 - pi)).max(1e-10));

        // Working response and weighted QR solve of (X'WX) beta = X'Wz.
        let mut weighted_design = design.clone();
        let mut weighted_z = DVector::zeros(n);
        for i in 0..n {
            let sw = w[i].sqrt();
            let z = eta[i] + (response01[i] - p[i]) / w[i];
            weighted_z[i] = sw * z;
            for j in 0..k {
                weighted_design[(i, j)] *= sw;
            }
        }
        let qr = weighted_design.qr();
        let r = qr.r();
        let max_diag = (0..k).map(|j| r[(j, j)].abs()).fold(0.0_f64, f64::max);
        let tol = f64::EPSILON * (n.max(k) as f64) * max_diag;
        if max_diag == 0.0 || (0..k).any(|j| r[(j, j)].abs() <= tol) {
            return Err(Error::RankDeficient);
        }
        let qtz = qr.q().transpose() * &weighted_z;
        let mut candidate = r
            .solve_upper_triangular(&qtz)
            .ok_or(Error::RankDeficient)?;

        // Step-halving keeps the log-likelihood non-decreasing, with slack
        // for accumulation noise near the optimum.
        let mut candidate_ll = log_likelihood(&candidate);
        let slack = 1e-9 * (1.0 + ll.abs());
        let mut halvings = 0;
        while candidate_ll < ll - slack && halvings < 30 {
            candidate = (&candidate + &beta) * 0.5;
            candidate_ll = log_likelihood(&candidate);
            halvings += 1;
        }
        beta = candidate;
        ll = candidate_ll;

        let norm = beta.amax();
        if norm > options.separation_bound {
            return Err(Error::Separation {
                norm,
                bound: options.separation_bound,
            });
        }

        let p = (design * &beta).map(expit);
        // Every probability numerically pinned to 0 or 1 means the
        // likelihood has no interior maximum: the data are separated and the
        // coefficients are off to infinity.
        let w_max = p.iter().map(|pi| pi * (1.0 - pi)).fold(0.0, f64::max);
        if w_max < 1e-10 {
            return Err(Error::Separation {
                norm,
                bound: options.separation_bound,
            });
        }
        let score = design.transpose() * (response01 - &p);
        let score_norm = score.amax();
        if score_norm < options.score_tolerance {
            return Ok(LogisticFit {
                coefficients: beta,
                converged: true,
                iterations: iteration,
                score_norm,
            });
        }
    }

    let p = (design * &beta).map(expit);
    let score_norm = (design.transpose() * (response01 - &p)).amax();
    Ok(LogisticFit {
        coefficients: beta,
        converged: false,
        iterations: options.max_iterations,
        score_norm,
    })
}
