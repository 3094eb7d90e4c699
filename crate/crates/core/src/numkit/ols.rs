//! Ordinary least squares via QR factorization.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A least-squares fit with the pieces every downstream estimator needs.
#[derive(Debug, Clone)]
pub struct OlsFit {
    /// Estimated coefficients, one per design column.
    pub coefficients: DVector<f64>,
    /// Residual variance RSS / (n - k).
    pub residual_variance: f64,
    /// Coefficient covariance `residual_variance * (X'X)^-1`, obtained from
    /// the R factor by triangular solves.
    pub covariance: DMatrix<f64>,
    /// Response minus fitted values.
    pub residuals: DVector<f64>,
}

impl OlsFit {
    /// Classical standard error of coefficient `j`.
    pub fn standard_error(&self, j: usize) -> f64 {
        self.covariance[(j, j)].max(0.0).sqrt()
    }
}

/// Least-squares regression of `response` on the columns of `design`.
///
/// Requires `n > k` and a full-column-rank design; rank is checked on the
/// diagonal of the R factor.
pub fn ols(design: &DMatrix<f64>, response: &DVector<f64>) -> Result<OlsFit> {
    let n = design.nrows();
    let k = design.ncols();
    if response.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows but response has {} entries",
            response.len()
        )));
    }
    if n <= k {
        return Err(Error::DimensionMismatch(format!(
            "need more observations ({n}) than design columns ({k})"
        )));
    }

    let qr = design.clone().qr();
    let r = qr.r();

    let max_diag = (0..k).map(|j| r[(j, j)].abs()).fold(0.0_f64, f64::max);
    let tol = f64::EPSILON * (n.max(k) as f64) * max_diag;
    if max_diag == 0.0 || (0..k).any(|j| r[(j, j)].abs() <= tol) {
        return Err(Error::RankDeficient);
    }

    let qty = qr.q().transpose() * response;
    let coefficients = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient)?;

    let residuals = response - design * &coefficients;
    let rss = residuals.norm_squared();
    let residual_variance = rss / (n - k) as f64;

    // (X'X)^-1 = R^-1 R^-T from back substitution against the identity.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::RankDeficient)?;
    let covariance = residual_variance * (&r_inv * r_inv.transpose());

    Ok(OlsFit {
        coefficients,
        residual_variance,
        covariance,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::SeededRng;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn design_from_columns(cols: &[Vec<f64>]) -> DMatrix<f64> {
        let n = cols[0].len();
        DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
    }

    #[test]
    fn exact_interpolation_of_treatment_indicator() {
        // y == T with an intercept column: the fit is exact.
        let t = vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let design = design_from_columns(&[vec![1.0; 6], t.clone()]);
        let y = DVector::from_vec(t);
        let fit = ols(&design, &y).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], 1.0, epsilon = 1e-12);
        assert!(fit.residuals.amax() < 1e-12);
        assert_abs_diff_eq!(fit.residual_variance, 0.0, epsilon = 1e-24);
    }

    /// Independent oracle: simple regression solved by Cramer's rule on the
    /// 2x2 normal equations.
    fn cramer_simple_regression(x: &[f64], y: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let det = n * sxx - sx * sx;
        ((sy * sxx - sx * sxy) / det, (n * sxy - sx * sy) / det)
    }

    #[test]
    fn six_point_fit_matches_cramer_oracle() {
        let x = [0.5, 1.0, 2.0, 3.5, 4.0, 5.5];
        let y = [1.1, 0.9, 2.3, 3.1, 4.4, 5.0];
        let (b0, b1) = cramer_simple_regression(&x, &y);
        let design = design_from_columns(&[vec![1.0; 6], x.to_vec()]);
        let fit = ols(&design, &DVector::from_row_slice(&y)).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], b0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], b1, epsilon = 1e-12);
    }

    #[test]
    fn treatment_coefficient_unbiased_under_linear_outcome() {
        // Y = 0.5 T + X2 + noise; the coefficient of T averages to 0.5.
        let reps = 200;
        let n = 100;
        let delta = 0.5;
        let mut estimates = Vec::with_capacity(reps);
        for r in 0..reps {
            let mut rng = SeededRng::new(1234, r as u64);
            let t: Vec<f64> = (0..n)
                .map(|_| if rng.bernoulli(0.5) { 1.0 } else { 0.0 })
                .collect();
            let x2: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let y: Vec<f64> = (0..n)
                .map(|i| delta * t[i] + x2[i] + rng.standard_normal())
                .collect();
            let design = design_from_columns(&[vec![1.0; n], t, x2]);
            let fit = ols(&design, &DVector::from_vec(y)).unwrap();
            estimates.push(fit.coefficients[1]);
        }
        let mean = estimates.iter().sum::<f64>() / reps as f64;
        let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>()
            / (reps - 1) as f64)
            .sqrt();
        let se_of_mean = sd / (reps as f64).sqrt();
        assert!(
            (mean - delta).abs() < 3.0 * se_of_mean,
            "mean {mean} vs 0.5 (se {se_of_mean})"
        );
    }

    #[test]
    fn refit_on_fitted_values_is_idempotent() {
        let mut rng = SeededRng::new(5, 0);
        let n = 40;
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                (0..n)
                    .map(|_| if j == 0 { 1.0 } else { rng.standard_normal() })
                    .collect()
            })
            .collect();
        let design = design_from_columns(&cols);
        let y = DVector::from_iterator(n, (0..n).map(|_| rng.standard_normal()));
        let fit = ols(&design, &y).unwrap();
        let fitted = &design * &fit.coefficients;
        let refit = ols(&design, &fitted).unwrap();
        assert!((&refit.coefficients - &fit.coefficients).amax() < 1e-10);
    }

    #[test]
    fn covariance_is_symmetric() {
        let mut rng = SeededRng::new(11, 0);
        let n = 50;
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|j| {
                (0..n)
                    .map(|_| if j == 0 { 1.0 } else { rng.standard_normal() })
                    .collect()
            })
            .collect();
        let design = design_from_columns(&cols);
        let y = DVector::from_iterator(n, (0..n).map(|_| rng.standard_normal()));
        let fit = ols(&design, &y).unwrap();
        let asym = (&fit.covariance - fit.covariance.transpose()).amax();
        assert!(asym < 1e-12, "covariance asymmetry {asym}");
        assert!(fit.residual_variance >= 0.0);
    }

    #[test]
    fn duplicate_column_is_rank_deficient() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let design = design_from_columns(&[vec![1.0; 5], x.clone(), x]);
        let y = DVector::from_element(5, 1.0);
        assert!(matches!(ols(&design, &y), Err(Error::RankDeficient)));
    }

    #[test]
    fn dimension_errors() {
        let design = DMatrix::from_element(3, 3, 1.0);
        let y = DVector::from_element(3, 1.0);
        assert!(matches!(
            ols(&design, &y),
            Err(Error::DimensionMismatch(_))
        ));
        let design = DMatrix::from_element(5, 2, 1.0);
        assert!(matches!(
            ols(&design, &y),
            Err(Error::DimensionMismatch(_))
        ));
    }

    proptest! {
        // X'(y - X beta) = 0 up to solver tolerance, on every fit.
        #[test]
        fn residuals_orthogonal_to_design(seed in 0u64..500, n in 10usize..60, k in 1usize..4) {
            let mut rng = SeededRng::new(seed, 99);
            let mut cols = vec![vec![1.0; n]];
            for _ in 0..k {
                cols.push((0..n).map(|_| 10.0 * rng.standard_normal()).collect());
            }
            let design = design_from_columns(&cols);
            let y = DVector::from_iterator(n, (0..n).map(|_| 5.0 * rng.standard_normal()));
            let fit = ols(&design, &y).unwrap();
            let score = design.transpose() * &fit.residuals;
            let bound = 1e-8 * y.amax().max(1.0);
            prop_assert!(score.amax() < bound, "score norm {} vs {}", score.amax(), bound);
        }
    }
}
