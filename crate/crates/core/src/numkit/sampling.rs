//! Multivariate normal sampling through the Cholesky factor.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::numkit::SeededRng;

/// Validated Cholesky factor of a covariance matrix, reusable across draws.
pub fn sampling_cholesky(cov: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if cov.nrows() != cov.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "covariance is {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    Cholesky::new(cov.clone()).ok_or(Error::NotPositiveDefinite)
}

/// `n` i.i.d. draws from N(mean, cov), one per row of the returned matrix.
///
/// Draws are generated row by row, so the output is a pure function of the
/// generator state.
pub fn mvn_sample(
    rng: &mut SeededRng,
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    n: usize,
) -> Result<DMatrix<f64>> {
    let p = mean.len();
    if cov.nrows() != p {
        return Err(Error::DimensionMismatch(format!(
            "mean has length {p} but covariance is {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let chol = sampling_cholesky(cov)?;
    let mut out = DMatrix::zeros(n, p);
    let mut z = DVector::zeros(p);
    for i in 0..n {
        for j in 0..p {
            z[j] = rng.standard_normal();
        }
        let x = mean + chol.l() * &z;
        for j in 0..p {
            out[(i, j)] = x[j];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_normal_moments() {
        let n = 100_000;
        let mut rng = SeededRng::new(2024, 0);
        let mean = DVector::zeros(2);
        let cov = DMatrix::identity(2, 2);
        let x = mvn_sample(&mut rng, &mean, &cov, n).unwrap();
        for j in 0..2 {
            let m = x.column(j).sum() / n as f64;
            assert!(m.abs() < 0.02, "mean[{j}] = {m}");
        }
        for a in 0..2 {
            for b in 0..2 {
                let ma = x.column(a).sum() / n as f64;
                let mb = x.column(b).sum() / n as f64;
                let c = (0..n)
                    .map(|i| (x[(i, a)] - ma) * (x[(i, b)] - mb))
                    .sum::<f64>()
                    / (n - 1) as f64;
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((c - target).abs() < 0.03, "cov[{a},{b}] = {c}");
            }
        }
    }

    #[test]
    fn unequal_diagonal_variances() {
        let n = 100_000;
        let mut rng = SeededRng::new(7, 3);
        let mean = DVector::zeros(2);
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![0.8, 1.3]));
        let x = mvn_sample(&mut rng, &mean, &cov, n).unwrap();
        for (j, target) in [(0, 0.8), (1, 1.3)] {
            let m = x.column(j).sum() / n as f64;
            let v = (0..n).map(|i| (x[(i, j)] - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((v - target).abs() < 0.03, "var[{j}] = {v}");
        }
    }

    #[test]
    fn identical_seed_and_stream_is_bit_identical() {
        let mean = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let cov = DMatrix::from_fn(3, 3, |i, j| if i == j { 2.0 } else { 0.3 });
        let a = mvn_sample(&mut SeededRng::new(1, 9), &mean, &cov, 50).unwrap();
        let b = mvn_sample(&mut SeededRng::new(1, 9), &mean, &cov, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn indefinite_covariance_is_rejected() {
        let mean = DVector::zeros(2);
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            mvn_sample(&mut SeededRng::new(0, 0), &mean, &cov, 1),
            Err(Error::NotPositiveDefinite)
        ));
    }
}
