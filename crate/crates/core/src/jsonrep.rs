//! Helpers shared by the JSON representations of models and scores:
//! matrices travel as row-major `Vec<Vec<f64>>`.

use nalgebra::{DMatrix, DVector};

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("matrix rows have inconsistent lengths".into());
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub(crate) fn vector_to_vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub(crate) fn vec_to_vector(v: &[f64]) -> DVector<f64> {
    DVector::from_row_slice(v)
}

pub(crate) fn all_finite<'a, I: IntoIterator<Item = &'a f64>>(iter: I) -> bool {
    iter.into_iter().all(|v| v.is_finite())
}
