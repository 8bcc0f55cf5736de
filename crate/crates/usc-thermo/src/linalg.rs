//! Thin wrapper around the dense symmetric eigensolver.
//!
//! Everything downstream needs eigenvalues in ascending order, with the
//! eigenvector columns permuted to match.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigh_values(matrix: &DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = matrix.symmetric_eigenvalues().iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("non-finite eigenvalue"));
    vals
}

/// Full symmetric eigendecomposition, eigenvalues ascending and columns
/// reordered accordingly.
pub fn eigh(matrix: DMatrix<f64>, twice_s: u32) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = matrix.nrows();
    let se = SymmetricEigen::try_new(matrix, f64::EPSILON, 0)
        .ok_or(Error::EigenFailure { twice_s, dim })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("non-finite eigenvalue")
    });
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    Ok((vals, vecs))
}

/// Relative residual `||H v0 - e0 v0|| / ||H||_F` of the ground pair.
pub fn ground_pair_residual(h: &DMatrix<f64>, values: &[f64], vectors: &DMatrix<f64>) -> f64 {
    let v0 = vectors.column(0);
    let r = h * v0 - values[0] * v0;
    r.norm() / h.norm().max(f64::MIN_POSITIVE)
}
