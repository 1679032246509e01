//! Thin numerical layer over `nalgebra` plus small vector helpers.
//!
//! Game state lives in plain `Vec<f64>` / `Vec<Vec<f64>>` throughout the
//! crate; matrices only cross into `nalgebra` here, at the eigenvalue /
//! linear-solve boundary.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

pub fn axpy(y: &[f64], alpha: f64, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(y.len(), x.len());
    y.iter().zip(x).map(|(yi, xi)| yi + alpha * xi).collect()
}

fn to_dmatrix(m: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    DMatrix::from_fn(rows, cols, |i, j| m[i][j])
}

/// Eigenvalues of a general square matrix as `(re, im)` pairs, sorted by
/// real part then imaginary part.
pub fn complex_eigenvalues(m: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let a = to_dmatrix(m);
    let eig = a.complex_eigenvalues();
    let mut out: Vec<(f64, f64)> = eig.iter().map(|c| (c.re, c.im)).collect();
    out.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    out
}

/// Eigenvalues of the symmetric part (M + M^T)/2, ascending.
pub fn symmetrized_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let a = to_dmatrix(m);
    let sym = (&a + a.transpose()) * 0.5;
    let mut vals: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Largest singular value, computed as sqrt(lambda_max(M^T M)).
pub fn spectral_norm(m: &[Vec<f64>]) -> f64 {
    let a = to_dmatrix(m);
    let gram = a.transpose() * &a;
    gram.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.max(0.0)))
        .sqrt()
}

/// Solve `A x = b` by LU with partial pivoting; `None` when A is singular to
/// working precision.
pub fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let mat = to_dmatrix(a);
    let rhs = DVector::from_column_slice(b);
    let lu = mat.lu();
    let x = lu.solve(&rhs)?;
    let sol: Vec<f64> = x.iter().copied().collect();
    if sol.iter().all(|v| v.is_finite()) {
        Some(sol)
    } else {
        None
    }
}

/// Orthonormal basis of the hyperplane `{v : sum v = 0}` in R^d, as d-1 rows.
///
/// Row j (1-indexed) has entries `1/sqrt(j(j+1))` in the first j slots,
/// `-j/sqrt(j(j+1))` in slot j+1, and zero after — the classical Helmert
/// contrasts. Used to restrict Jacobians to simplex tangent spaces.
pub fn helmert_basis(d: usize) -> Vec<Vec<f64>> {
    assert!(d >= 1);
    (1..d)
        .map(|j| {
            let s = 1.0 / ((j * (j + 1)) as f64).sqrt();
            let mut row = vec![0.0; d];
            for slot in row.iter_mut().take(j) {
                *slot = s;
            }
            row[j] = -(j as f64) * s;
            row
        })
        .collect()
}

/// Restrict `m` to the span of `basis` rows: returns `B m B^T` where B stacks
/// the basis rows.
pub fn restrict(m: &[Vec<f64>], basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let a = to_dmatrix(m);
    let b = to_dmatrix(basis);
    let r = &b * a * b.transpose();
    (0..r.nrows())
        .map(|i| (0..r.ncols()).map(|j| r[(i, j)]).collect())
        .collect()
}
