//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(f64::NAN)
}

pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).last().copied().unwrap_or(f64::NAN)
}

/// Number of eigenvalues with `|λ| > rel_tol · max|λ|`.
pub fn numerical_rank_sym(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let vals = sym_eigenvalues(m);
    let scale = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    vals.iter().filter(|v| v.abs() > rel_tol * scale).count()
}

/// Returns `(m + mᵀ) / 2`, which is symmetric bit for bit.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)]) / 2.0)
}

/// Splits ℝⁿ into the null space of `j` (k×n) and its orthogonal complement.
///
/// Right singular vectors whose singular value is below `rel_tol · σ_max` are
/// assigned to the null space. The matrix is zero-padded to at least n rows
/// so that the SVD returns a full n×n basis.
pub fn null_space_split(j: &DMatrix<f64>, rel_tol: f64) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let n = j.ncols();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let rows = j.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (j.nrows(), n)).copy_from(j);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
    let mut null = Vec::new();
    let mut range = Vec::new();
    for (idx, s) in svd.singular_values.iter().enumerate() {
        let v: DVector<f64> = v_t.row(idx).transpose();
        if sigma_max == 0.0 || *s <= rel_tol * sigma_max {
            null.push(v);
        } else {
            range.push(v);
        }
    }
    (null, range)
}

/// Stacks column vectors into a matrix with `rows` rows.
pub fn columns_to_matrix(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols.len());
    for (c, v) in cols.iter().enumerate() {
        m.set_column(c, v);
    }
    m
}

/// Whether every column of `a` lies in the column space of `b`, up to a
/// relative residual of `rel_tol` after least-squares projection.
pub fn column_space_contained(a: &DMatrix<f64>, b: &DMatrix<f64>, rel_tol: f64) -> bool {
    let (_, range) = null_space_split(&b.transpose(), 1e-8);
    // `range` spans the row space of bᵀ, i.e. the column space of b.
    let basis = columns_to_matrix(b.nrows(), &range);
    for c in 0..a.ncols() {
        let col = a.column(c).into_owned();
        let norm = col.norm();
        if norm == 0.0 {
            continue;
        }
        let proj = &basis * (basis.transpose() * &col);
        if (&col - proj).norm() > rel_tol * norm {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0]);
        assert_eq!(sym_eigenvalues(&m), vec![-1.0, 2.0]);
    }

    #[test]
    fn null_space_of_row_vector() {
        let j = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let (null, range) = null_space_split(&j, 1e-8);
        assert_eq!(null.len(), 2);
        assert_eq!(range.len(), 1);
        for v in &null {
            assert!((&j * v).norm() < 1e-12);
        }
    }

    #[test]
    fn column_space_inclusion() {
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let inside = DMatrix::from_row_slice(3, 1, &[2.0, -3.0, 0.0]);
        let outside = DMatrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]);
        assert!(column_space_contained(&inside, &b, 1e-9));
        assert!(!column_space_contained(&outside, &b, 1e-9));
    }
}
