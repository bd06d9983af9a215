use nalgebra::{DMatrix, DVector};

use super::activation::ScalarFn;
use crate::error::{Error, Result};
use crate::linalg;

/// Symmetric k×k array of reals, viewed as a self-adjoint operator on ℝᵏ.
///
/// Used both for raw discriminator values D(x, y) and for activated operators
/// A_D^f with entries f(D(x, y)).
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseOperator {
    entries: DMatrix<f64>,
}

/// Result of building an operator from possibly asymmetric data.
#[derive(Debug, Clone, PartialEq)]
pub struct Symmetrized {
    pub operator: PairwiseOperator,
    /// Whether averaging with the transpose changed any entry.
    pub changed: bool,
    pub max_asymmetry: f64,
}

/// Activated operator together with the number of clamped entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Activated {
    pub operator: PairwiseOperator,
    pub clamped: usize,
}

impl PairwiseOperator {
    /// Accepts a matrix only if it is square, finite and exactly symmetric.
    pub fn from_symmetric(entries: DMatrix<f64>) -> Result<Self> {
        check_square(&entries)?;
        let n = entries.nrows();
        for i in 0..n {
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        index: i * n + j,
                        value: v,
                    });
                }
                if j > i && v != entries[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        if flat.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                got: flat.len(),
            });
        }
        Self::from_symmetric(DMatrix::from_row_slice(k, k, &flat))
    }

    /// Averages `m` with its transpose and reports whether that mattered.
    pub fn symmetrize(m: DMatrix<f64>) -> Result<Symmetrized> {
        check_square(&m)?;
        let sym = linalg::symmetrize(&m);
        let max_asymmetry = (&m - &sym).amax();
        let changed = sym != m;
        Ok(Symmetrized {
            operator: Self::from_symmetric(sym)?,
            changed,
            max_asymmetry,
        })
    }

    /// Builds the operator of a raw discriminator function, symmetrizing as
    /// (D(x,y) + D(y,x)) / 2.
    pub fn from_fn(k: usize, d: impl Fn(usize, usize) -> f64) -> Result<Symmetrized> {
        Self::symmetrize(DMatrix::from_fn(k, k, d))
    }

    pub fn identity(k: usize) -> Self {
        Self {
            entries: DMatrix::identity(k, k),
        }
    }

    pub fn zeros(k: usize) -> Self {
        Self {
            entries: DMatrix::zeros(k, k),
        }
    }

    pub fn constant(k: usize, c: f64) -> Self {
        Self {
            entries: DMatrix::from_element(k, k, c),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(values)),
        }
    }

    /// Gaussian kernel exp(−(x − y)² / bandwidth²) on points of the real line.
    pub fn rbf_kernel(points: &[f64], bandwidth: f64) -> Self {
        let k = points.len();
        let entries = DMatrix::from_fn(k, k, |i, j| {
            let d = points[i] - points[j];
            (-(d * d) / (bandwidth * bandwidth)).exp()
        });
        Self { entries }
    }

    /// The outer product v vᵀ.
    pub fn outer(v: &DVector<f64>) -> Self {
        let k = v.len();
        Self {
            entries: DMatrix::from_fn(k, k, |i, j| v[i] * v[j]),
        }
    }

    /// Gram operator Γ Γᵀ of a k×n matrix, symmetric bit for bit.
    pub fn gram(gamma: &DMatrix<f64>) -> Self {
        let m = gamma * gamma.transpose();
        Self {
            entries: linalg::symmetrize(&m),
        }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Applies `f` entrywise; symmetry is preserved.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            entries: self.entries.map(f),
        }
    }

    /// Builds A_D^f by applying `f` to every entry of this discriminator.
    pub fn activate(&self, f: &ScalarFn) -> Result<Activated> {
        let k = self.size();
        let mut clamped = 0;
        let mut out = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let (v, was_clamped) = f.eval_clamped(self.entries[(i, j)])?;
                if was_clamped {
                    clamped += if i == j { 1 } else { 2 };
                }
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Ok(Activated {
            operator: Self { entries: out },
            clamped,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: &self.entries * c,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        super::density::check_len(self.size(), other.size())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    /// A + β v vᵀ.
    pub fn rank_one_update(&self, beta: f64, v: &DVector<f64>) -> Result<Self> {
        super::density::check_len(self.size(), v.len())?;
        let k = self.size();
        let entries = DMatrix::from_fn(k, k, |i, j| self.entries[(i, j)] + beta * (v[i] * v[j]));
        Ok(Self { entries })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::sym_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.entries)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        linalg::max_eigenvalue(&self.entries)
    }

    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        linalg::numerical_rank_sym(&self.entries, rel_tol)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptySpace);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::activation::ActivationTriple;

    #[test]
    fn asymmetric_matrix_rejected_then_symmetrized() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 3.0, 0.0]);
        assert!(matches!(
            PairwiseOperator::from_symmetric(m.clone()),
            Err(Error::NotSymmetric { row: 0, col: 1 })
        ));
        let s = PairwiseOperator::symmetrize(m).unwrap();
        assert!(s.changed);
        assert_eq!(s.max_asymmetry, 1.0);
        assert_eq!(s.operator.get(0, 1), 2.0);
        assert_eq!(s.operator.get(1, 0), 2.0);
    }

    #[test]
    fn symmetric_function_is_not_flagged() {
        let s = PairwiseOperator::from_fn(3, |i, j| (i as f64 - j as f64).abs()).unwrap();
        assert!(!s.changed);
    }

    #[test]
    fn activation_rejects_out_of_domain() {
        let d = PairwiseOperator::constant(2, 0.0);
        let act = ActivationTriple::log();
        assert!(matches!(d.activate(&act.g), Err(Error::Domain { .. })));
    }

    #[test]
    fn activation_counts_clamps() {
        let d = PairwiseOperator::from_rows(&[vec![0.5, 1e-20], vec![1e-20, 0.5]]).unwrap();
        let act = ActivationTriple::log();
        let a = d.activate(&act.g).unwrap();
        assert_eq!(a.clamped, 2);
        assert_eq!(a.operator.get(0, 1), 1e-15_f64.ln());
    }

    #[test]
    fn rank_one_update_stays_symmetric() {
        let a = PairwiseOperator::identity(3);
        let v = DVector::from_vec(vec![0.1, -0.7, 0.3]);
        let b = a.rank_one_update(0.37, &v).unwrap();
        assert!(PairwiseOperator::from_symmetric(b.entries().clone()).is_ok());
    }
}
