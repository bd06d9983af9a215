//! Function-space primitives over a finite object set.
//!
//! Densities are vectors in ℝᵏ, expectations under a density are linear
//! forms, and expectations of a pairwise discriminator under a product of
//! densities are bi-linear forms ⟨p, A q⟩ of a symmetric operator A.

mod activation;
mod density;
mod operator;

pub use activation::{unary, ActivationTriple, Domain, ScalarFn, LOG_FLOOR};
pub use density::{ones, DensityVector, FiniteSpace, FnVector};
pub use operator::{Activated, PairwiseOperator, Symmetrized};

pub(crate) use density::check_len;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// ⟨a, b⟩ = Σₓ a(x) b(x).
pub fn inner_product(a: &FnVector, b: &FnVector) -> Result<f64> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x * y).sum())
}

/// ⟨a, A b⟩ = Σₓ Σᵧ a(x) A(x, y) b(y), evaluated as a double sum.
pub fn bilinear_form(a: &FnVector, op: &PairwiseOperator, b: &FnVector) -> Result<f64> {
    check_len(op.size(), a.len())?;
    check_len(op.size(), b.len())?;
    let m = op.entries();
    let mut total = 0.0;
    for x in 0..a.len() {
        for y in 0..b.len() {
            total += a[x] * m[(x, y)] * b[y];
        }
    }
    Ok(total)
}

/// (A q)(x) = Σᵧ A(x, y) q(y).
pub fn apply_operator(op: &PairwiseOperator, q: &FnVector) -> Result<FnVector> {
    check_len(op.size(), q.len())?;
    let m = op.entries();
    let k = q.len();
    Ok(DVector::from_fn(k, |x, _| (0..k).map(|y| m[(x, y)] * q[y]).sum()))
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Result<DensityVector> {
    if v.is_empty() {
        return Err(Error::EmptySpace);
    }
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            threshold = candidate;
        }
    }
    let projected: Vec<f64> = v.iter().map(|x| (x - threshold).max(0.0)).collect();
    DensityVector::new(projected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> FnVector {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(inner_product(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let p = DensityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!((inner_product(p.vector(), &ones(3)).unwrap() - 1.0).abs() < 1e-15);
        // 0.3·2 + 0.7·4
        assert!((inner_product(&v(&[0.3, 0.7]), &v(&[2.0, 4.0])).unwrap() - 3.4).abs() < 1e-15);
        assert!(matches!(
            inner_product(&v(&[1.0]), &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bilinear_form_examples() {
        let p = v(&[0.4, 0.6]);
        let q = v(&[0.9, 0.1]);
        assert_eq!(bilinear_form(&p, &PairwiseOperator::zeros(2), &q).unwrap(), 0.0);
        assert!((bilinear_form(&p, &PairwiseOperator::constant(2, 1.0), &q).unwrap() - 1.0).abs() < 1e-15);
        let c = 2.75;
        let a = PairwiseOperator::from_rows(&[vec![0.0, c], vec![c, 0.0]]).unwrap();
        assert_eq!(bilinear_form(&v(&[1.0, 0.0]), &a, &v(&[0.0, 1.0])).unwrap(), c);
        assert!(bilinear_form(&v(&[1.0]), &a, &q).is_err());
    }

    #[test]
    fn apply_operator_examples() {
        let q = v(&[0.25, 0.75]);
        assert_eq!(apply_operator(&PairwiseOperator::identity(2), &q).unwrap(), q);
        let a = PairwiseOperator::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let out = apply_operator(&a, &v(&[0.5, 0.5])).unwrap();
        assert_eq!(out, v(&[1.5, 2.5]));
        assert!(apply_operator(&a, &v(&[1.0])).is_err());
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_simplex(&[0.2, 0.8]).unwrap().as_slice(), &[0.2, 0.8]);
        assert_eq!(project_simplex(&[1.0, 1.0]).unwrap().as_slice(), &[0.5, 0.5]);
        assert_eq!(project_simplex(&[2.0, 0.0, 0.0]).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert!(project_simplex(&[f64::INFINITY, 0.0]).is_err());
        assert!(project_simplex(&[]).is_err());
    }

    /// Brute-force minimizer of ‖d − v‖² over a grid on the 2-simplex.
    fn grid_projection(v: &[f64; 3], n: usize) -> [f64; 3] {
        let mut best = [0.0; 3];
        let mut best_d = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let d = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
                let dist: f64 = d.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                if dist < best_d {
                    best_d = dist;
                    best = d;
                }
            }
        }
        best
    }

    #[test]
    fn projection_agrees_with_grid_oracle() {
        let n = 400;
        for input in [[2.0, 0.0, 0.0], [0.5, 0.9, -0.3], [-1.0, 0.25, 0.1], [0.3, 0.3, 0.3]] {
            let oracle = grid_projection(&input, n);
            let got = project_simplex(&input).unwrap();
            for (a, b) in got.as_slice().iter().zip(oracle.iter()) {
                assert!((a - b).abs() <= 1.0 / n as f64, "{input:?}: {a} vs {b}");
            }
        }
    }
}
