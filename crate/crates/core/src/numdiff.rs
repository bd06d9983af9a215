//! Central finite differences, used as independent oracles for analytic
//! gradients and Hessians.

use nalgebra::{DMatrix, DVector};

/// ∂f/∂xᵢ ≈ (f(x + h eᵢ) − f(x − h eᵢ)) / 2h.
pub fn central_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let n = x.len();
    let mut g = DVector::zeros(n);
    let mut probe = x.clone();
    for i in 0..n {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

/// Second-order central differences for every entry of the Hessian.
pub fn central_hessian(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    let f0 = f(x);
    let mut probe = x.clone();
    for i in 0..n {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        hess[(i, i)] = (up - 2.0 * f0 + down) / (h * h);
        for j in (i + 1)..n {
            let mut eval = |si: f64, sj: f64| {
                probe[i] = x[i] + si * h;
                probe[j] = x[j] + sj * h;
                let v = f(&probe);
                probe[i] = x[i];
                probe[j] = x[j];
                v
            };
            let pp = eval(1.0, 1.0);
            let pm = eval(1.0, -1.0);
            let mp = eval(-1.0, 1.0);
            let mm = eval(-1.0, -1.0);
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Jacobian of a vector map, column j = ∂F/∂xⱼ.
pub fn central_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    h: f64,
) -> DMatrix<f64> {
    let n = x.len();
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.clone();
    for j in 0..n {
        probe[j] = x[j] + h;
        let up = f(&probe);
        probe[j] = x[j] - h;
        let down = f(&probe);
        probe[j] = x[j];
        jac.set_column(j, &((up - down) / (2.0 * h)));
    }
    jac
}

/// ‖a − b‖_F / max(‖b‖_F, floor).
pub fn relative_error(a: &DMatrix<f64>, b: &DMatrix<f64>, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact_up_to_rounding() {
        // f(x) = x₀² + 3 x₀ x₁ − x₁²
        let f = |x: &DVector<f64>| x[0] * x[0] + 3.0 * x[0] * x[1] - x[1] * x[1];
        let x = DVector::from_vec(vec![0.4, -1.2]);
        let g = central_gradient(f, &x, 1e-5);
        assert!((g[0] - (0.8 - 3.6)).abs() < 1e-8);
        assert!((g[1] - (1.2 + 2.4)).abs() < 1e-8);
        let h = central_hessian(f, &x, 1e-4);
        let expected = DMatrix::from_row_slice(2, 2, &[2.0, 3.0, 3.0, -2.0]);
        assert!(relative_error(&h, &expected, 1e-12) < 1e-6);
    }
}
