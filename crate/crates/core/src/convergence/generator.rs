use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::function_space::DensityVector;
use crate::registry::Registry;

/// A differentiable map θ ↦ q(·; θ) onto the simplex.
pub trait ParametricGenerator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Number of points k of the underlying space.
    fn space_size(&self) -> usize;

    /// Number of parameters n.
    fn param_dim(&self) -> usize;

    fn density(&self, theta: &DVector<f64>) -> Result<DensityVector>;

    /// k×n matrix of ∂q(x)/∂θᵢ.
    fn jacobian(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>>;

    /// Some parameter vector whose density is `p`.
    fn parameters_for(&self, p: &DensityVector) -> Result<DVector<f64>>;

    fn check_theta(&self, theta: &DVector<f64>) -> Result<()> {
        if theta.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

/// q = softmax(θ), θ ∈ ℝᵏ. Shifting θ along (1, …, 1) leaves q unchanged.
#[derive(Debug, Clone, Copy)]
pub struct SoftmaxGenerator {
    k: usize,
}

impl SoftmaxGenerator {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Self { k })
    }

    fn probabilities(&self, theta: &DVector<f64>) -> DVector<f64> {
        let max = theta.max();
        let exps = theta.map(|t| (t - max).exp());
        let sum = exps.sum();
        exps / sum
    }
}

impl ParametricGenerator for SoftmaxGenerator {
    fn name(&self) -> &'static str {
        "softmax"
    }

    fn space_size(&self) -> usize {
        self.k
    }

    fn param_dim(&self) -> usize {
        self.k
    }

    fn density(&self, theta: &DVector<f64>) -> Result<DensityVector> {
        self.check_theta(theta)?;
        DensityVector::from_vector(self.probabilities(theta))
    }

    fn jacobian(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_theta(theta)?;
        let q = self.probabilities(theta);
        let k = self.k;
        Ok(DMatrix::from_fn(k, k, |x, i| {
            let delta = if x == i { 1.0 } else { 0.0 };
            q[x] * (delta - q[i])
        }))
    }

    fn parameters_for(&self, p: &DensityVector) -> Result<DVector<f64>> {
        if p.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: p.len(),
            });
        }
        if let Some(index) = p.as_slice().iter().position(|&v| v <= 0.0) {
            return Err(Error::ZeroDensity { index });
        }
        Ok(p.vector().map(f64::ln))
    }
}

/// θ holds the first k − 1 probabilities; the last is 1 − Σθ.
///
/// The Jacobian is injective, so the reparametrization manifold is a point.
#[derive(Debug, Clone, Copy)]
pub struct FreeSimplexGenerator {
    k: usize,
}

impl FreeSimplexGenerator {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Config("free-simplex generator needs k >= 2".into()));
        }
        Ok(Self { k })
    }
}

impl ParametricGenerator for FreeSimplexGenerator {
    fn name(&self) -> &'static str {
        "free-simplex"
    }

    fn space_size(&self) -> usize {
        self.k
    }

    fn param_dim(&self) -> usize {
        self.k - 1
    }

    fn density(&self, theta: &DVector<f64>) -> Result<DensityVector> {
        self.check_theta(theta)?;
        let last = 1.0 - theta.sum();
        let mut values: Vec<f64> = theta.iter().copied().collect();
        values.push(last);
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameters(format!(
                "probabilities {values:?} leave the simplex"
            )));
        }
        DensityVector::new(values)
    }

    fn jacobian(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_theta(theta)?;
        let n = self.k - 1;
        Ok(DMatrix::from_fn(self.k, n, |x, i| {
            if x == n {
                -1.0
            } else if x == i {
                1.0
            } else {
                0.0
            }
        }))
    }

    fn parameters_for(&self, p: &DensityVector) -> Result<DVector<f64>> {
        if p.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: p.len(),
            });
        }
        Ok(DVector::from_column_slice(&p.as_slice()[..self.k - 1]))
    }
}

pub type GeneratorFactory = fn(usize) -> Result<Box<dyn ParametricGenerator>>;

/// Built-in generators keyed by name.
pub fn generators() -> Registry<GeneratorFactory> {
    let mut reg: Registry<GeneratorFactory> = Registry::new("generator");
    reg.register("softmax", |k| Ok(Box::new(SoftmaxGenerator::new(k)?)))
        .and_then(|r| r.register("free-simplex", |k| Ok(Box::new(FreeSimplexGenerator::new(k)?))))
        .expect("built-in names are unique");
    reg
}
