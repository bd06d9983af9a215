//! Local convergence of the generator near the reparametrization manifold.
//!
//! Everything here works in parameter coordinates θ ∈ ℝⁿ of a
//! [`ParametricGenerator`]. The generator loss is
//! `⟨p − q(θ), G (p − q(θ))⟩` for a fixed symmetric operator G.

mod descent;
mod generator;
mod minimal;
mod operators;

pub use descent::{
    gd_converge_to_manifold, gd_rate_analysis, tail_ratio, DescentOptions, ManifoldRun, ManifoldState,
    RateAnalysis,
};
pub use generator::{generators, FreeSimplexGenerator, GeneratorFactory, ParametricGenerator, SoftmaxGenerator};
pub use minimal::{
    check_perturbations, is_minimal_against, kl_loss, l_star_loss, minimal_operator, minimally_sufficient_operators,
    squared_distance_loss, LStar, PerturbationCheck,
};
pub use operators::{operators, OperatorCtx, OperatorFactory};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function_space::{check_len, DensityVector, PairwiseOperator};
use crate::linalg;

/// Largest ‖q(θ*) − p‖ accepted as alignment.
pub const ALIGNMENT_TOLERANCE: f64 = 1e-10;
/// Relative singular-value cutoff separating tangent from complement.
pub const NULL_SPACE_TOLERANCE: f64 = 1e-8;
/// Relative eigenvalue cutoff for operator ranks.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// ⟨p − q(θ), G (p − q(θ))⟩.
pub fn generator_loss(
    gen: &dyn ParametricGenerator,
    theta: &DVector<f64>,
    p: &DensityVector,
    g: &PairwiseOperator,
) -> Result<f64> {
    check_len(g.size(), gen.space_size())?;
    let diff = p.diff(&gen.density(theta)?)?;
    Ok(diff.dot(&(g.entries() * &diff)))
}

/// ∇_θ of [`generator_loss`]: −2 Jᵀ G (p − q).
pub fn generator_loss_gradient(
    gen: &dyn ParametricGenerator,
    theta: &DVector<f64>,
    p: &DensityVector,
    g: &PairwiseOperator,
) -> Result<DVector<f64>> {
    check_len(g.size(), gen.space_size())?;
    let diff = p.diff(&gen.density(theta)?)?;
    let j = gen.jacobian(theta)?;
    Ok(j.transpose() * (g.entries() * diff) * -2.0)
}

/// H = 2 Jᵀ G J, the generator-loss Hessian at an aligned θ*.
///
/// Terms carrying second derivatives of q are multiplied by p − q and vanish
/// only at alignment, so a non-aligned θ* is rejected.
pub fn hessian_at_alignment(
    gen: &dyn ParametricGenerator,
    theta_star: &DVector<f64>,
    p: &DensityVector,
    g_of_d: &PairwiseOperator,
) -> Result<DMatrix<f64>> {
    check_len(g_of_d.size(), gen.space_size())?;
    let distance = p.diff(&gen.density(theta_star)?)?.norm();
    if distance > ALIGNMENT_TOLERANCE {
        return Err(Error::NotAligned { distance });
    }
    let j = gen.jacobian(theta_star)?;
    let h = j.transpose() * g_of_d.entries() * &j * 2.0;
    Ok(linalg::symmetrize(&h))
}

/// Orthonormal split of parameter space at θ*.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBasis {
    /// Directions with no first-order effect on q.
    pub vectors: Vec<DVector<f64>>,
    /// Orthogonal complement of `vectors`.
    pub complement: Vec<DVector<f64>>,
}

impl TangentBasis {
    /// Every direction moves q: empty tangent, complement = standard basis.
    pub fn trivial(n: usize) -> Self {
        Self {
            vectors: Vec::new(),
            complement: (0..n).map(|i| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })).collect(),
        }
    }

    pub fn param_dim(&self) -> usize {
        self.vectors.len() + self.complement.len()
    }

    pub fn tangent_dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn complement_dim(&self) -> usize {
        self.complement.len()
    }

    /// n×m matrix with the complement vectors as columns.
    pub fn complement_matrix(&self) -> DMatrix<f64> {
        linalg::columns_to_matrix(self.param_dim(), &self.complement)
    }

    /// Cᵀ H C for the complement basis C.
    pub fn restrict(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        let c = self.complement_matrix();
        linalg::symmetrize(&(c.transpose() * h * &c))
    }
}

/// Null space of the Jacobian at θ* and its complement.
pub fn tangent_space(gen: &dyn ParametricGenerator, theta_star: &DVector<f64>) -> Result<TangentBasis> {
    let j = gen.jacobian(theta_star)?;
    let (vectors, complement) = linalg::null_space_split(&j, NULL_SPACE_TOLERANCE);
    Ok(TangentBasis { vectors, complement })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Sufficient,
    Insufficient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyReport {
    /// Ascending eigenvalues of the Hessian restricted to the complement.
    pub restricted_spectrum: Vec<f64>,
    /// Smallest restricted eigenvalue; `None` when the complement is empty.
    pub min_margin: Option<f64>,
    pub pd_tolerance: f64,
    pub operator_rank: usize,
    pub tangent_dim: usize,
    pub complement_dim: usize,
    pub verdict: Verdict,
}

impl SufficiencyReport {
    pub fn is_sufficient(&self) -> bool {
        self.verdict == Verdict::Sufficient
    }
}

/// Checks positive definiteness of the Hessian for operator `a` on the
/// directions that move q, at the target p = q(θ*).
pub fn check_sufficient(
    gen: &dyn ParametricGenerator,
    theta_star: &DVector<f64>,
    a: &PairwiseOperator,
) -> Result<SufficiencyReport> {
    let p = gen.density(theta_star)?;
    let h = hessian_at_alignment(gen, theta_star, &p, a)?;
    let tangent = tangent_space(gen, theta_star)?;
    let restricted = tangent.restrict(&h);
    let restricted_spectrum = linalg::sym_eigenvalues(&restricted);
    let n = h.nrows().max(1) as f64;
    // Roundoff floor: a Hessian of scale 2‖J‖²‖A‖ can come out with tiny
    // positive noise where it should vanish exactly.
    let j_norm = gen.jacobian(theta_star)?.norm();
    let a_norm = a.entries().norm();
    let pd_tolerance = (1e-10 * h.trace().abs() / n).max(1e-12 * 2.0 * j_norm * j_norm * a_norm);
    let min_margin = restricted_spectrum.first().copied();
    let verdict = match min_margin {
        Some(m) if m <= pd_tolerance => Verdict::Insufficient,
        _ => Verdict::Sufficient,
    };
    Ok(SufficiencyReport {
        restricted_spectrum,
        min_margin,
        pd_tolerance,
        operator_rank: a.numerical_rank(RANK_TOLERANCE),
        tangent_dim: tangent.tangent_dim(),
        complement_dim: tangent.complement_dim(),
        verdict,
    })
}
