use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::ParametricGenerator;
use crate::error::{Error, Result};
use crate::function_space::{check_len, DensityVector, FnVector, PairwiseOperator};
use crate::linalg;

/// Which feature map defines a minimal operator: g₁ = ∇_θ q or g₂ = ∇_θ log q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LStar {
    GradDensity,
    GradLogDensity,
}

impl LStar {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Self::GradDensity),
            2 => Ok(Self::GradLogDensity),
            other => Err(Error::Config(format!("minimal operator index must be 1 or 2, got {other}"))),
        }
    }
}

/// Feature matrix Γ (k×n) whose rows are g(x).
fn features(gen: &dyn ParametricGenerator, theta: &DVector<f64>, which: LStar) -> Result<DMatrix<f64>> {
    let j = gen.jacobian(theta)?;
    match which {
        LStar::GradDensity => Ok(j),
        LStar::GradLogDensity => {
            let q = gen.density(theta)?;
            if let Some(index) = q.as_slice().iter().position(|&v| v <= 0.0) {
                return Err(Error::ZeroDensity { index });
            }
            let mut scaled = j;
            for (x, &qx) in q.as_slice().iter().enumerate() {
                scaled.row_mut(x).scale_mut(1.0 / qx);
            }
            Ok(scaled)
        }
    }
}

/// A*(x, x') = g(x)ᵀ g(x') for the chosen feature map.
pub fn minimal_operator(
    gen: &dyn ParametricGenerator,
    theta: &DVector<f64>,
    which: LStar,
) -> Result<PairwiseOperator> {
    Ok(PairwiseOperator::gram(&features(gen, theta, which)?))
}

/// (A*₁, A*₂) at θ*. A*₂ needs q(·; θ*) > 0 everywhere.
pub fn minimally_sufficient_operators(
    gen: &dyn ParametricGenerator,
    theta_star: &DVector<f64>,
) -> Result<(PairwiseOperator, PairwiseOperator)> {
    Ok((
        minimal_operator(gen, theta_star, LStar::GradDensity)?,
        minimal_operator(gen, theta_star, LStar::GradLogDensity)?,
    ))
}

/// ‖E_p[g] − E_q[g]‖² with q = q(·; θ).
pub fn l_star_loss(gen: &dyn ParametricGenerator, theta: &DVector<f64>, p: &DensityVector, which: LStar) -> Result<f64> {
    check_len(gen.space_size(), p.len())?;
    let q = gen.density(theta)?;
    if which == LStar::GradLogDensity {
        if let Some(index) = (0..p.len()).find(|&x| q.as_slice()[x] <= 0.0 && p.as_slice()[x] > 0.0) {
            return Err(Error::SupportViolation { index });
        }
    }
    let gamma = features(gen, theta, which)?;
    let mut gap = DVector::zeros(gamma.ncols());
    for x in 0..p.len() {
        let w = p.as_slice()[x] - q.as_slice()[x];
        gap.axpy(w, &gamma.row(x).transpose(), 1.0);
    }
    Ok(gap.norm_squared())
}

/// ½ Σ (q − p)².
pub fn squared_distance_loss(gen: &dyn ParametricGenerator, theta: &DVector<f64>, p: &DensityVector) -> Result<f64> {
    let q = gen.density(theta)?;
    Ok(0.5 * p.diff(&q)?.norm_squared())
}

/// KL(p‖q) = Σ p log(p / q).
pub fn kl_loss(gen: &dyn ParametricGenerator, theta: &DVector<f64>, p: &DensityVector) -> Result<f64> {
    let q = gen.density(theta)?;
    check_len(p.len(), q.len())?;
    let mut total = 0.0;
    for (x, (&px, &qx)) in p.as_slice().iter().zip(q.as_slice()).enumerate() {
        if px == 0.0 {
            continue;
        }
        if qx <= 0.0 {
            return Err(Error::SupportViolation { index: x });
        }
        total += px * (px / qx).ln();
    }
    Ok(total)
}

/// Whether image(a) ⊆ image(b), the containment behind minimality.
pub fn is_minimal_against(a: &PairwiseOperator, b: &PairwiseOperator, rel_tol: f64) -> Result<bool> {
    check_len(a.size(), b.size())?;
    Ok(linalg::column_space_contained(a.entries(), b.entries(), rel_tol))
}

/// Outcome of testing one caller-supplied perturbation ε of p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationCheck {
    /// Zero total mass, non-negative off supp(p), and non-zero.
    pub admissible: bool,
    /// ⟨ε, A ε⟩.
    pub quadratic: f64,
    /// Strictly positive quadratic form, above roundoff.
    pub detected: bool,
}

/// Non-parametric condition: evaluates ⟨ε, A ε⟩ on candidate directions.
pub fn check_perturbations(
    a: &PairwiseOperator,
    p: &DensityVector,
    candidates: &[FnVector],
) -> Result<Vec<PerturbationCheck>> {
    check_len(a.size(), p.len())?;
    let scale = a.entries().amax();
    candidates
        .iter()
        .map(|eps| {
            check_len(p.len(), eps.len())?;
            let l1: f64 = eps.iter().map(|v| v.abs()).sum();
            let zero_sum = eps.sum().abs() <= 1e-12 * l1.max(1.0);
            let cone = (0..p.len()).all(|x| p.as_slice()[x] > 0.0 || eps[x] >= 0.0);
            let quadratic = eps.dot(&(a.entries() * eps));
            Ok(PerturbationCheck {
                admissible: l1 > 0.0 && zero_sum && cone,
                quadratic,
                detected: quadratic > 1e-12 * scale * eps.norm_squared(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{check_sufficient, tangent_space, SoftmaxGenerator};
    use crate::function_space::bilinear_form;
    use crate::numdiff::central_gradient;
    use crate::sampling;

    #[test]
    fn ranks_match_perturbation_dimension() {
        let mut rng = sampling::rng(6);
        for k in 2..9 {
            let p = sampling::random_density(&mut rng, k, 0.1);
            let gen = SoftmaxGenerator::new(k).unwrap();
            let theta = gen.parameters_for(&p).unwrap();
            let (a1, a2) = minimally_sufficient_operators(&gen, &theta).unwrap();
            let w_dim = tangent_space(&gen, &theta).unwrap().complement_dim();
            assert_eq!(w_dim, k - 1);
            assert_eq!(a1.numerical_rank(1e-10), w_dim);
            assert_eq!(a2.numerical_rank(1e-10), w_dim);
            for a in [&a1, &a2] {
                let r = check_sufficient(&gen, &theta, a).unwrap();
                assert!(r.is_sufficient(), "k={k} {r:?}");
                assert_eq!(r.operator_rank, w_dim);
                assert!(a.min_eigenvalue() > -1e-14);
            }
        }
    }

    #[test]
    fn log_operator_needs_positive_density() {
        let gen = crate::convergence::FreeSimplexGenerator::new(3).unwrap();
        let theta = DVector::from_vec(vec![0.5, 0.5]);
        assert!(minimal_operator(&gen, &theta, LStar::GradDensity).is_ok());
        assert!(matches!(
            minimally_sufficient_operators(&gen, &theta),
            Err(Error::ZeroDensity { index: 2 })
        ));
        let p = DensityVector::new(vec![0.2, 0.2, 0.6]).unwrap();
        assert!(matches!(
            l_star_loss(&gen, &theta, &p, LStar::GradLogDensity),
            Err(Error::SupportViolation { index: 2 })
        ));
        assert!(kl_loss(&gen, &theta, &p).is_err());
    }

    #[test]
    fn l_star_vanishes_at_alignment_and_matches_quadratic_form() {
        let mut rng = sampling::rng(31);
        for k in 2..7 {
            let p = sampling::random_density(&mut rng, k, 0.1);
            let gen = SoftmaxGenerator::new(k).unwrap();
            let theta_star = gen.parameters_for(&p).unwrap();
            for which in [LStar::GradDensity, LStar::GradLogDensity] {
                assert!(l_star_loss(&gen, &theta_star, &p, which).unwrap() < 1e-28);
                let theta = &theta_star + sampling::random_normal_vector(&mut rng, k) * 0.5;
                let a = minimal_operator(&gen, &theta, which).unwrap();
                let diff = p.diff(&gen.density(&theta).unwrap()).unwrap();
                let quad = bilinear_form(&diff, &a, &diff).unwrap();
                let l = l_star_loss(&gen, &theta, &p, which).unwrap();
                assert!((l - quad).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn l_star_equals_squared_gradient_norms() {
        let mut rng = sampling::rng(32);
        for k in 2..7 {
            let p = sampling::random_density(&mut rng, k, 0.1);
            let gen = SoftmaxGenerator::new(k).unwrap();
            let theta = sampling::random_normal_vector(&mut rng, k);
            let g_sq = central_gradient(|t| squared_distance_loss(&gen, t, &p).unwrap(), &theta, 1e-5);
            let g_kl = central_gradient(|t| kl_loss(&gen, t, &p).unwrap(), &theta, 1e-5);
            let l1 = l_star_loss(&gen, &theta, &p, LStar::GradDensity).unwrap();
            let l2 = l_star_loss(&gen, &theta, &p, LStar::GradLogDensity).unwrap();
            assert!((l1 - g_sq.norm_squared()).abs() / l1 <= 1e-6);
            assert!((l2 - g_kl.norm_squared()).abs() / l2 <= 1e-6);
        }
    }

    #[test]
    fn minimal_image_contained_in_full_rank_sufficient_operators() {
        let mut rng = sampling::rng(33);
        for k in 2..5 {
            let p = sampling::random_density(&mut rng, k, 0.1);
            let gen = SoftmaxGenerator::new(k).unwrap();
            let theta = gen.parameters_for(&p).unwrap();
            let (a1, a2) = minimally_sufficient_operators(&gen, &theta).unwrap();
            let b = sampling::random_pd(&mut rng, k, 0.1);
            assert!(check_sufficient(&gen, &theta, &b).unwrap().is_sufficient());
            assert!(is_minimal_against(&a1, &b, 1e-8).unwrap());
            assert!(is_minimal_against(&a2, &b, 1e-8).unwrap());
            assert!(b.numerical_rank(1e-10) >= a1.numerical_rank(1e-10));
            assert!(!is_minimal_against(&PairwiseOperator::identity(k), &a1, 1e-8).unwrap());
        }
    }

    #[test]
    fn containment_depends_on_the_image_not_only_the_rank() {
        // The centering projector is sufficient with rank k − 1 and image the
        // zero-sum vectors, which is image(A*₁) but not image(A*₂) = D_q·W.
        let p = DensityVector::new(vec![0.1, 0.3, 0.6]).unwrap();
        let gen = SoftmaxGenerator::new(3).unwrap();
        let theta = gen.parameters_for(&p).unwrap();
        let (a1, a2) = minimally_sufficient_operators(&gen, &theta).unwrap();
        let centering = PairwiseOperator::identity(3)
            .try_add(&PairwiseOperator::constant(3, -1.0 / 3.0))
            .unwrap();
        assert!(check_sufficient(&gen, &theta, &centering).unwrap().is_sufficient());
        assert_eq!(centering.numerical_rank(1e-10), 2);
        assert!(is_minimal_against(&a1, &centering, 1e-8).unwrap());
        assert!(!is_minimal_against(&a2, &centering, 1e-8).unwrap());
    }

    #[test]
    fn perturbation_checker() {
        let p = DensityVector::new(vec![0.5, 0.5, 0.0]).unwrap();
        let a = PairwiseOperator::identity(3);
        let cands = vec![
            DVector::from_vec(vec![0.1, -0.1, 0.0]),
            DVector::from_vec(vec![0.1, -0.2, 0.1]),
            DVector::from_vec(vec![0.1, 0.1, -0.2]),
            DVector::from_vec(vec![0.1, 0.0, 0.0]),
            DVector::zeros(3),
        ];
        let out = check_perturbations(&a, &p, &cands).unwrap();
        let adm: Vec<bool> = out.iter().map(|c| c.admissible).collect();
        assert_eq!(adm, vec![true, true, false, false, false]);
        assert!(out[0].detected && out[1].detected);
        assert!(!out[4].detected);

        let constant = PairwiseOperator::constant(3, 1.0);
        let out = check_perturbations(&constant, &p, &cands[..2]).unwrap();
        assert!(out.iter().all(|c| !c.detected));
    }
}
