//! PairGAN and PairGAN-Z objectives over finite spaces.
//!
//! The discriminator loss is
//! `⟨p, A^{f₁} p⟩ + ⟨q, A^{f₁} q⟩ + ⟨p, A^{f₂} q⟩ + ⟨q, A^{f₂} p⟩` and the
//! generator loss is the quadratic form `⟨p − q, A^g (p − q)⟩`, whose gradient
//! in q vanishes at q = p for every discriminator. The unary-GAN generator
//! gradient is provided as the contrasting baseline.

mod identities;
mod optimal;

pub use identities::{
    kl_divergence, l1_distance, sym_kl_identity_check, total_variation, tv_identity_check,
    DivergenceValue, IdentityCheck,
};
pub use optimal::{mixtures, optimal_discriminator_pairgan, optimal_discriminator_pairgan_z, MixtureTriple};

use crate::error::{Error, Result};
use crate::function_space::{
    apply_operator, bilinear_form, check_len, ActivationTriple, DensityVector, FnVector,
    PairwiseOperator, ScalarFn,
};

/// The ε of the discriminator family 𝒟_[ε,1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsFloor(f64);

impl EpsFloor {
    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps < 1.0 {
            Ok(Self(eps))
        } else {
            Err(Error::InvalidEps(eps))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A loss value together with the number of clamped log arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub value: f64,
    pub clamped: usize,
}

fn check_shapes(d: &PairwiseOperator, p: &DensityVector, q: &DensityVector) -> Result<()> {
    check_len(d.size(), p.len())?;
    check_len(d.size(), q.len())
}

/// PairGAN discriminator loss (to be minimized over D).
pub fn pairgan_discriminator_loss(
    d: &PairwiseOperator,
    p: &DensityVector,
    q: &DensityVector,
    act: &ActivationTriple,
) -> Result<LossValue> {
    check_shapes(d, p, q)?;
    let a1 = d.activate(&act.f1)?;
    let a2 = d.activate(&act.f2)?;
    let (p, q) = (p.vector(), q.vector());
    let value = bilinear_form(p, &a1.operator, p)?
        + bilinear_form(q, &a1.operator, q)?
        + bilinear_form(p, &a2.operator, q)?
        + bilinear_form(q, &a2.operator, p)?;
    Ok(LossValue {
        value,
        clamped: a1.clamped + a2.clamped,
    })
}

/// Generator loss ⟨p − q, A^g (p − q)⟩.
pub fn pairgan_generator_loss(
    d: &PairwiseOperator,
    p: &DensityVector,
    q: &DensityVector,
    act: &ActivationTriple,
) -> Result<LossValue> {
    check_shapes(d, p, q)?;
    let a = d.activate(&act.g)?;
    let diff = p.diff(q)?;
    Ok(LossValue {
        value: bilinear_form(&diff, &a.operator, &diff)?,
        clamped: a.clamped,
    })
}

/// ∇_q ⟨p − q, A^g (p − q)⟩ = −2 A^g (p − q).
pub fn pairwise_generator_gradient(
    d: &PairwiseOperator,
    p: &DensityVector,
    q: &DensityVector,
    act: &ActivationTriple,
) -> Result<FnVector> {
    check_shapes(d, p, q)?;
    let a = d.activate(&act.g)?;
    let diff = p.diff(q)?;
    Ok(apply_operator(&a.operator, &diff)? * -2.0)
}

/// Unary-GAN generator gradient ∇_q L_G = a_D^{g₂}, i.e. g₂(D(x)) per point.
pub fn unary_generator_gradient(d_unary: &[f64], g2: &ScalarFn) -> Result<FnVector> {
    let vals = d_unary
        .iter()
        .map(|&t| g2.eval(t))
        .collect::<Result<Vec<f64>>>()?;
    Ok(FnVector::from_vec(vals))
}

/// Projects a gradient onto the zero-sum directions supported on supp(p).
///
/// The result vanishes iff the gradient is constant on the support, which
/// is the stationarity condition for perturbations that keep q a density.
pub fn project_admissible(grad: &FnVector, p: &DensityVector) -> Result<FnVector> {
    check_len(p.len(), grad.len())?;
    let support: Vec<usize> = (0..p.len()).filter(|&i| p.vector()[i] > 0.0).collect();
    let mean = support.iter().map(|&i| grad[i]).sum::<f64>() / support.len() as f64;
    let mut out = FnVector::zeros(grad.len());
    for &i in &support {
        out[i] = grad[i] - mean;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::unary;
    use crate::numdiff::central_gradient;
    use crate::sampling;
    use nalgebra::DVector;

    fn dens(v: &[f64]) -> DensityVector {
        DensityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn discriminator_loss_at_one_half() {
        let act = ActivationTriple::log();
        let d = PairwiseOperator::constant(3, 0.5);
        let l = pairgan_discriminator_loss(&d, &dens(&[0.2, 0.3, 0.5]), &dens(&[0.6, 0.1, 0.3]), &act)
            .unwrap();
        assert!((l.value - 4.0 * 2f64.ln()).abs() < 1e-14);
        assert_eq!(l.clamped, 0);
    }

    #[test]
    fn discriminator_loss_minimized_by_half_when_aligned() {
        let act = ActivationTriple::log();
        let p = dens(&[0.3, 0.7]);
        let at_half = pairgan_discriminator_loss(&PairwiseOperator::constant(2, 0.5), &p, &p, &act)
            .unwrap()
            .value;
        for i in 1..100 {
            let c = i as f64 / 100.0;
            let l = pairgan_discriminator_loss(&PairwiseOperator::constant(2, c), &p, &p, &act)
                .unwrap()
                .value;
            assert!(at_half <= l + 1e-15);
        }
    }

    #[test]
    fn discriminator_loss_delta_case() {
        let act = ActivationTriple::log();
        let d = PairwiseOperator::from_rows(&[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        let l = pairgan_discriminator_loss(&d, &dens(&[1.0, 0.0]), &dens(&[0.0, 1.0]), &act).unwrap();
        let expected = -2.0 * 0.9f64.ln() - 2.0 * 0.9f64.ln();
        assert!((l.value - expected).abs() < 1e-14);
    }

    #[test]
    fn discriminator_loss_domain_errors() {
        let act = ActivationTriple::log();
        let p = dens(&[0.5, 0.5]);
        for bad in [0.0, 1.0, -0.2, 1.3] {
            let d = PairwiseOperator::constant(2, bad);
            assert!(matches!(
                pairgan_discriminator_loss(&d, &p, &p, &act),
                Err(Error::Domain { .. })
            ));
        }
    }

    #[test]
    fn generator_loss_examples() {
        let act = ActivationTriple::log();
        let p = dens(&[0.2, 0.8]);
        let d = PairwiseOperator::from_rows(&[vec![0.3, 0.6], vec![0.6, 0.9]]).unwrap();
        assert_eq!(pairgan_generator_loss(&d, &p, &p, &act).unwrap().value, 0.0);

        let q = dens(&[0.7, 0.3]);
        let c = PairwiseOperator::constant(2, 0.37);
        assert!(pairgan_generator_loss(&c, &p, &q, &act).unwrap().value.abs() < 1e-15);

        let lin = ActivationTriple::linear();
        let (a, b, c) = (1.5, -0.25, 0.75);
        let g = PairwiseOperator::from_rows(&[vec![a, b], vec![b, c]]).unwrap();
        let l = pairgan_generator_loss(&g, &dens(&[1.0, 0.0]), &dens(&[0.0, 1.0]), &lin).unwrap();
        assert_eq!(l.value, a - 2.0 * b + c);
    }

    #[test]
    fn pairwise_gradient_examples() {
        let lin = ActivationTriple::linear();
        let g = pairwise_generator_gradient(
            &PairwiseOperator::identity(2),
            &dens(&[1.0, 0.0]),
            &dens(&[0.0, 1.0]),
            &lin,
        )
        .unwrap();
        assert_eq!(g, DVector::from_vec(vec![-2.0, 2.0]));

        let mut rng = sampling::rng(5);
        let d = sampling::random_discriminator(&mut rng, 6, 0.01, 0.99);
        let p = sampling::random_density(&mut rng, 6, 0.0);
        let g = pairwise_generator_gradient(&d, &p, &p, &ActivationTriple::log()).unwrap();
        assert!(g.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pairwise_gradient_matches_finite_differences() {
        let act = ActivationTriple::log();
        let mut rng = sampling::rng(17);
        for k in 2..7 {
            let d = sampling::random_discriminator(&mut rng, k, 0.05, 0.95);
            let a = d.activate(&act.g).unwrap().operator;
            let p = sampling::random_density(&mut rng, k, 0.1);
            let q = sampling::random_density(&mut rng, k, 0.1);
            let analytic = pairwise_generator_gradient(&d, &p, &q, &act).unwrap();
            // The loss as a function of an unconstrained q vector.
            let loss = |qv: &DVector<f64>| {
                let diff = p.vector() - qv;
                crate::function_space::bilinear_form(&diff, &a, &diff).unwrap()
            };
            let fd = central_gradient(loss, q.vector(), 1e-5);
            let rel = (&fd - &analytic).norm() / analytic.norm();
            assert!(rel <= 1e-6, "k={k} rel={rel}");
        }
    }

    #[test]
    fn unary_gradient_stationarity() {
        let g2 = unary::sgan_saturating();
        let p = dens(&[0.25, 0.25, 0.5]);
        let constant = unary_generator_gradient(&[0.3, 0.3, 0.3], &g2).unwrap();
        assert_eq!(project_admissible(&constant, &p).unwrap().norm(), 0.0);

        // D(x) = ψ·x on points {0, 1} passed through a sigmoid, ψ ≠ 0
        let psi = 1.5_f64;
        let d: Vec<f64> = [0.0, 1.0].iter().map(|x: &f64| 1.0 / (1.0 + (-psi * x).exp())).collect();
        let grad = unary_generator_gradient(&d, &g2).unwrap();
        let proj = project_admissible(&grad, &dens(&[0.5, 0.5])).unwrap();
        assert!(proj.norm() > 1e-3);

        let zero = unary_generator_gradient(&[0.1, 0.9], &unary::zero()).unwrap();
        assert_eq!(zero, DVector::zeros(2));
    }

    #[test]
    fn admissible_projection_ignores_off_support_points() {
        let p = dens(&[0.5, 0.5, 0.0]);
        let grad = DVector::from_vec(vec![1.0, 1.0, 7.0]);
        assert_eq!(project_admissible(&grad, &p).unwrap().norm(), 0.0);
    }

    #[test]
    fn eps_floor_bounds() {
        assert!(EpsFloor::new(0.0).is_err());
        assert!(EpsFloor::new(1.0).is_err());
        assert_eq!(EpsFloor::new(0.1).unwrap().value(), 0.1);
    }
}
