use nalgebra::DMatrix;

use super::EpsFloor;
use crate::error::Result;
use crate::function_space::{check_len, DensityVector, PairwiseOperator};

/// Joint mixtures over 𝒳×𝒳.
///
/// `plus` = ½(p⊗p + q⊗q) holds same-distribution pairs, `minus` =
/// ½(p⊗q + q⊗p) holds cross pairs, and `mix` is their average.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureTriple {
    pub plus: DMatrix<f64>,
    pub minus: DMatrix<f64>,
    pub mix: DMatrix<f64>,
}

pub fn mixtures(p: &DensityVector, q: &DensityVector) -> Result<MixtureTriple> {
    check_len(p.len(), q.len())?;
    let (p, q) = (p.as_slice(), q.as_slice());
    let k = p.len();
    let plus = DMatrix::from_fn(k, k, |x, y| 0.5 * (p[x] * p[y] + q[x] * q[y]));
    let minus = DMatrix::from_fn(k, k, |x, y| 0.5 * (p[x] * q[y] + q[x] * p[y]));
    let mix = DMatrix::from_fn(k, k, |x, y| 0.5 * (plus[(x, y)] + minus[(x, y)]));
    Ok(MixtureTriple { plus, minus, mix })
}

/// D*(x, y) = M⁺(x, y) / (2 M(x, y)), minimizer of the PairGAN
/// discriminator loss for the log activations. Pairs with M = 0 carry no
/// mass in any loss term and get D* = ½.
pub fn optimal_discriminator_pairgan(p: &DensityVector, q: &DensityVector) -> Result<PairwiseOperator> {
    let m = mixtures(p, q)?;
    let k = p.len();
    let d = DMatrix::from_fn(k, k, |x, y| {
        let denom = 2.0 * m.mix[(x, y)];
        if denom == 0.0 {
            0.5
        } else {
            m.plus[(x, y)] / denom
        }
    });
    PairwiseOperator::from_symmetric(d)
}

/// Maximizer of the generator loss over 𝒟_[ε,1]: 1 where
/// F(x, y) = (p(x) − q(x))(p(y) − q(y)) ≥ 0 and ε elsewhere.
pub fn optimal_discriminator_pairgan_z(
    p: &DensityVector,
    q: &DensityVector,
    eps: EpsFloor,
) -> Result<PairwiseOperator> {
    let diff = p.diff(q)?;
    let k = diff.len();
    let d = DMatrix::from_fn(k, k, |x, y| {
        if diff[x] * diff[y] >= 0.0 {
            1.0
        } else {
            eps.value()
        }
    });
    PairwiseOperator::from_symmetric(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::ActivationTriple;
    use crate::objectives::{pairgan_discriminator_loss, pairgan_generator_loss};
    use crate::sampling;
    use rand::Rng;

    fn dens(v: &[f64]) -> DensityVector {
        DensityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mixtures_of_equal_densities_coincide() {
        let p = dens(&[0.1, 0.6, 0.3]);
        let m = mixtures(&p, &p).unwrap();
        let outer = DMatrix::from_fn(3, 3, |x, y| p.as_slice()[x] * p.as_slice()[y]);
        assert_eq!(m.plus, outer);
        assert_eq!(m.minus, outer);
        assert_eq!(m.mix, outer);
    }

    #[test]
    fn mixtures_delta_case() {
        let m = mixtures(&dens(&[1.0, 0.0]), &dens(&[0.0, 1.0])).unwrap();
        assert_eq!(m.plus, DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]));
        assert_eq!(m.minus, DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
    }

    #[test]
    fn mixtures_are_normalized_and_symmetric() {
        let mut rng = sampling::rng(2);
        for k in 1..8 {
            let p = sampling::random_density(&mut rng, k, 0.0);
            let q = sampling::random_density(&mut rng, k, 0.0);
            let m = mixtures(&p, &q).unwrap();
            for mat in [&m.plus, &m.minus, &m.mix] {
                assert!((mat.sum() - 1.0).abs() < 1e-12);
                assert_eq!(mat, &mat.transpose());
            }
            let avg = (&m.plus + &m.minus) * 0.5;
            assert!((&m.mix - avg).amax() <= 1e-12);
        }
    }

    #[test]
    fn optimal_pairgan_examples() {
        let p = dens(&[0.3, 0.7]);
        let d = optimal_discriminator_pairgan(&p, &p).unwrap();
        assert_eq!(d, PairwiseOperator::constant(2, 0.5));

        let d = optimal_discriminator_pairgan(&dens(&[1.0, 0.0]), &dens(&[0.0, 1.0])).unwrap();
        assert_eq!(d.entries(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn optimal_pairgan_zero_mass_convention() {
        let p = dens(&[0.5, 0.5, 0.0]);
        let q = dens(&[0.2, 0.8, 0.0]);
        let d = optimal_discriminator_pairgan(&p, &q).unwrap();
        assert_eq!(d.get(2, 2), 0.5);
        assert_eq!(d.get(0, 2), 0.5);
    }

    #[test]
    fn optimal_pairgan_beats_perturbations() {
        let act = ActivationTriple::log();
        let mut rng = sampling::rng(9);
        for _ in 0..10 {
            let k = rng.random_range(2..6);
            let p = sampling::random_density(&mut rng, k, 0.1);
            let q = sampling::random_density(&mut rng, k, 0.1);
            let d_star = optimal_discriminator_pairgan(&p, &q).unwrap();
            let best = pairgan_discriminator_loss(&d_star, &p, &q, &act).unwrap().value;
            for _ in 0..100 {
                let noise = sampling::random_symmetric(&mut rng, k);
                let d = d_star.try_add(&noise.scaled(0.05)).unwrap().map(|v| v.clamp(1e-6, 1.0 - 1e-6));
                let l = pairgan_discriminator_loss(&d, &p, &q, &act).unwrap().value;
                assert!(best <= l + 1e-12);
            }
        }
    }

    #[test]
    fn optimal_pairgan_z_examples() {
        let eps = EpsFloor::new(0.1).unwrap();
        let p = dens(&[0.3, 0.7]);
        assert_eq!(optimal_discriminator_pairgan_z(&p, &p, eps).unwrap(), PairwiseOperator::constant(2, 1.0));
        let d = optimal_discriminator_pairgan_z(&dens(&[1.0, 0.0]), &dens(&[0.0, 1.0]), eps).unwrap();
        assert_eq!(d.entries(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 1.0]));
    }

    /// Every symmetric {ε, 1}-valued discriminator on k points.
    fn all_binary_discriminators(k: usize, eps: f64) -> Vec<PairwiseOperator> {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
        (0..(1u32 << pairs.len()))
            .map(|mask| {
                let mut m = DMatrix::zeros(k, k);
                for (bit, &(i, j)) in pairs.iter().enumerate() {
                    let v = if mask & (1 << bit) != 0 { 1.0 } else { eps };
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
                PairwiseOperator::from_symmetric(m).unwrap()
            })
            .collect()
    }

    #[test]
    fn optimal_pairgan_z_beats_exhaustive_enumeration() {
        let act = ActivationTriple::log();
        let mut rng = sampling::rng(4);
        for k in 2..=3 {
            for &e in &[0.5, 0.1, 0.01] {
                let eps = EpsFloor::new(e).unwrap();
                for _ in 0..5 {
                    let p = sampling::random_density(&mut rng, k, 0.0);
                    let q = sampling::random_density(&mut rng, k, 0.0);
                    let d_star = optimal_discriminator_pairgan_z(&p, &q, eps).unwrap();
                    let best = pairgan_generator_loss(&d_star, &p, &q, &act).unwrap().value;
                    for d in all_binary_discriminators(k, e) {
                        let l = pairgan_generator_loss(&d, &p, &q, &act).unwrap().value;
                        assert!(best >= l - 1e-14);
                    }
                }
            }
        }
    }
}
