use nalgebra::DMatrix;
use serde::Serialize;

use super::{
    mixtures, optimal_discriminator_pairgan, optimal_discriminator_pairgan_z, pairgan_generator_loss, EpsFloor,
};
use crate::error::Result;
use crate::function_space::{ActivationTriple, DensityVector};

/// A divergence that may be +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DivergenceValue {
    Finite(f64),
    Infinite,
}

impl DivergenceValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }
}

/// The two sides of a divergence identity, computed along separate routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: DivergenceValue,
    pub rhs: DivergenceValue,
}

impl IdentityCheck {
    /// |lhs − rhs|; zero when both sides are infinite.
    pub fn abs_error(&self) -> f64 {
        match (self.lhs, self.rhs) {
            (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => (a - b).abs(),
            (DivergenceValue::Infinite, DivergenceValue::Infinite) => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// KL(a‖b) for joint distributions given as matrices, with 0·log(0/·) = 0.
pub fn kl_divergence(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DivergenceValue {
    let mut total = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        if x == 0.0 {
            continue;
        }
        if y == 0.0 {
            return DivergenceValue::Infinite;
        }
        total += x * (x / y).ln();
    }
    DivergenceValue::Finite(total)
}

/// Σ |a − b|.
pub fn l1_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum()
}

/// sup over events |a(E) − b(E)| = ½ Σ |a − b|.
pub fn total_variation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    0.5 * l1_distance(a, b)
}

/// Generator loss at the optimal PairGAN discriminator against
/// 4·(KL(M⁺‖M) + KL(M‖M⁺)).
///
/// The left side is infinite when D* vanishes on a pair that carries
/// generator-loss weight, which happens exactly when M⁺ = 0 < M.
pub fn sym_kl_identity_check(p: &DensityVector, q: &DensityVector) -> Result<IdentityCheck> {
    let d_star = optimal_discriminator_pairgan(p, q)?;
    let diff = p.diff(q)?;
    let k = diff.len();
    let degenerate = (0..k).any(|x| (0..k).any(|y| d_star.get(x, y) == 0.0 && diff[x] * diff[y] != 0.0));
    let lhs = if degenerate {
        DivergenceValue::Infinite
    } else {
        DivergenceValue::Finite(pairgan_generator_loss(&d_star, p, q, &ActivationTriple::log())?.value)
    };

    let m = mixtures(p, q)?;
    let rhs = match (kl_divergence(&m.plus, &m.mix), kl_divergence(&m.mix, &m.plus)) {
        (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => DivergenceValue::Finite(4.0 * (a + b)),
        _ => DivergenceValue::Infinite,
    };
    Ok(IdentityCheck { lhs, rhs })
}

/// Generator loss at the optimal PairGAN-Z discriminator against
/// −log(ε)·δ(M⁺, M⁻).
///
/// δ is the L1 distance Σ|M⁺ − M⁻| (twice the sup-over-events total
/// variation); with that normalization the two sides agree exactly.
pub fn tv_identity_check(p: &DensityVector, q: &DensityVector, eps: EpsFloor) -> Result<IdentityCheck> {
    let d_star = optimal_discriminator_pairgan_z(p, q, eps)?;
    let lhs = pairgan_generator_loss(&d_star, p, q, &ActivationTriple::log())?.value;
    let m = mixtures(p, q)?;
    let rhs = -eps.value().ln() * l1_distance(&m.plus, &m.minus);
    Ok(IdentityCheck {
        lhs: DivergenceValue::Finite(lhs),
        rhs: DivergenceValue::Finite(rhs),
    })
}
