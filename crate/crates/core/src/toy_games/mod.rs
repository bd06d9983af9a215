//! Small adversarial games with closed-form gradients.

mod dirac;
mod multi;
mod pairgan_z;

pub use dirac::{
    dirac_games, dirac_pairgan_step, dirac_sgan_step, dirac_step, dirac_vector_field, longest_run_within,
    settled_from, simulate_dirac, DiracGame, DiracPairConfig, DiracPairGan, DiracRecord, DiracSgan, DiracState,
    FieldGrid, FieldSample,
};
pub use multi::{
    multi_games, multi_pairwise_step, multi_step, multi_unary_step, simulate_multi, MultiConfig, MultiDeltaState, MultiDisc,
    MultiGame, MultiGrad, MultiPairwise, MultiRecord, MultiUnary,
};
pub use pairgan_z::{first_positive_definite_step, pairgan_z_iterate, PairganZConfig, PairganZState};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which player moves first within an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateOrder {
    #[default]
    DiscriminatorFirst,
    GeneratorFirst,
    /// Both players read the same pre-step state.
    Simultaneous,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + eᶻ) without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// |x|^γ and its derivative, the latter taken as 0 at x = 0.
pub(crate) fn abs_pow(x: f64, gamma: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let a = x.abs();
    (a.powf(gamma), gamma * a.powf(gamma - 1.0) * x.signum())
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("gamma must be >= 1, got {gamma}")))
    }
}

pub(crate) fn check_rate(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_and_softplus_are_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) == 1.0);
        assert_eq!(softplus(0.0), 2f64.ln());
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0) >= 0.0);
        for &z in &[-3.0, -0.2, 0.7, 4.0] {
            assert!((softplus(z) - (1.0 + f64::exp(z)).ln()).abs() < 1e-14);
            assert!((sigmoid(z) - 1.0 / (1.0 + f64::exp(-z))).abs() < 1e-15);
        }
    }

    #[test]
    fn abs_pow_at_zero() {
        assert_eq!(abs_pow(0.0, 1.0), (0.0, 0.0));
        assert_eq!(abs_pow(-2.0, 2.0), (4.0, -4.0));
        assert_eq!(abs_pow(3.0, 1.0), (3.0, 1.0));
    }
}
