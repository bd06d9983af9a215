use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Interval of admissible arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Domain {
    pub const REALS: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_open: true,
        hi_open: true,
    };

    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        if t.is_nan() {
            return false;
        }
        let above = if self.lo_open { t > self.lo } else { t >= self.lo };
        let below = if self.hi_open { t < self.hi } else { t <= self.hi };
        above && below
    }
}

/// A scalar activation with its derivative.
#[derive(Clone)]
pub struct ScalarFn {
    name: String,
    value: RealFn,
    derivative: RealFn,
    domain: Domain,
    safe: Option<(f64, f64)>,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("safe", &self.safe)
            .finish()
    }
}

impl ScalarFn {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            domain: Domain::REALS,
            safe: None,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Arguments are clamped into `[lo, hi]` before evaluation.
    pub fn with_safe_interval(mut self, lo: f64, hi: f64) -> Self {
        self.safe = Some((lo, hi));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.eval_clamped(t).map(|(v, _)| v)
    }

    /// Evaluates at `t`, returning whether the argument had to be clamped.
    pub fn eval_clamped(&self, t: f64) -> Result<(f64, bool)> {
        if !self.domain.contains(t) {
            return Err(Error::Domain {
                name: self.name.clone(),
                value: t,
            });
        }
        let (arg, clamped) = match self.safe {
            Some((lo, _)) if t < lo => (lo, true),
            Some((_, hi)) if t > hi => (hi, true),
            _ => (t, false),
        };
        Ok(((self.value)(arg), clamped))
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }
}

/// Lower clamp for logarithm arguments.
pub const LOG_FLOOR: f64 = 1e-15;

/// The activations (f₁, f₂, g) of a pairwise game.
#[derive(Debug, Clone)]
pub struct ActivationTriple {
    pub f1: ScalarFn,
    pub f2: ScalarFn,
    pub g: ScalarFn,
}

impl ActivationTriple {
    pub fn new(f1: ScalarFn, f2: ScalarFn, g: ScalarFn) -> Self {
        Self { f1, f2, g }
    }

    /// f₁(t) = −log t, f₂(t) = −log(1 − t), g(t) = log t.
    ///
    /// Only the singular side of each logarithm is clamped, so D = 1 is
    /// evaluated exactly by `g`.
    pub fn log() -> Self {
        let f1 = ScalarFn::new("-log(t)", |t| -t.ln(), |t| -1.0 / t)
            .with_domain(Domain::open(0.0, f64::INFINITY))
            .with_safe_interval(LOG_FLOOR, f64::INFINITY);
        let f2 = ScalarFn::new("-log(1-t)", |t| -(1.0 - t).ln(), |t| 1.0 / (1.0 - t))
            .with_domain(Domain::open(f64::NEG_INFINITY, 1.0))
            .with_safe_interval(f64::NEG_INFINITY, 1.0 - LOG_FLOOR);
        let g = ScalarFn::new("log(t)", f64::ln, |t| 1.0 / t)
            .with_domain(Domain::open(0.0, f64::INFINITY))
            .with_safe_interval(LOG_FLOOR, f64::INFINITY);
        Self { f1, f2, g }
    }

    /// f₁(t) = −t, f₂(t) = t, g(t) = t: the operator A^g is D itself.
    pub fn linear() -> Self {
        Self {
            f1: ScalarFn::new("-t", |t| -t, |_| -1.0),
            f2: ScalarFn::new("t", |t| t, |_| 1.0),
            g: ScalarFn::new("t", |t| t, |_| 1.0),
        }
    }
}

/// Generator activation g₂ of a unary GAN.
pub mod unary {
    use super::{Domain, ScalarFn, LOG_FLOOR};

    /// Saturating SGAN: g₂(t) = log(1 − t).
    pub fn sgan_saturating() -> ScalarFn {
        ScalarFn::new("log(1-t)", |t| (1.0 - t).ln(), |t| -1.0 / (1.0 - t))
            .with_domain(Domain::open(f64::NEG_INFINITY, 1.0))
            .with_safe_interval(f64::NEG_INFINITY, 1.0 - LOG_FLOOR)
    }

    /// Non-saturating SGAN: g₂(t) = −log t.
    pub fn sgan_non_saturating() -> ScalarFn {
        ScalarFn::new("-log(t)", |t| -t.ln(), |t| -1.0 / t)
            .with_domain(Domain::open(0.0, f64::INFINITY))
            .with_safe_interval(LOG_FLOOR, f64::INFINITY)
    }

    pub fn zero() -> ScalarFn {
        ScalarFn::new("0", |_| 0.0, |_| 0.0)
    }
}
