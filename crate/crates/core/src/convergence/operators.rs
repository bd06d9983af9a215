//! Named operator constructors for sufficiency probes.

use nalgebra::DVector;

use super::{minimal_operator, LStar, ParametricGenerator};
use crate::error::Result;
use crate::function_space::PairwiseOperator;
use crate::registry::Registry;
use crate::sampling::{self, SeededRng};

/// Inputs an operator constructor may draw on.
pub struct OperatorCtx<'a> {
    pub gen: &'a dyn ParametricGenerator,
    pub theta: &'a DVector<f64>,
    pub bandwidth: f64,
    pub rng: SeededRng,
}

impl OperatorCtx<'_> {
    pub fn size(&self) -> usize {
        self.gen.space_size()
    }
}

pub type OperatorFactory = fn(&mut OperatorCtx) -> Result<PairwiseOperator>;

fn identity(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    Ok(PairwiseOperator::identity(c.size()))
}

fn zeros(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    Ok(PairwiseOperator::zeros(c.size()))
}

fn constant(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    Ok(PairwiseOperator::constant(c.size(), 1.0))
}

fn rbf(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    let points: Vec<f64> = (0..c.size()).map(|i| i as f64).collect();
    Ok(PairwiseOperator::rbf_kernel(&points, c.bandwidth))
}

/// I − 11ᵀ/k.
fn centering(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    let k = c.size();
    PairwiseOperator::identity(k).try_add(&PairwiseOperator::constant(k, -1.0 / k as f64))
}

fn minimal_grad(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    minimal_operator(c.gen, c.theta, LStar::GradDensity)
}

fn minimal_log_grad(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    minimal_operator(c.gen, c.theta, LStar::GradLogDensity)
}

fn random_pd(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    let k = c.size();
    Ok(sampling::random_pd(&mut c.rng, k, 0.1))
}

fn random_symmetric(c: &mut OperatorCtx) -> Result<PairwiseOperator> {
    let k = c.size();
    Ok(sampling::random_symmetric(&mut c.rng, k))
}

pub fn operators() -> Registry<OperatorFactory> {
    let mut reg = Registry::new("operator");
    let table: [(&'static str, OperatorFactory); 9] = [
        ("identity", identity),
        ("zeros", zeros),
        ("constant", constant),
        ("rbf", rbf),
        ("centering", centering),
        ("minimal-grad", minimal_grad),
        ("minimal-log-grad", minimal_log_grad),
        ("random-pd", random_pd),
        ("random-symmetric", random_symmetric),
    ];
    for (name, f) in table {
        reg.register(name, f).expect("operator names are unique");
    }
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{check_sufficient, SoftmaxGenerator};
    use crate::function_space::DensityVector;

    #[test]
    fn verdicts_by_name() {
        let gen = SoftmaxGenerator::new(4).unwrap();
        let p = DensityVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let theta = gen.parameters_for(&p).unwrap();
        let reg = operators();
        let expected = [
            ("identity", true),
            ("zeros", false),
            ("constant", false),
            ("rbf", true),
            ("centering", true),
            ("minimal-grad", true),
            ("minimal-log-grad", true),
            ("random-pd", true),
        ];
        for (name, sufficient) in expected {
            let mut ctx = OperatorCtx {
                gen: &gen,
                theta: &theta,
                bandwidth: 1.0,
                rng: sampling::rng(0),
            };
            let a = reg.get(name).unwrap()(&mut ctx).unwrap();
            assert_eq!(check_sufficient(&gen, &theta, &a).unwrap().is_sufficient(), sufficient, "{name}");
        }
        assert!(reg.get("nope").is_err());
    }
}
