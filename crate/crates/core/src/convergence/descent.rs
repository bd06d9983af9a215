use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{generator_loss, generator_loss_gradient, ParametricGenerator, TangentBasis};
use crate::error::Result;
use crate::function_space::{DensityVector, PairwiseOperator};
use crate::linalg;
use crate::trajectory::{GameTrajectory, Tabular, TrajectoryMeta};

/// |λ| at or above this counts as non-contracting.
const CONTRACTION_SLACK: f64 = 1e-12;

/// Linearized gradient-descent rates around the manifold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateAnalysis {
    /// Ascending eigenvalues μ of the restricted Hessian.
    pub mu: Vec<f64>,
    /// λ = 1 − h·μ, in the order of `mu`.
    pub lambdas: Vec<f64>,
    pub lambda_max_abs: f64,
    /// 2 / μ_max; `None` when no μ is positive.
    pub h_bound: Option<f64>,
    pub non_positive_curvature: bool,
    pub contracting: bool,
}

pub fn gd_rate_analysis(h: &DMatrix<f64>, tangent: &TangentBasis, step: f64) -> RateAnalysis {
    let mu = linalg::sym_eigenvalues(&tangent.restrict(h));
    let lambdas: Vec<f64> = mu.iter().map(|m| 1.0 - step * m).collect();
    let lambda_max_abs = lambdas.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
    let mu_max = mu.last().copied().unwrap_or(0.0);
    let h_bound = (mu_max > 0.0).then(|| 2.0 / mu_max);
    let non_positive_curvature = mu.iter().any(|&m| m <= 0.0);
    RateAnalysis {
        contracting: !non_positive_curvature && lambda_max_abs < 1.0 - CONTRACTION_SLACK,
        mu,
        lambdas,
        lambda_max_abs,
        h_bound,
        non_positive_curvature,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescentOptions {
    /// Stop once ‖q − p‖ falls to this value; 0 runs all steps.
    pub stop_distance: f64,
    /// Growth factor over the starting distance that counts as divergence.
    pub divergence_factor: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            stop_distance: 1e-12,
            divergence_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldState {
    /// ‖q(θ) − p‖.
    pub distance: f64,
    pub loss: f64,
    pub theta: Vec<f64>,
}

impl Tabular for ManifoldState {
    fn columns(&self) -> Vec<String> {
        let mut cols = vec!["distance".to_string(), "loss".to_string()];
        cols.extend((0..self.theta.len()).map(|i| format!("theta_{i}")));
        cols
    }

    fn row(&self) -> Vec<f64> {
        let mut row = vec![self.distance, self.loss];
        row.extend_from_slice(&self.theta);
        row
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldRun {
    pub trajectory: GameTrajectory<ManifoldState>,
    pub initial_distance: f64,
    pub final_distance: f64,
    /// Geometric-decay fit over the tail, see [`tail_ratio`].
    pub tail_ratio: Option<f64>,
    pub diverged: bool,
    pub reached_tolerance: bool,
}

/// Distances below this are roundoff and excluded from rate fits.
const DISTANCE_FLOOR: f64 = 1e-13;

/// Per-step decay ratio from a least-squares fit of log d against step over
/// the last half (at least two) of the entries above the roundoff floor.
pub fn tail_ratio(distances: &[f64]) -> Option<f64> {
    let above: Vec<(f64, f64)> = distances
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > DISTANCE_FLOOR && d.is_finite())
        .map(|(t, &d)| (t as f64, d.ln()))
        .collect();
    let tail = &above[(above.len() / 2).min(above.len().saturating_sub(2))..];
    if tail.len() < 2 {
        // Fell below the floor almost at once: use the mean per-step ratio.
        let (first, last) = (*distances.first()?, *distances.last()?);
        if distances.len() < 2 || first.is_nan() || first <= 0.0 || !last.is_finite() {
            return None;
        }
        return Some((last / first).powf(1.0 / (distances.len() - 1) as f64));
    }
    let n = tail.len() as f64;
    let mt = tail.iter().map(|(t, _)| t).sum::<f64>() / n;
    let my = tail.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = tail.iter().map(|(t, _)| (t - mt) * (t - mt)).sum();
    Some((sxy / sxx).exp())
}

fn state(gen: &dyn ParametricGenerator, theta: &DVector<f64>, p: &DensityVector, a: &PairwiseOperator) -> Result<ManifoldState> {
    let q = gen.density(theta)?;
    Ok(ManifoldState {
        distance: p.diff(&q)?.norm(),
        loss: generator_loss(gen, theta, p, a)?,
        theta: theta.iter().copied().collect(),
    })
}

/// Gradient descent θ ← θ − h ∇_θ ⟨p − q(θ), A (p − q(θ))⟩ with A fixed.
pub fn gd_converge_to_manifold(
    gen: &dyn ParametricGenerator,
    p: &DensityVector,
    a: &PairwiseOperator,
    theta0: &DVector<f64>,
    h: f64,
    max_steps: usize,
    opts: DescentOptions,
) -> Result<ManifoldRun> {
    let first = state(gen, theta0, p, a)?;
    let initial_distance = first.distance;
    let meta = TrajectoryMeta {
        game: "gd-to-manifold".into(),
        config: serde_json::json!({
            "generator": gen.name(),
            "step": h,
            "max_steps": max_steps,
            "stop_distance": opts.stop_distance,
        }),
        seed: None,
    };
    let mut traj = GameTrajectory::new(first, meta);
    let mut theta = theta0.clone();
    let limit = opts.divergence_factor * initial_distance.max(DISTANCE_FLOOR);
    let mut diverged = false;
    let mut reached = initial_distance <= opts.stop_distance;
    while !reached && traj.steps() < max_steps {
        let grad = generator_loss_gradient(gen, &theta, p, a)?;
        theta -= grad * h;
        let s = match state(gen, &theta, p, a) {
            Ok(s) => s,
            Err(_) => {
                diverged = true;
                break;
            }
        };
        let d = s.distance;
        traj.push(s);
        if !d.is_finite() || d > limit {
            diverged = true;
            break;
        }
        reached = d <= opts.stop_distance;
    }
    let distances: Vec<f64> = traj.states().map(|s| s.distance).collect();
    Ok(ManifoldRun {
        final_distance: traj.last().distance,
        tail_ratio: tail_ratio(&distances),
        initial_distance,
        diverged,
        reached_tolerance: reached,
        trajectory: traj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{
        hessian_at_alignment, minimal_operator, tangent_space, LStar, SoftmaxGenerator,
    };
    use crate::sampling;

    #[test]
    fn rate_examples() {
        let t = TangentBasis::trivial(1);
        let r = gd_rate_analysis(&DMatrix::from_element(1, 1, 2.0), &t, 0.25);
        assert_eq!(r.lambdas, vec![0.5]);
        assert_eq!(r.h_bound, Some(1.0));
        assert!(r.contracting);

        let t2 = TangentBasis::trivial(2);
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let r = gd_rate_analysis(&h, &t2, 0.4);
        assert!((r.lambdas[0] - 0.6).abs() < 1e-15 && (r.lambdas[1] + 0.6).abs() < 1e-15);
        assert!((r.lambda_max_abs - 0.6).abs() < 1e-15);

        let r = gd_rate_analysis(&h, &t2, 0.5);
        assert!((r.lambda_max_abs - 1.0).abs() < 1e-15);
        assert!(!r.contracting);

        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 4.0]));
        let r = gd_rate_analysis(&neg, &t2, 0.1);
        assert!(r.non_positive_curvature && !r.contracting);
    }

    #[test]
    fn tail_ratio_of_geometric_sequence() {
        let d: Vec<f64> = (0..40).map(|t| 0.3f64.powi(t) * 2.0).collect();
        let r = tail_ratio(&d).unwrap();
        assert!((r - 0.3).abs() < 1e-9);
        assert_eq!(tail_ratio(&[1.0]), None);
        assert!((tail_ratio(&[1.0, 1e-3]).unwrap() - 1e-3).abs() < 1e-15);
        assert_eq!(tail_ratio(&[1.0, 1e-20, 0.0]), Some(0.0));
    }

    fn setup(seed: u64, k: usize) -> (SoftmaxGenerator, DensityVector, DVector<f64>) {
        let mut rng = sampling::rng(seed);
        let p = sampling::random_density(&mut rng, k, 1.0);
        let gen = SoftmaxGenerator::new(k).unwrap();
        let theta = gen.parameters_for(&p).unwrap();
        (gen, p, theta)
    }

    #[test]
    fn stationary_on_manifold() {
        let (gen, p, theta) = setup(1, 4);
        let a = sampling::random_symmetric(&mut sampling::rng(2), 4);
        let opts = DescentOptions {
            stop_distance: 0.0,
            ..Default::default()
        };
        let run = gd_converge_to_manifold(&gen, &p, &a, &theta, 0.1, 200, opts).unwrap();
        assert_eq!(run.trajectory.steps(), 200);
        assert!(run.trajectory.states().all(|s| s.distance <= 1e-15));
    }

    #[test]
    fn minimal_operator_run_matches_predicted_rate() {
        for (seed, k) in [(3, 3), (4, 5), (5, 2)] {
            let (gen, p, theta_star) = setup(seed, k);
            let a = minimal_operator(&gen, &theta_star, LStar::GradDensity).unwrap();
            let h = hessian_at_alignment(&gen, &theta_star, &p, &a).unwrap();
            let t = tangent_space(&gen, &theta_star).unwrap();
            let mu_max = *linalg::sym_eigenvalues(&t.restrict(&h)).last().unwrap();
            let step = 1.0 / mu_max;
            let rate = gd_rate_analysis(&h, &t, step);
            let mut rng = sampling::rng(seed + 100);
            let theta0 = &theta_star + sampling::random_unit_vector(&mut rng, k) * 0.01;
            let run = gd_converge_to_manifold(&gen, &p, &a, &theta0, step, 2000, DescentOptions::default()).unwrap();
            assert!(run.final_distance <= 1e-8, "{}", run.final_distance);
            assert!(!run.diverged);
            assert!(run.tail_ratio.unwrap() <= rate.lambda_max_abs + 0.05);
        }
    }

    #[test]
    fn indefinite_operator_fails_to_contract() {
        let (gen, p, theta_star) = setup(7, 3);
        let a = PairwiseOperator::identity(3).scaled(-1.0);
        let mut rng = sampling::rng(8);
        let theta0 = &theta_star + sampling::random_unit_vector(&mut rng, 3) * 0.01;
        let run = gd_converge_to_manifold(&gen, &p, &a, &theta0, 5.0, 2000, DescentOptions::default()).unwrap();
        assert!(run.diverged);
        assert!(run.final_distance > run.initial_distance);
    }
}
