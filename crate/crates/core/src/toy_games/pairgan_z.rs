//! Alternating descent on the simplex against a linear-activation operator.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{check_rate, UpdateOrder};
use crate::error::Result;
use crate::function_space::{check_len, project_simplex, DensityVector, PairwiseOperator};
use crate::trajectory::{GameTrajectory, Tabular, TrajectoryMeta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairganZConfig {
    pub alpha: f64,
    pub beta: f64,
    pub steps: usize,
    pub order: UpdateOrder,
    /// Store the full operator at every step.
    pub snapshots: bool,
}

impl Default for PairganZConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            beta: 0.1,
            steps: 2000,
            order: UpdateOrder::GeneratorFirst,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairganZState {
    pub q: Vec<f64>,
    /// ⟨p − q_t, A_t (p − q_t)⟩.
    pub metric: f64,
    /// The metric under the operator used by the generator step that
    /// produced q_t, evaluated before and after that step. Both equal
    /// `metric` at step 0.
    pub metric_before_gen: f64,
    pub metric_after_gen: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    /// Row-major A_t, present only with `snapshots`.
    pub operator: Option<Vec<f64>>,
}

impl Tabular for PairganZState {
    fn columns(&self) -> Vec<String> {
        let k = self.q.len();
        let mut cols: Vec<String> = (1..=k).map(|i| format!("q{i}")).collect();
        cols.extend(
            ["metric", "metric_before_gen", "metric_after_gen", "min_eig", "max_eig"].map(String::from),
        );
        if self.operator.is_some() {
            for i in 1..=k {
                cols.extend((1..=k).map(|j| format!("a{i}_{j}")));
            }
        }
        cols
    }

    fn row(&self) -> Vec<f64> {
        let mut row = self.q.clone();
        row.extend([self.metric, self.metric_before_gen, self.metric_after_gen, self.min_eig, self.max_eig]);
        if let Some(a) = &self.operator {
            row.extend_from_slice(a);
        }
        row
    }
}

fn metric(a: &PairwiseOperator, p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    let d = p - q;
    d.dot(&(a.entries() * &d))
}

fn generator_step(a: &PairwiseOperator, p: &DVector<f64>, q: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    let step = a.entries() * (q - p) * (2.0 * alpha);
    if step.iter().all(|&v| v == 0.0) {
        // Already a density; projecting would only add rounding.
        return Ok(q.clone());
    }
    Ok(project_simplex((q - step).as_slice())?.into_vector())
}

fn snapshot(
    a: &PairwiseOperator,
    p: &DVector<f64>,
    q: &DVector<f64>,
    before: f64,
    after: f64,
    keep: bool,
) -> PairganZState {
    let eig = a.eigenvalues();
    let k = a.size();
    PairganZState {
        q: q.iter().copied().collect(),
        metric: metric(a, p, q),
        metric_before_gen: before,
        metric_after_gen: after,
        min_eig: eig[0],
        max_eig: eig[k - 1],
        operator: keep.then(|| (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| a.get(i, j)).collect()),
    }
}

/// q ← proj_Δ(q − 2α A (q − p)) and A ← A + β (p − q)(p − q)ᵀ, in `cfg.order`.
pub fn pairgan_z_iterate(
    p: &DensityVector,
    q0: &DensityVector,
    a0: &PairwiseOperator,
    cfg: &PairganZConfig,
    seed: Option<u64>,
) -> Result<GameTrajectory<PairganZState>> {
    check_rate("alpha", cfg.alpha)?;
    check_rate("beta", cfg.beta)?;
    check_len(p.len(), q0.len())?;
    check_len(p.len(), a0.size())?;
    let pv = p.vector().clone();
    let mut q = q0.vector().clone();
    let mut a = a0.clone();
    let m0 = metric(&a, &pv, &q);
    let meta = TrajectoryMeta {
        game: "pairgan-z".into(),
        config: serde_json::json!({ "p": p.as_slice(), "q0": q0.as_slice(), "config": cfg }),
        seed,
    };
    let mut traj = GameTrajectory::new(snapshot(&a, &pv, &q, m0, m0, cfg.snapshots), meta);
    for _ in 0..cfg.steps {
        let (before, after);
        match cfg.order {
            UpdateOrder::GeneratorFirst => {
                let next = generator_step(&a, &pv, &q, cfg.alpha)?;
                before = metric(&a, &pv, &q);
                after = metric(&a, &pv, &next);
                a = a.rank_one_update(cfg.beta, &(&pv - &next))?;
                q = next;
            }
            UpdateOrder::DiscriminatorFirst => {
                a = a.rank_one_update(cfg.beta, &(&pv - &q))?;
                let next = generator_step(&a, &pv, &q, cfg.alpha)?;
                before = metric(&a, &pv, &q);
                after = metric(&a, &pv, &next);
                q = next;
            }
            UpdateOrder::Simultaneous => {
                let next = generator_step(&a, &pv, &q, cfg.alpha)?;
                before = metric(&a, &pv, &q);
                after = metric(&a, &pv, &next);
                a = a.rank_one_update(cfg.beta, &(&pv - &q))?;
                q = next;
            }
        }
        traj.push(snapshot(&a, &pv, &q, before, after, cfg.snapshots));
    }
    Ok(traj)
}

/// First recorded step whose operator is positive definite.
pub fn first_positive_definite_step(traj: &GameTrajectory<PairganZState>) -> Option<usize> {
    traj.records.iter().find(|r| r.state.min_eig > 0.0).map(|r| r.step)
}
