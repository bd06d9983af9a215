//! N point masses on the line aligned against a shared discriminator.

use serde::{Deserialize, Serialize};

use super::{abs_pow, check_gamma, check_rate, sigmoid, softplus, UpdateOrder};
use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::trajectory::{GameTrajectory, Tabular, TrajectoryMeta};

/// Discriminator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiDisc {
    /// (a_i, b_i, c_i) per class, logits s_i(x) = a_i x² + b_i x + c_i.
    Unary(Vec<f64>),
    /// ψ of D(x, y) = ψ·|x − y|^γ.
    Pairwise(f64),
}

impl MultiDisc {
    pub fn params(&self) -> Vec<f64> {
        match self {
            Self::Unary(v) => v.clone(),
            Self::Pairwise(psi) => vec![*psi],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiDeltaState {
    pub points: Vec<f64>,
    pub disc: MultiDisc,
}

impl MultiDeltaState {
    pub fn new(points: Vec<f64>, disc: MultiDisc) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::FamilyTooSmall(points.len()));
        }
        if let MultiDisc::Unary(params) = &disc {
            if params.len() != 3 * points.len() {
                return Err(Error::DimensionMismatch {
                    expected: 3 * points.len(),
                    got: params.len(),
                });
            }
        }
        let all = points.iter().chain(disc.params().iter()).copied().collect::<Vec<_>>();
        if let Some(index) = all.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                value: all[index],
            });
        }
        Ok(Self { points, disc })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiConfig {
    pub gamma: f64,
    pub lr_gen: f64,
    pub lr_disc: f64,
    pub steps: usize,
    pub order: UpdateOrder,
}

impl Default for MultiConfig {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            lr_gen: 0.1,
            lr_disc: 0.1,
            steps: 2000,
            order: UpdateOrder::DiscriminatorFirst,
        }
    }
}

impl MultiConfig {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_rate("lr_gen", self.lr_gen)?;
        check_rate("lr_disc", self.lr_disc)
    }
}

/// Gradients of the game value with respect to points and discriminator.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGrad {
    pub points: Vec<f64>,
    pub disc: Vec<f64>,
}

pub trait MultiGame: Send + Sync {
    fn name(&self) -> &'static str;

    /// Game value; the discriminator ascends it and the points descend it.
    fn loss(&self, s: &MultiDeltaState, gamma: f64) -> Result<f64>;

    fn gradients(&self, s: &MultiDeltaState, gamma: f64) -> Result<MultiGrad>;
}

/// N-class softmax over quadratic logits; value Σᵢ log P(t = i | xᵢ).
#[derive(Debug, Clone, Copy, Default)]
pub struct MultiUnary;

fn unary_params(s: &MultiDeltaState) -> Result<&[f64]> {
    match &s.disc {
        MultiDisc::Unary(p) => Ok(p),
        MultiDisc::Pairwise(_) => Err(Error::Config("unary game needs unary discriminator parameters".into())),
    }
}

fn logits(params: &[f64], x: f64) -> Vec<f64> {
    params.chunks_exact(3).map(|c| c[0] * x * x + c[1] * x + c[2]).collect()
}

fn softmax(s: &[f64]) -> Vec<f64> {
    let m = s.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    let e: Vec<f64> = s.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}

fn log_sum_exp(s: &[f64]) -> f64 {
    let m = s.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    m + s.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

impl MultiGame for MultiUnary {
    fn name(&self) -> &'static str {
        "unary"
    }

    fn loss(&self, s: &MultiDeltaState, _gamma: f64) -> Result<f64> {
        let params = unary_params(s)?;
        Ok(s.points
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let l = logits(params, x);
                l[i] - log_sum_exp(&l)
            })
            .sum())
    }

    fn gradients(&self, s: &MultiDeltaState, _gamma: f64) -> Result<MultiGrad> {
        let params = unary_params(s)?;
        let n = s.points.len();
        let mut disc = vec![0.0; 3 * n];
        let mut points = vec![0.0; n];
        for (i, &x) in s.points.iter().enumerate() {
            let probs = softmax(&logits(params, x));
            let phi = [x * x, x, 1.0];
            let slope = |j: usize| 2.0 * params[3 * j] * x + params[3 * j + 1];
            let mut expected_slope = 0.0;
            for (j, &pj) in probs.iter().enumerate() {
                let w = if i == j { 1.0 - pj } else { -pj };
                for (d, f) in phi.iter().enumerate() {
                    disc[3 * j + d] += w * f;
                }
                expected_slope += pj * slope(j);
            }
            points[i] = slope(i) - expected_slope;
        }
        Ok(MultiGrad { points, disc })
    }
}

/// Pairwise discriminator; value −Σ_{i≠j} log(1 + exp(ψ·|xᵢ − xⱼ|^γ)).
#[derive(Debug, Clone, Copy, Default)]
pub struct MultiPairwise;

fn pair_psi(s: &MultiDeltaState) -> Result<f64> {
    match s.disc {
        MultiDisc::Pairwise(psi) => Ok(psi),
        MultiDisc::Unary(_) => Err(Error::Config("pairwise game needs a scalar psi".into())),
    }
}

impl MultiGame for MultiPairwise {
    fn name(&self) -> &'static str {
        "pairwise"
    }

    fn loss(&self, s: &MultiDeltaState, gamma: f64) -> Result<f64> {
        let psi = pair_psi(s)?;
        let mut total = 0.0;
        for (i, &xi) in s.points.iter().enumerate() {
            for (j, &xj) in s.points.iter().enumerate() {
                if i != j {
                    total -= softplus(psi * abs_pow(xi - xj, gamma).0);
                }
            }
        }
        Ok(total)
    }

    fn gradients(&self, s: &MultiDeltaState, gamma: f64) -> Result<MultiGrad> {
        let psi = pair_psi(s)?;
        let n = s.points.len();
        let mut points = vec![0.0; n];
        let mut dpsi = 0.0;
        for (i, gi) in points.iter_mut().enumerate() {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (r, dr) = abs_pow(s.points[i] - s.points[j], gamma);
                let sig = sigmoid(psi * r);
                dpsi -= sig * r;
                // Ordered pairs (i, j) and (j, i) contribute equally.
                *gi -= 2.0 * sig * psi * dr;
            }
        }
        Ok(MultiGrad {
            points,
            disc: vec![dpsi],
        })
    }
}

pub fn multi_games() -> Registry<Box<dyn MultiGame>> {
    let mut reg: Registry<Box<dyn MultiGame>> = Registry::new("multi game");
    reg.register("unary", Box::new(MultiUnary))
        .and_then(|r| r.register("pairwise", Box::new(MultiPairwise)))
        .expect("built-in names are unique");
    reg
}

fn ascend_disc(disc: &MultiDisc, grad: &[f64], lr: f64) -> MultiDisc {
    match disc {
        MultiDisc::Unary(p) => MultiDisc::Unary(p.iter().zip(grad).map(|(v, g)| v + lr * g).collect()),
        MultiDisc::Pairwise(psi) => MultiDisc::Pairwise(psi + lr * grad[0]),
    }
}

fn descend_points(points: &[f64], grad: &[f64], lr: f64) -> Vec<f64> {
    points.iter().zip(grad).map(|(x, g)| x - lr * g).collect()
}

pub fn multi_step(game: &dyn MultiGame, s: &MultiDeltaState, cfg: &MultiConfig) -> Result<MultiDeltaState> {
    let g = cfg.gamma;
    Ok(match cfg.order {
        UpdateOrder::DiscriminatorFirst => {
            let disc = ascend_disc(&s.disc, &game.gradients(s, g)?.disc, cfg.lr_disc);
            let mid = MultiDeltaState {
                points: s.points.clone(),
                disc,
            };
            let points = descend_points(&s.points, &game.gradients(&mid, g)?.points, cfg.lr_gen);
            MultiDeltaState { points, disc: mid.disc }
        }
        UpdateOrder::GeneratorFirst => {
            let points = descend_points(&s.points, &game.gradients(s, g)?.points, cfg.lr_gen);
            let mid = MultiDeltaState {
                points,
                disc: s.disc.clone(),
            };
            let disc = ascend_disc(&s.disc, &game.gradients(&mid, g)?.disc, cfg.lr_disc);
            MultiDeltaState { points: mid.points, disc }
        }
        UpdateOrder::Simultaneous => {
            let grad = game.gradients(s, g)?;
            MultiDeltaState {
                points: descend_points(&s.points, &grad.points, cfg.lr_gen),
                disc: ascend_disc(&s.disc, &grad.disc, cfg.lr_disc),
            }
        }
    })
}

pub fn multi_unary_step(s: &MultiDeltaState, lr: f64) -> Result<MultiDeltaState> {
    let cfg = MultiConfig {
        lr_gen: lr,
        lr_disc: lr,
        ..Default::default()
    };
    multi_step(&MultiUnary, s, &cfg)
}

pub fn multi_pairwise_step(s: &MultiDeltaState, gamma: f64, lr: f64) -> Result<MultiDeltaState> {
    check_gamma(gamma)?;
    let cfg = MultiConfig {
        gamma,
        lr_gen: lr,
        lr_disc: lr,
        ..Default::default()
    };
    multi_step(&MultiPairwise, s, &cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiRecord {
    pub points: Vec<f64>,
    pub disc: Vec<f64>,
    pub loss: f64,
}

impl Tabular for MultiRecord {
    fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = (1..=self.points.len()).map(|i| format!("x{i}")).collect();
        if self.disc.len() == 1 {
            cols.push("psi".into());
        } else {
            for i in 1..=self.disc.len() / 3 {
                cols.extend([format!("a{i}"), format!("b{i}"), format!("c{i}")]);
            }
        }
        cols.push("loss".into());
        cols
    }

    fn row(&self) -> Vec<f64> {
        let mut row = self.points.clone();
        row.extend_from_slice(&self.disc);
        row.push(self.loss);
        row
    }
}

pub fn simulate_multi(
    game: &dyn MultiGame,
    init: MultiDeltaState,
    cfg: &MultiConfig,
    seed: Option<u64>,
) -> Result<GameTrajectory<MultiRecord>> {
    cfg.validate()?;
    let record = |s: &MultiDeltaState| -> Result<MultiRecord> {
        Ok(MultiRecord {
            points: s.points.clone(),
            disc: s.disc.params(),
            loss: game.loss(s, cfg.gamma)?,
        })
    };
    let meta = TrajectoryMeta {
        game: format!("multi-{}", game.name()),
        config: serde_json::json!({ "init": init, "config": cfg }),
        seed,
    };
    let mut traj = GameTrajectory::new(record(&init)?, meta);
    let mut s = init;
    for _ in 0..cfg.steps {
        s = multi_step(game, &s, cfg)?;
        traj.push(record(&s)?);
    }
    Ok(traj)
}
