//! One real point against one fake point at the origin.
//!
//! Both games reduce to min over x_fake, max over ψ of a scalar L̃.

use serde::{Deserialize, Serialize};

use super::{abs_pow, check_gamma, check_rate, sigmoid, softplus, UpdateOrder};
use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::trajectory::{GameTrajectory, Tabular, TrajectoryMeta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracState {
    pub x_fake: f64,
    pub psi: f64,
}

impl DiracState {
    pub fn new(x_fake: f64, psi: f64) -> Result<Self> {
        if !x_fake.is_finite() || !psi.is_finite() {
            return Err(Error::Config(format!("non-finite state ({x_fake}, {psi})")));
        }
        Ok(Self { x_fake, psi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracPairConfig {
    pub gamma: f64,
    pub lr_gen: f64,
    pub lr_disc: f64,
    pub steps: usize,
    pub order: UpdateOrder,
}

impl Default for DiracPairConfig {
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

impl DiracPairConfig {
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        check_rate("lr_gen", self.lr_gen)?;
        check_rate("lr_disc", self.lr_disc)
    }
}

pub trait DiracGame: Send + Sync {
    fn name(&self) -> &'static str;

    fn loss(&self, s: &DiracState, gamma: f64) -> f64;

    /// (∂L̃/∂x_fake, ∂L̃/∂ψ).
    fn partials(&self, s: &DiracState, gamma: f64) -> (f64, f64);
}

/// Unary linear discriminator: L̃ = −log(1 + exp(ψ·x_fake)).
#[derive(Debug, Clone, Copy, Default)]
pub struct DiracSgan;

impl DiracGame for DiracSgan {
    fn name(&self) -> &'static str {
        "sgan"
    }

    fn loss(&self, s: &DiracState, _gamma: f64) -> f64 {
        -softplus(s.psi * s.x_fake)
    }

    fn partials(&self, s: &DiracState, _gamma: f64) -> (f64, f64) {
        let sig = sigmoid(s.psi * s.x_fake);
        (-sig * s.psi, -sig * s.x_fake)
    }
}

/// Pairwise discriminator ψ·|x − y|^γ: L̃ = −log(1 + exp(ψ·|x_fake|^γ)).
#[derive(Debug, Clone, Copy, Default)]
pub struct DiracPairGan;

impl DiracGame for DiracPairGan {
    fn name(&self) -> &'static str {
        "pairgan"
    }

    fn loss(&self, s: &DiracState, gamma: f64) -> f64 {
        -softplus(s.psi * abs_pow(s.x_fake, gamma).0)
    }

    fn partials(&self, s: &DiracState, gamma: f64) -> (f64, f64) {
        let (r, dr) = abs_pow(s.x_fake, gamma);
        let sig = sigmoid(s.psi * r);
        (-sig * s.psi * dr, -sig * r)
    }
}

pub fn dirac_games() -> Registry<Box<dyn DiracGame>> {
    let mut reg: Registry<Box<dyn DiracGame>> = Registry::new("dirac game");
    reg.register("sgan", Box::new(DiracSgan))
        .and_then(|r| r.register("pairgan", Box::new(DiracPairGan)))
        .expect("built-in names are unique");
    reg
}

/// One iteration: ψ ascends L̃, x_fake descends L̃, in `cfg.order`.
pub fn dirac_step(game: &dyn DiracGame, s: &DiracState, cfg: &DiracPairConfig) -> DiracState {
    let g = cfg.gamma;
    match cfg.order {
        UpdateOrder::DiscriminatorFirst => {
            let psi = s.psi + cfg.lr_disc * game.partials(s, g).1;
            let mid = DiracState { x_fake: s.x_fake, psi };
            let x_fake = s.x_fake - cfg.lr_gen * game.partials(&mid, g).0;
            DiracState { x_fake, psi }
        }
        UpdateOrder::GeneratorFirst => {
            let x_fake = s.x_fake - cfg.lr_gen * game.partials(s, g).0;
            let mid = DiracState { x_fake, psi: s.psi };
            let psi = s.psi + cfg.lr_disc * game.partials(&mid, g).1;
            DiracState { x_fake, psi }
        }
        UpdateOrder::Simultaneous => {
            let (dx, dpsi) = game.partials(s, g);
            DiracState {
                x_fake: s.x_fake - cfg.lr_gen * dx,
                psi: s.psi + cfg.lr_disc * dpsi,
            }
        }
    }
}

pub fn dirac_sgan_step(s: &DiracState, lr_gen: f64, lr_disc: f64) -> DiracState {
    let cfg = DiracPairConfig {
        lr_gen,
        lr_disc,
        ..Default::default()
    };
    dirac_step(&DiracSgan, s, &cfg)
}

pub fn dirac_pairgan_step(s: &DiracState, cfg: &DiracPairConfig) -> DiracState {
    dirac_step(&DiracPairGan, s, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiracRecord {
    pub x_fake: f64,
    pub psi: f64,
    pub loss: f64,
}

impl Tabular for DiracRecord {
    fn columns(&self) -> Vec<String> {
        vec!["x_fake".into(), "psi".into(), "loss".into()]
    }

    fn row(&self) -> Vec<f64> {
        vec![self.x_fake, self.psi, self.loss]
    }
}

pub fn simulate_dirac(
    game: &dyn DiracGame,
    init: DiracState,
    cfg: &DiracPairConfig,
    seed: Option<u64>,
) -> Result<GameTrajectory<DiracRecord>> {
    cfg.validate()?;
    let record = |s: &DiracState| DiracRecord {
        x_fake: s.x_fake,
        psi: s.psi,
        loss: game.loss(s, cfg.gamma),
    };
    let meta = TrajectoryMeta {
        game: format!("dirac-{}", game.name()),
        config: serde_json::json!({ "init": init, "config": cfg }),
        seed,
    };
    let mut traj = GameTrajectory::new(record(&init), meta);
    let mut s = init;
    for _ in 0..cfg.steps {
        s = dirac_step(game, &s, cfg);
        traj.push(record(&s));
    }
    Ok(traj)
}

/// Regular grid over (x_fake, ψ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub x_range: (f64, f64),
    pub psi_range: (f64, f64),
    pub resolution: usize,
}

impl Default for FieldGrid {
    fn default() -> Self {
        Self {
            x_range: (-2.0, 2.0),
            psi_range: (-2.0, 2.0),
            resolution: 41,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub x_fake: f64,
    pub psi: f64,
    /// −∂L̃/∂x_fake.
    pub dx: f64,
    /// +∂L̃/∂ψ.
    pub dpsi: f64,
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Simultaneous-update direction at every grid node, ψ-major order.
pub fn dirac_vector_field(game: &dyn DiracGame, grid: &FieldGrid, gamma: f64) -> Result<Vec<FieldSample>> {
    check_gamma(gamma)?;
    if grid.resolution == 0 {
        return Err(Error::Config("grid resolution must be positive".into()));
    }
    let xs = linspace(grid.x_range, grid.resolution);
    let psis = linspace(grid.psi_range, grid.resolution);
    let mut out = Vec::with_capacity(xs.len() * psis.len());
    for &psi in &psis {
        for &x_fake in &xs {
            let (gx, gpsi) = game.partials(&DiracState { x_fake, psi }, gamma);
            out.push(FieldSample {
                x_fake,
                psi,
                dx: -gx,
                dpsi: gpsi,
            });
        }
    }
    Ok(out)
}

/// Longest run of consecutive values with |v| ≤ tol.
pub fn longest_run_within(values: &[f64], tol: f64) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for v in values {
        if v.abs() <= tol {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// First index from which every later value satisfies |v| ≤ tol.
pub fn settled_from(values: &[f64], tol: f64) -> Option<usize> {
    let last_out = values.iter().rposition(|v| v.abs() > tol);
    match last_out {
        None => Some(0),
        Some(i) if i + 1 < values.len() => Some(i + 1),
        Some(_) => None,
    }
}
