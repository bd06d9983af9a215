//! Property suite run by `pairgan verify`.
//!
//! Each check draws its own instances from a seed derived from the master
//! seed and the check's position, and reports the worst measured value
//! against a fixed tolerance.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::{
    check_sufficient, gd_converge_to_manifold, gd_rate_analysis, generator_loss, hessian_at_alignment,
    l_star_loss, minimally_sufficient_operators, squared_distance_loss, kl_loss, tangent_space, DescentOptions,
    LStar, ParametricGenerator, SoftmaxGenerator,
};
use crate::error::{Error, Result};
use crate::function_space::{unary, ActivationTriple, DensityVector, PairwiseOperator};
use crate::linalg;
use crate::multi_align::{multi_gradients, multi_loss, multi_loss_rearranged, DistributionFamily};
use crate::numdiff::{central_gradient, central_hessian, relative_error};
use crate::objectives::{
    pairwise_generator_gradient, project_admissible, sym_kl_identity_check, tv_identity_check,
    unary_generator_gradient, EpsFloor,
};
use crate::registry::Registry;
use crate::sampling::{self, SeededRng};
use crate::toy_games::{
    longest_run_within, multi_pairwise_step, pairgan_z_iterate, simulate_dirac, DiracPairConfig, DiracPairGan,
    DiracSgan, DiracState, MultiDeltaState, MultiDisc, PairganZConfig,
};

/// Deliberate defects for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Poison {
    /// Negate the (0, 0) entry of the analytic Hessian.
    Hessian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seeds: Vec<u64>,
    pub sizes: Vec<usize>,
    pub poison: Option<Poison>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seeds: vec![0, 1, 2],
            sizes: (2..=8).collect(),
            poison: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// measured ≤ tolerance
    AtMost,
    /// measured > tolerance
    Above,
}

impl Relation {
    fn holds(self, measured: f64, tol: f64) -> bool {
        match self {
            Self::AtMost => measured <= tol,
            Self::Above => measured > tol,
        }
    }

    /// Combines two measurements into the one closer to failing.
    fn worst(self, a: f64, b: f64) -> f64 {
        if a.is_nan() || b.is_nan() {
            return f64::NAN;
        }
        match self {
            Self::AtMost => a.max(b),
            Self::Above => a.min(b),
        }
    }
}

/// Worst value seen over a batch of instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub instances: usize,
}

pub struct Ctx<'a> {
    pub rng: SeededRng,
    pub sizes: &'a [usize],
    pub poison: Option<Poison>,
}

pub type CheckFn = fn(&mut Ctx) -> Result<Measured>;

pub struct Check {
    pub description: &'static str,
    pub relation: Relation,
    pub tolerance: f64,
    pub run: CheckFn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub description: String,
    pub relation: Relation,
    pub tolerance: f64,
    pub measured: f64,
    pub instances: usize,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failed(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn sizes_or_default(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().copied().filter(|&k| k >= 2).collect()
}

fn worst_of(rel: Relation, values: impl IntoIterator<Item = f64>) -> Measured {
    let mut value = match rel {
        Relation::AtMost => f64::NEG_INFINITY,
        Relation::Above => f64::INFINITY,
    };
    let mut instances = 0;
    for v in values {
        value = rel.worst(value, v);
        instances += 1;
    }
    Measured { value, instances }
}

fn softmax_at(p: &DensityVector) -> Result<(SoftmaxGenerator, DVector<f64>)> {
    let gen = SoftmaxGenerator::new(p.len())?;
    let theta = gen.parameters_for(p)?;
    Ok((gen, theta))
}

fn sym_kl(ctx: &mut Ctx) -> Result<Measured> {
    let mut errs = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..30 {
            let p = sampling::random_density(&mut ctx.rng, k, 0.01);
            let q = sampling::random_density(&mut ctx.rng, k, 0.01);
            errs.push(sym_kl_identity_check(&p, &q)?.abs_error());
        }
    }
    Ok(worst_of(Relation::AtMost, errs))
}

fn tv(ctx: &mut Ctx) -> Result<Measured> {
    let mut errs = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for &e in &[0.5, 0.1, 0.01] {
            let eps = EpsFloor::new(e)?;
            for _ in 0..10 {
                let p = sampling::random_sparse_density(&mut ctx.rng, k, 0.2);
                let q = sampling::random_sparse_density(&mut ctx.rng, k, 0.2);
                errs.push(tv_identity_check(&p, &q, eps)?.abs_error());
            }
        }
    }
    Ok(worst_of(Relation::AtMost, errs))
}

fn alignment_gradient(ctx: &mut Ctx) -> Result<Measured> {
    let sizes = sizes_or_default(ctx.sizes);
    let act = ActivationTriple::log();
    let mut norms = Vec::new();
    for i in 0..350 {
        let k = sizes[i % sizes.len()];
        let d = sampling::random_discriminator(&mut ctx.rng, k, 0.01, 0.99);
        let p = sampling::random_sparse_density(&mut ctx.rng, k, 0.2);
        norms.push(pairwise_generator_gradient(&d, &p, &p, &act)?.norm());
        let s = sampling::random_symmetric(&mut ctx.rng, k);
        norms.push(pairwise_generator_gradient(&s, &p, &p, &ActivationTriple::linear())?.norm());
    }
    Ok(worst_of(Relation::AtMost, norms))
}

fn unary_control(ctx: &mut Ctx) -> Result<Measured> {
    let g2 = unary::sgan_saturating();
    let mut norms = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..20 {
            let p = sampling::random_density(&mut ctx.rng, k, 0.05);
            let mut d: Vec<f64> = (0..k).map(|_| ctx.rng.random_range(0.05..0.95)).collect();
            // Non-constant on the support.
            d[0] = 0.1;
            d[1] = 0.9;
            let grad = unary_generator_gradient(&d, &g2)?;
            norms.push(project_admissible(&grad, &p)?.norm());
        }
    }
    Ok(worst_of(Relation::Above, norms))
}

fn random_hessian_instance(ctx: &mut Ctx, k: usize) -> Result<(SoftmaxGenerator, DVector<f64>, DensityVector, PairwiseOperator)> {
    let p = sampling::random_density(&mut ctx.rng, k, 0.1);
    let (gen, theta) = softmax_at(&p)?;
    let g = sampling::random_symmetric(&mut ctx.rng, k);
    Ok((gen, theta, p, g))
}

fn hessian_fd(ctx: &mut Ctx) -> Result<Measured> {
    let mut errs = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..4 {
            let (gen, theta, p, g) = random_hessian_instance(ctx, k)?;
            let mut h = hessian_at_alignment(&gen, &theta, &p, &g)?;
            if ctx.poison == Some(Poison::Hessian) {
                h[(0, 0)] = -h[(0, 0)];
            }
            let fd = central_hessian(|t| generator_loss(&gen, t, &p, &g).unwrap_or(f64::NAN), &theta, 1e-4);
            errs.push(relative_error(&fd, &h, 1e-12));
        }
    }
    Ok(worst_of(Relation::AtMost, errs))
}

fn hessian_symmetry(ctx: &mut Ctx) -> Result<Measured> {
    let mut errs = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..4 {
            let (gen, theta, p, g) = random_hessian_instance(ctx, k)?;
            let h = hessian_at_alignment(&gen, &theta, &p, &g)?;
            errs.push((&h - h.transpose()).amax());
        }
    }
    Ok(worst_of(Relation::AtMost, errs))
}

/// One descent run from a perturbed start; returns (final distance, tail − predicted).
fn descent_instance(ctx: &mut Ctx, k: usize) -> Result<(f64, f64)> {
    let p = sampling::random_density(&mut ctx.rng, k, 1.0);
    let (gen, theta_star) = softmax_at(&p)?;
    let (a1, _) = minimally_sufficient_operators(&gen, &theta_star)?;
    let h = hessian_at_alignment(&gen, &theta_star, &p, &a1)?;
    let tangent = tangent_space(&gen, &theta_star)?;
    let mu_max = linalg::max_eigenvalue(&tangent.restrict(&h));
    let step = 1.0 / mu_max;
    let rate = gd_rate_analysis(&h, &tangent, step);
    let theta0 = &theta_star + sampling::random_unit_vector(&mut ctx.rng, k) * 0.01;
    let run = gd_converge_to_manifold(&gen, &p, &a1, &theta0, step, 2000, DescentOptions::default())?;
    let excess = run.tail_ratio.unwrap_or(f64::INFINITY) - rate.lambda_max_abs;
    Ok((run.final_distance, excess))
}

fn gd_distance(ctx: &mut Ctx) -> Result<Measured> {
    let mut out = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..3 {
            out.push(descent_instance(ctx, k)?.0);
        }
    }
    Ok(worst_of(Relation::AtMost, out))
}

fn gd_rate(ctx: &mut Ctx) -> Result<Measured> {
    let mut out = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..3 {
            out.push(descent_instance(ctx, k)?.1);
        }
    }
    Ok(worst_of(Relation::AtMost, out))
}

fn minimal_rank(ctx: &mut Ctx) -> Result<Measured> {
    let mut out = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        let p = sampling::random_density(&mut ctx.rng, k, 0.1);
        let (gen, theta) = softmax_at(&p)?;
        let (a1, a2) = minimally_sufficient_operators(&gen, &theta)?;
        let w = tangent_space(&gen, &theta)?.complement_dim() as f64;
        for a in [&a1, &a2] {
            let r = check_sufficient(&gen, &theta, a)?;
            let rank_gap = (r.operator_rank as f64 - w).abs();
            let insufficient = if r.is_sufficient() { 0.0 } else { 1.0 };
            out.push(rank_gap + insufficient);
        }
    }
    Ok(worst_of(Relation::AtMost, out))
}

fn l_star(ctx: &mut Ctx) -> Result<Measured> {
    let mut out = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..3 {
            let p = sampling::random_density(&mut ctx.rng, k, 0.1);
            let gen = SoftmaxGenerator::new(k)?;
            let theta = sampling::random_normal_vector(&mut ctx.rng, k);
            let g_sq = central_gradient(|t| squared_distance_loss(&gen, t, &p).unwrap_or(f64::NAN), &theta, 1e-5);
            let g_kl = central_gradient(|t| kl_loss(&gen, t, &p).unwrap_or(f64::NAN), &theta, 1e-5);
            let l1 = l_star_loss(&gen, &theta, &p, LStar::GradDensity)?;
            let l2 = l_star_loss(&gen, &theta, &p, LStar::GradLogDensity)?;
            out.push((l1 - g_sq.norm_squared()).abs() / l1.abs().max(1e-300));
            out.push((l2 - g_kl.norm_squared()).abs() / l2.abs().max(1e-300));
        }
    }
    Ok(worst_of(Relation::AtMost, out))
}

fn sufficiency_robustness(ctx: &mut Ctx) -> Result<Measured> {
    let mut failures = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        for _ in 0..3 {
            let p = sampling::random_density(&mut ctx.rng, k, 0.1);
            let (gen, theta) = softmax_at(&p)?;
            let a0 = sampling::random_pd(&mut ctx.rng, k, 0.5);
            let r = check_sufficient(&gen, &theta, &a0)?;
            let margin = r.min_margin.unwrap_or(0.0);
            let s = sampling::random_symmetric(&mut ctx.rng, k);
            let spectral = s.eigenvalues().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let perturbed = a0.try_add(&s.scaled(margin / 4.0 / spectral))?;
            let ok = check_sufficient(&gen, &theta, &perturbed)?.is_sufficient();
            failures.push(if ok { 0.0 } else { 1.0 });
        }
    }
    Ok(worst_of(Relation::AtMost, failures))
}

fn rank_one_pd(ctx: &mut Ctx) -> Result<Measured> {
    let sizes = sizes_or_default(ctx.sizes);
    let mut drops = Vec::new();
    for i in 0..350 {
        let k = sizes[i % sizes.len()];
        let a = sampling::random_pd(&mut ctx.rng, k, 1e-3);
        let beta = ctx.rng.random_range(1e-3..10.0);
        let v = sampling::random_normal_vector(&mut ctx.rng, k);
        let updated = a.rank_one_update(beta, &v)?;
        drops.push(a.min_eigenvalue() - updated.min_eigenvalue());
    }
    Ok(worst_of(Relation::AtMost, drops))
}

fn pairgan_z_runs(ctx: &mut Ctx) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        let p = sampling::random_density(&mut ctx.rng, k, 0.0);
        let q0 = sampling::random_density(&mut ctx.rng, k, 0.0);
        let a0 = sampling::random_pd(&mut ctx.rng, k, 0.5);
        // α below 1/(2·max-eig) keeps projected descent monotone.
        let alpha = 0.4 / a0.max_eigenvalue();
        let cfg = PairganZConfig {
            alpha,
            beta: 0.1,
            steps: 3000,
            ..Default::default()
        };
        let t = pairgan_z_iterate(&p, &q0, &a0, &cfg, None)?;
        let states: Vec<_> = t.states().collect();
        let violations = states
            .windows(2)
            .filter(|w| w[0].metric > 1e-10 && w[1].metric >= w[0].metric)
            .count();
        out.push((violations, t.last().metric));
    }
    Ok(out)
}

fn pairgan_z_monotone(ctx: &mut Ctx) -> Result<Measured> {
    let runs = pairgan_z_runs(ctx)?;
    Ok(worst_of(Relation::AtMost, runs.iter().map(|r| r.0 as f64)))
}

fn pairgan_z_final(ctx: &mut Ctx) -> Result<Measured> {
    let runs = pairgan_z_runs(ctx)?;
    Ok(worst_of(Relation::AtMost, runs.iter().map(|r| r.1)))
}

fn aligned_gradients(ctx: &mut Ctx) -> Result<Measured> {
    let sizes = sizes_or_default(ctx.sizes);
    let mut out = Vec::new();
    for i in 0..60 {
        let k = sizes[i % sizes.len()];
        let n = ctx.rng.random_range(2..=6);
        let subset = ctx.rng.random_range(2..=n);
        let shared = sampling::random_density(&mut ctx.rng, k, 0.0);
        let mut members: Vec<DensityVector> = (0..n).map(|_| sampling::random_density(&mut ctx.rng, k, 0.0)).collect();
        // Scatter the aligned subset over random positions.
        let mut idx: Vec<usize> = (0..n).collect();
        for j in (1..n).rev() {
            idx.swap(j, ctx.rng.random_range(0..=j));
        }
        for &j in &idx[..subset] {
            members[j] = shared.clone();
        }
        let a = sampling::random_symmetric(&mut ctx.rng, k);
        let g = multi_gradients(&DistributionFamily::new(members)?, &a)?;
        let first = &g[idx[0]];
        for &j in &idx[1..subset] {
            out.push((&g[j] - first).amax());
        }
    }
    Ok(worst_of(Relation::AtMost, out))
}

fn rearrangement(ctx: &mut Ctx) -> Result<Measured> {
    let mut out = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        let n = ctx.rng.random_range(2..=6);
        let members: Vec<DensityVector> = (0..n).map(|_| sampling::random_density(&mut ctx.rng, k, 0.0)).collect();
        let a = sampling::random_symmetric(&mut ctx.rng, k);
        let fam = DistributionFamily::new(members)?;
        let direct = multi_loss(&fam, &a)?;
        let re = multi_loss_rearranged(&fam, &a)?;
        out.push((direct - re).abs() / direct.abs().max(1.0));
    }
    Ok(worst_of(Relation::AtMost, out))
}

fn merge_persistence(ctx: &mut Ctx) -> Result<Measured> {
    let mut out = Vec::new();
    for _ in 0..3 {
        let x = ctx.rng.random_range(-1.0..1.0);
        let other = ctx.rng.random_range(-2.0..2.0);
        let psi = ctx.rng.random_range(-1.0..1.0);
        let mut s = MultiDeltaState::new(vec![x, x, other], MultiDisc::Pairwise(psi))?;
        let mut worst = 0.0_f64;
        for _ in 0..10_000 {
            s = multi_pairwise_step(&s, 2.0, 0.1)?;
            worst = worst.max((s.points[0] - s.points[1]).abs());
        }
        out.push(worst);
    }
    Ok(worst_of(Relation::AtMost, out))
}

fn dirac_pairgan_hold(_ctx: &mut Ctx) -> Result<Measured> {
    let cfg = DiracPairConfig::default();
    let t = simulate_dirac(&DiracPairGan, DiracState::new(1.5, 0.5)?, &cfg, None)?;
    let xs: Vec<f64> = t.states().map(|r| r.x_fake.abs()).collect();
    let value = match xs.iter().position(|&x| x <= 1e-3) {
        Some(i) => xs[i..].iter().fold(0.0_f64, |a, &x| a.max(x)),
        None => f64::INFINITY,
    };
    Ok(Measured { value, instances: 1 })
}

fn dirac_sgan_run(_ctx: &mut Ctx) -> Result<Measured> {
    let cfg = DiracPairConfig {
        steps: 5000,
        ..Default::default()
    };
    let t = simulate_dirac(&DiracSgan, DiracState::new(1.5, 0.5)?, &cfg, None)?;
    let xs: Vec<f64> = t.states().map(|r| r.x_fake).collect();
    Ok(Measured {
        value: longest_run_within(&xs, 1e-3) as f64,
        instances: 1,
    })
}

/// All checks in execution order.
pub fn checks() -> Registry<Check> {
    use Relation::{Above, AtMost};
    let table: [(&'static str, &'static str, Relation, f64, CheckFn); 20] = [
        ("sym-kl-identity", "generator loss at optimal PairGAN discriminator equals 4 x symmetric KL", AtMost, 1e-8, sym_kl),
        ("tv-identity", "generator loss at optimal PairGAN-Z discriminator equals -log(eps) x L1(M+, M-)", AtMost, 1e-8, tv),
        ("alignment-gradient", "pairwise generator gradient norm at q = p", AtMost, 1e-12, alignment_gradient),
        ("unary-control", "unary SGAN projected gradient norm at q = p (negative control)", Above, 1e-3, unary_control),
        ("hessian-fd", "analytic Hessian vs central finite differences, relative error", AtMost, 1e-4, hessian_fd),
        ("hessian-symmetry", "max |H - H^T|", AtMost, 1e-12, hessian_symmetry),
        ("gd-distance", "final ||q - p|| after 2000 steps from a 0.01 perturbation", AtMost, 1e-8, gd_distance),
        ("gd-rate", "tail contraction ratio minus predicted max |1 - h mu|", AtMost, 0.05, gd_rate),
        ("minimal-rank", "|rank(A*) - dim W| plus insufficiency count", AtMost, 0.0, minimal_rank),
        ("l-star-gradients", "L*_1 vs |grad L_SQ|^2 and L*_2 vs |grad L_KL|^2, relative error", AtMost, 1e-6, l_star),
        ("sufficiency-robustness", "sufficient operators perturbed by margin/4 that turn insufficient", AtMost, 0.0, sufficiency_robustness),
        ("rank-one-pd", "min-eig(A) - min-eig(A + beta v v^T)", AtMost, 1e-12, rank_one_pd),
        ("pairgan-z-monotone", "metric increases during PD-start alternating descent", AtMost, 0.0, pairgan_z_monotone),
        ("pairgan-z-final", "final metric of PD-start alternating descent", AtMost, 1e-10, pairgan_z_final),
        ("aligned-gradients", "max gradient difference within an aligned subset", AtMost, 1e-14, aligned_gradients),
        ("multi-rearrangement", "pairwise vs rearranged multi-alignment loss, relative", AtMost, 1e-12, rearrangement),
        ("merge-persistence", "max |x1 - x2| over 10^4 pairwise steps from a merged start", AtMost, 0.0, merge_persistence),
        ("dirac-pairgan-hold", "max |x_fake| after first reaching 1e-3 (pairgan, 2000 steps)", AtMost, 1e-3, dirac_pairgan_hold),
        ("dirac-sgan-no-hold", "longest run with |x_fake| <= 1e-3 (sgan, 5000 steps)", AtMost, 10.0, dirac_sgan_run),
        ("hessian-alignment-guard", "misaligned parameters rejected (1 = accepted)", AtMost, 0.0, misaligned_rejected),
    ];
    let mut reg = Registry::new("check");
    for (name, description, relation, tolerance, run) in table {
        reg.register(
            name,
            Check {
                description,
                relation,
                tolerance,
                run,
            },
        )
        .expect("check names are unique");
    }
    reg
}

fn misaligned_rejected(ctx: &mut Ctx) -> Result<Measured> {
    let mut accepted = Vec::new();
    for k in sizes_or_default(ctx.sizes) {
        let p = sampling::random_density(&mut ctx.rng, k, 0.1);
        let gen = SoftmaxGenerator::new(k)?;
        let theta = gen.parameters_for(&p)? + sampling::random_unit_vector(&mut ctx.rng, k) * 0.1;
        let moved = gen.density(&theta)?.diff(&p)?.norm() > 1e-10;
        let r = hessian_at_alignment(&gen, &theta, &p, &PairwiseOperator::identity(k));
        accepted.push(if moved && r.is_ok() { 1.0 } else { 0.0 });
    }
    Ok(worst_of(Relation::AtMost, accepted))
}

/// Runs every check for every seed; seeds run in parallel.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.seeds.is_empty() {
        return Err(Error::Config("verify needs at least one seed".into()));
    }
    if sizes_or_default(&cfg.sizes).is_empty() {
        return Err(Error::Config("verify needs at least one size >= 2".into()));
    }
    let registry = checks();
    let entries: Vec<(&'static str, &Check)> = registry.iter().collect();
    let per_seed: Vec<Vec<std::result::Result<Measured, String>>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            entries
                .iter()
                .enumerate()
                .map(|(i, (_, check))| {
                    let mut ctx = Ctx {
                        rng: sampling::rng(sampling::derive_seed(seed, i as u64)),
                        sizes: &cfg.sizes,
                        poison: cfg.poison,
                    };
                    (check.run)(&mut ctx).map_err(|e| e.to_string())
                })
                .collect()
        })
        .collect();

    let mut outcomes = Vec::new();
    for (i, (name, check)) in entries.iter().enumerate() {
        let mut measured: Option<Measured> = None;
        let mut error = None;
        for seed_results in &per_seed {
            match &seed_results[i] {
                Ok(m) => {
                    measured = Some(match measured {
                        None => *m,
                        Some(prev) => Measured {
                            value: check.relation.worst(prev.value, m.value),
                            instances: prev.instances + m.instances,
                        },
                    });
                }
                Err(e) => error = Some(e.clone()),
            }
        }
        let m = measured.unwrap_or(Measured {
            value: f64::NAN,
            instances: 0,
        });
        let passed = error.is_none() && check.relation.holds(m.value, check.tolerance);
        outcomes.push(CheckOutcome {
            name: name.to_string(),
            description: check.description.to_string(),
            relation: check.relation,
            tolerance: check.tolerance,
            measured: m.value,
            instances: m.instances,
            passed,
            error,
        });
    }
    let passed = outcomes.iter().all(|c| c.passed);
    Ok(VerifyReport {
        config: cfg.clone(),
        checks: outcomes,
        passed,
    })
}
