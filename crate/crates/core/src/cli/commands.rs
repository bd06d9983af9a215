use std::time::Instant;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::output::{all_finite, CheckSummary, RunManifest, Sink};
use super::*;
use crate::convergence::{
    check_sufficient, gd_rate_analysis, generators, hessian_at_alignment, operators, tangent_space, OperatorCtx,
};
use crate::function_space::{DensityVector, PairwiseOperator};
use crate::linalg;
use crate::sampling::{self, derive_seed};
use crate::toy_games::{
    dirac_games, dirac_vector_field, first_positive_definite_step, longest_run_within, multi_games,
    pairgan_z_iterate, settled_from, simulate_dirac, simulate_multi, DiracPairConfig, DiracState, FieldGrid,
    MultiConfig, MultiDeltaState, MultiDisc, PairganZConfig,
};
use crate::verify::{run_verify, VerifyConfig};

pub(super) fn dispatch(cmd: &Command) -> Result<(), CliError> {
    let start = Instant::now();
    let (name, config, out) = match cmd {
        Command::Dirac(a) => ("dirac", to_json(a)?, &a.output.out),
        Command::PairganZ(a) => ("pairgan-z", to_json(a)?, &a.output.out),
        Command::Multi(a) => ("multi", to_json(a)?, &a.output.out),
        Command::Sufficiency(a) => ("sufficiency", to_json(a)?, &a.output.out),
        Command::Verify(a) => ("verify", to_json(a)?, &a.out),
    };
    let outcome = match cmd {
        Command::Dirac(a) => dirac(a)?,
        Command::PairganZ(a) => pairgan_z(a)?,
        Command::Multi(a) => multi(a)?,
        Command::Sufficiency(a) => sufficiency(a)?,
        Command::Verify(a) => verify(a)?,
    };

    let mut sink = Sink::create(out)?;
    for artifact in &outcome.artifacts {
        artifact(&mut sink)?;
    }
    let failed = outcome.checks.iter().filter(|c| !c.passed).count();
    let manifest = RunManifest {
        command: name.into(),
        version: env!("CARGO_PKG_VERSION"),
        config,
        duration_seconds: start.elapsed().as_secs_f64(),
        artifacts: sink.artifacts.clone(),
        all_passed: failed == 0,
        checks: outcome.checks,
        results: outcome.results,
    };
    sink.json("manifest.json", &manifest)?;
    for line in outcome.summary {
        println!("{line}");
    }
    println!("wrote {} files to {}", sink.artifacts.len(), out.display());
    if outcome.fail_on_check && failed > 0 {
        return Err(CliError::Verify(failed));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Config(e.to_string()))
}

/// Deferred file write; everything is computed before the disk is touched.
type Artifact = Box<dyn Fn(&mut Sink) -> Result<(), CliError>>;

fn trajectory_artifact<S: crate::trajectory::Tabular + 'static>(
    stem: String,
    traj: crate::trajectory::GameTrajectory<S>,
    format: Format,
) -> Artifact {
    Box::new(move |sink| sink.trajectory(&stem, &traj, format))
}

fn json_artifact<T: Serialize + 'static>(name: String, value: T) -> Artifact {
    Box::new(move |sink| sink.json(&name, &value))
}

struct Outcome {
    artifacts: Vec<Artifact>,
    checks: Vec<CheckSummary>,
    results: serde_json::Value,
    summary: Vec<String>,
    fail_on_check: bool,
}

fn dirac(a: &DiracArgs) -> Result<Outcome, CliError> {
    let cfg = DiracPairConfig {
        gamma: a.gamma,
        lr_gen: a.dynamics.lr_gen,
        lr_disc: a.dynamics.lr_disc,
        steps: a.dynamics.steps,
        order: a.order.into(),
    };
    cfg.validate()?;
    let init = DiracState::new(a.x0, a.psi0)?;
    let grid = FieldGrid {
        x_range: (a.grid_min, a.grid_max),
        psi_range: (a.grid_min, a.grid_max),
        resolution: a.resolution,
    };
    if !a.no_field && (a.grid_min.partial_cmp(&a.grid_max) != Some(std::cmp::Ordering::Less) || a.resolution < 2) {
        return Err(CliError::Config("grid needs grid-min < grid-max and resolution >= 2".into()));
    }
    let names: Vec<&str> = match a.game {
        DiracChoice::Sgan => vec!["sgan"],
        DiracChoice::Pairgan => vec!["pairgan"],
        DiracChoice::Both => vec!["sgan", "pairgan"],
    };
    let registry = dirac_games();
    let runs: Vec<_> = names
        .par_iter()
        .map(|&name| -> Result<_, CliError> {
            let game = registry.get(name)?;
            let traj = simulate_dirac(game.as_ref(), init, &cfg, Some(a.output.seed))?;
            let field = if a.no_field {
                None
            } else {
                Some(dirac_vector_field(game.as_ref(), &grid, a.gamma)?)
            };
            Ok((name, traj, field))
        })
        .collect::<Result<_, _>>()?;

    let mut out = Outcome {
        artifacts: Vec::new(),
        checks: Vec::new(),
        results: json!({}),
        summary: Vec::new(),
        fail_on_check: false,
    };
    for (name, traj, field) in runs {
        let abs_x: Vec<f64> = traj.states().map(|r| r.x_fake.abs()).collect();
        let xs: Vec<f64> = traj.states().map(|r| r.x_fake).collect();
        let last = *traj.last();
        out.results[name] = json!({
            "final_x_fake": last.x_fake,
            "final_psi": last.psi,
            "settled_within_1e-3_from": settled_from(&abs_x, 1e-3),
            "longest_run_within_1e-3": longest_run_within(&xs, 1e-3),
        });
        out.checks.push(CheckSummary::new(
            &format!("{name}-finite"),
            all_finite(&traj),
            "all trajectory values finite",
        ));
        out.summary.push(format!("{name}: final x_fake = {:e}, psi = {:e}", last.x_fake, last.psi));
        out.artifacts.push(trajectory_artifact(format!("dirac-{name}"), traj, a.output.format));
        if let Some(field) = field {
            out.artifacts.push(json_artifact(
                format!("dirac-{name}-field.json"),
                json!({ "game": name, "gamma": a.gamma, "grid": grid, "samples": field }),
            ));
        }
    }
    Ok(out)
}

fn density_arg(values: &Option<Vec<f64>>, k: usize, rng: &mut sampling::SeededRng, floor: f64) -> Result<DensityVector, CliError> {
    match values {
        Some(v) => {
            if v.len() != k {
                return Err(CliError::Config(format!("expected {k} probabilities, got {}", v.len())));
            }
            Ok(DensityVector::new(v.clone())?)
        }
        None => Ok(sampling::random_density(rng, k, floor)),
    }
}

fn pairgan_z(a: &PairganZArgs) -> Result<Outcome, CliError> {
    if a.k < 2 {
        return Err(CliError::Config(format!("k must be >= 2, got {}", a.k)));
    }
    if a.runs == 0 {
        return Err(CliError::Config("runs must be >= 1".into()));
    }
    let cfg = PairganZConfig {
        alpha: a.dynamics.lr_gen,
        beta: a.dynamics.lr_disc,
        steps: a.dynamics.steps,
        order: a.order.into(),
        snapshots: a.snapshots,
    };
    let runs: Vec<_> = (0..a.runs)
        .into_par_iter()
        .map(|i| -> Result<_, CliError> {
            let seed = derive_seed(a.output.seed, i as u64);
            let mut rng = sampling::rng(seed);
            let p = density_arg(&a.p, a.k, &mut rng, 0.0)?;
            let q0 = density_arg(&a.q0, a.k, &mut rng, 0.0)?;
            let a0 = match a.a0 {
                InitialOperator::Identity => PairwiseOperator::identity(a.k),
                InitialOperator::NegIdentity => PairwiseOperator::identity(a.k).scaled(-1.0),
                InitialOperator::Zeros => PairwiseOperator::zeros(a.k),
                InitialOperator::RandomPd => sampling::random_pd(&mut rng, a.k, 0.1),
                InitialOperator::RandomSymmetric => sampling::random_symmetric(&mut rng, a.k),
            };
            Ok((i, seed, pairgan_z_iterate(&p, &q0, &a0, &cfg, Some(seed))?))
        })
        .collect::<Result<_, _>>()?;

    let mut out = Outcome {
        artifacts: Vec::new(),
        checks: Vec::new(),
        results: json!({ "runs": [] }),
        summary: Vec::new(),
        fail_on_check: false,
    };
    for (i, seed, traj) in runs {
        let stem = if a.runs == 1 { "pairgan-z".to_string() } else { format!("pairgan-z-run{i}") };
        let first_pd = match first_positive_definite_step(&traj) {
            Some(s) => json!(s),
            None => json!("never"),
        };
        let metrics: Vec<f64> = traj.states().map(|s| s.metric).collect();
        let monotone = metrics.windows(2).all(|w| w[0] <= 1e-10 || w[1] < w[0]);
        let last = traj.last();
        out.results["runs"].as_array_mut().expect("runs is an array").push(json!({
            "run": i,
            "seed": seed,
            "first_pd_step": first_pd,
            "final_metric": last.metric,
            "final_min_eig": last.min_eig,
            "metric_monotone": monotone,
        }));
        out.checks.push(CheckSummary::new(&format!("{stem}-finite"), all_finite(&traj), "all trajectory values finite"));
        out.summary.push(format!("{stem}: final metric = {:e}, first PD step = {first_pd}", last.metric));
        out.artifacts.push(trajectory_artifact(stem, traj, a.output.format));
    }
    Ok(out)
}

fn multi(a: &MultiArgs) -> Result<Outcome, CliError> {
    let cfg = MultiConfig {
        gamma: a.gamma,
        lr_gen: a.dynamics.lr_gen,
        lr_disc: a.dynamics.lr_disc,
        steps: a.dynamics.steps,
        order: a.order.into(),
    };
    cfg.validate()?;
    let n = a.points.len();
    let normal = Normal::new(0.0, a.unary_scale)
        .map_err(|e| CliError::Config(format!("unary-scale: {e}")))?;
    let mut rng = sampling::rng(derive_seed(a.output.seed, 0));
    let unary_init: Vec<f64> = (0..3 * n).map(|_| normal.sample(&mut rng)).collect();
    let names: Vec<&str> = match a.game {
        MultiChoice::Unary => vec!["unary"],
        MultiChoice::Pairwise => vec!["pairwise"],
        MultiChoice::Both => vec!["unary", "pairwise"],
    };
    let registry = multi_games();
    let runs: Vec<_> = names
        .par_iter()
        .map(|&name| -> Result<_, CliError> {
            let disc = if name == "unary" {
                MultiDisc::Unary(unary_init.clone())
            } else {
                MultiDisc::Pairwise(a.psi0)
            };
            let init = MultiDeltaState::new(a.points.clone(), disc)?;
            let traj = simulate_multi(registry.get(name)?.as_ref(), init, &cfg, Some(a.output.seed))?;
            Ok((name, traj))
        })
        .collect::<Result<_, _>>()?;

    let mut out = Outcome {
        artifacts: Vec::new(),
        checks: Vec::new(),
        results: json!({}),
        summary: Vec::new(),
        fail_on_check: false,
    };
    for (name, traj) in runs {
        let gap = traj.states().fold(0.0_f64, |m, r| m.max((r.points[0] - r.points[1]).abs()));
        let last = traj.last();
        out.results[name] = json!({
            "final_points": last.points,
            "final_disc": last.disc,
            "max_abs_x1_minus_x2": gap,
        });
        out.checks.push(CheckSummary::new(&format!("{name}-finite"), all_finite(&traj), "all trajectory values finite"));
        out.summary.push(format!("{name}: final points = {:?}, max |x1 - x2| = {gap:e}", last.points));
        out.artifacts.push(trajectory_artifact(format!("multi-{name}"), traj, a.output.format));
    }
    Ok(out)
}

fn sufficiency(a: &SufficiencyArgs) -> Result<Outcome, CliError> {
    let gen = generators().get(&a.generator)?(a.k)?;
    let factory = *operators().get(&a.operator)?;
    let mut rng = sampling::rng(derive_seed(a.output.seed, 0));
    let p = density_arg(&a.p, a.k, &mut rng, 0.05)?;
    let theta = gen.parameters_for(&p)?;
    let mut ctx = OperatorCtx {
        gen: gen.as_ref(),
        theta: &theta,
        bandwidth: a.bandwidth,
        rng: sampling::rng(derive_seed(a.output.seed, 1)),
    };
    let op = factory(&mut ctx)?;
    let report = check_sufficient(gen.as_ref(), &theta, &op)?;
    let h = hessian_at_alignment(gen.as_ref(), &theta, &p, &op)?;
    let tangent = tangent_space(gen.as_ref(), &theta)?;
    let mu_max = linalg::max_eigenvalue(&tangent.restrict(&h));
    let step = match a.step {
        Some(s) if s.is_finite() && s > 0.0 => Some(s),
        Some(s) => return Err(CliError::Config(format!("step must be positive, got {s}"))),
        None if mu_max > 0.0 => Some(1.0 / mu_max),
        None => None,
    };
    let rate = step.map(|s| gd_rate_analysis(&h, &tangent, s));
    let rows: Vec<Vec<f64>> = (0..a.k).map(|i| (0..a.k).map(|j| op.get(i, j)).collect()).collect();
    let summary = vec![format!(
        "{} / {}: {:?}, min margin {:?}, rank {} (complement dim {})",
        a.generator, a.operator, report.verdict, report.min_margin, report.operator_rank, report.complement_dim
    )];
    let checks = vec![CheckSummary::new(
        "sufficient",
        report.is_sufficient(),
        "Hessian positive definite on the complement of the tangent space",
    )];
    let results = json!({ "verdict": report.verdict, "min_margin": report.min_margin });
    let body = json!({
        "generator": a.generator,
        "operator_name": a.operator,
        "p": p.as_slice(),
        "theta": theta.as_slice(),
        "operator": rows,
        "report": report,
        "rate": rate,
    });
    Ok(Outcome {
        artifacts: vec![json_artifact("sufficiency.json".into(), body)],
        checks,
        results,
        summary,
        fail_on_check: false,
    })
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let cfg = VerifyConfig {
        seeds: a.seeds.0.clone(),
        sizes: a.sizes.0.iter().map(|&s| s as usize).collect(),
        poison: a.poison.map(Into::into),
    };
    let report = run_verify(&cfg)?;
    let summary = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<24} measured {:<12.3e} {} {:.0e} ({} instances)",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                match c.relation {
                    crate::verify::Relation::AtMost => "<=",
                    crate::verify::Relation::Above => "> ",
                },
                c.tolerance,
                c.instances
            )
        })
        .collect();
    let checks = report
        .checks
        .iter()
        .map(|c| {
            let detail = match &c.error {
                Some(e) => format!("error: {e}"),
                None => format!("measured {} vs tolerance {}", c.measured, c.tolerance),
            };
            CheckSummary::new(&c.name, c.passed, detail)
        })
        .collect();
    Ok(Outcome {
        results: json!({ "passed": report.passed }),
        artifacts: vec![json_artifact("verify-report.json".into(), report)],
        checks,
        summary,
        fail_on_check: true,
    })
}
