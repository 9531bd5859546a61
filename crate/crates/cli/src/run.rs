//! Scenario dispatch. Each runner returns a [`Report`]; writing is left to the caller.

use std::sync::Arc;

use mlfrac::fracops::{
    solve_abel_system_with, AbelOptions, FractionalOrders, SampledFunction, TimeGrid,
};
use mlfrac::inverse::{
    reconstruct_rho_with, synthesize_observation, uniqueness_test, NoiseModel, Observation,
    ReconstructionOptions,
};
use mlfrac::mittag_leffler::{
    ml_eval, ml_recurrence_residual_with, ml_remainder_with, MlArguments, MlContext, MlOptions,
};
use mlfrac::properties::{
    check_complete_monotonicity, verify_asymptotics, verify_strict_positivity, verify_weak_maximum,
    DataSign,
};
use mlfrac::solver::{
    solve_homogeneous, solve_l1_oracle, solve_source_duhamel, SourceSpec, SpaceTimeSource,
};
use mlfrac::spectral::{
    dirichlet_laplacian_eigensystem, project_fn, sturm_liouville_eigensystem, EigenSystem,
    ModalCoefficients, OperatorSpec,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{Kind, ScenarioConfig};
use crate::output::csv;
use crate::specs::{rng, SpatialSpec, TemporalSpec};

/// Everything a scenario produced.
#[derive(Debug, Default)]
pub struct Report {
    /// Key figures for the one-line stdout summary.
    pub summary: Map<String, Value>,
    /// Full JSON artifact.
    pub artifact: Value,
    /// None for plain computations, Some(passed) for checks.
    pub passed: Option<bool>,
    pub csv: Option<String>,
    pub observation_csv: Option<String>,
}

pub type RunResult = Result<Report, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn summary(pairs: Value) -> Map<String, Value> {
    match pairs {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

pub fn run(cfg: &ScenarioConfig) -> RunResult {
    let orders = cfg.orders.as_ref();
    let ctx = Ctx { cfg, orders };
    match &cfg.kind {
        Kind::MlEval {
            beta0,
            beta,
            z,
            tol,
            expect,
        } => run_ml_eval(*beta0, beta, z, *tol, *expect),
        Kind::MlIdentities { .. } => run_ml_identities(&cfg.kind),
        Kind::SolveHomogeneous {
            initial,
            modal,
            t_min,
            x,
            times,
        } => {
            let (op, orders) = ctx.pde()?;
            let es = ctx.eigensystem(modal.modes)?;
            let a = modal_data(initial, &es, modal.modes, &mut rng(0))?;
            let xs = x.points(op.length());
            let ts = times.points(op.length());
            let t_min = t_min.unwrap_or_else(|| ts.iter().copied().fold(f64::INFINITY, f64::min));
            let sol = solve_homogeneous(&a, orders, modal.trunc_tol, t_min).map_err(err)?;
            field_report(
                &sol.eval_grid(&xs, &ts).map_err(err)?,
                &xs,
                &ts,
                sol.retained_modes(),
            )
        }
        Kind::SolveSource {
            rho,
            g,
            modal,
            horizon,
            steps,
            graded,
            x,
            times,
        } => {
            let (op, orders) = ctx.pde()?;
            let es = ctx.eigensystem(modal.modes)?;
            let mut r = rng(0);
            let g = modal_data(g, &es, modal.modes, &mut r)?;
            let grid = time_grid(*horizon, *steps, *graded, orders)?;
            let rho = SampledFunction::from_fn(grid, rho.realize(*horizon, &mut r));
            let src = SourceSpec::new(rho, g).map_err(err)?;
            let sol = solve_source_duhamel(&src, orders, modal.trunc_tol).map_err(err)?;
            let xs = x.points(op.length());
            let ts = times.points(op.length());
            field_report(
                &sol.eval_grid(&xs, &ts).map_err(err)?,
                &xs,
                &ts,
                sol.retained_modes(),
            )
        }
        Kind::VerifyMaxprin { .. } => ctx.maxprin(),
        Kind::VerifyAsymptotics {
            initial,
            modal,
            x0,
            window,
            probe_time,
            tolerance,
        } => {
            let (op, orders) = ctx.pde()?;
            let es = ctx.eigensystem(modal.modes)?;
            let a = modal_data(initial, &es, modal.modes, &mut rng(0))?;
            let ts = window.points(op.length());
            let t_lo = ts
                .iter()
                .copied()
                .chain(*probe_time)
                .fold(f64::INFINITY, f64::min);
            let sol = solve_homogeneous(&a, orders, modal.trunc_tol, t_lo).map_err(err)?;
            let rep = verify_asymptotics(&sol, &a, *x0, &ts).map_err(err)?;
            let mut passed = rep.exponent_deviation <= *tolerance;
            let mut artifact = serde_json::to_value(&rep).map_err(err)?;
            let mut s = summary(json!({
                "fitted_exponent": rep.fitted_exponent,
                "predicted_exponent": rep.predicted_exponent,
                "fitted_amplitude": rep.fitted_amplitude,
                "predicted_amplitude": rep.predicted_amplitude,
                "exponent_deviation": rep.exponent_deviation,
            }));
            if let Some(t) = probe_time {
                let scaled = t.powf(rep.predicted_exponent) * sol.eval(*x0, *t).map_err(err)?;
                let dev = (scaled - rep.predicted_amplitude).abs() / rep.predicted_amplitude.abs();
                passed &= dev <= *tolerance;
                for (k, v) in [
                    ("probe_time", *t),
                    ("probe_scaled_value", scaled),
                    ("probe_deviation", dev),
                ] {
                    artifact[k] = json!(v);
                    s.insert(k.into(), json!(v));
                }
            }
            artifact["tolerance"] = json!(tolerance);
            Ok(Report {
                summary: s,
                artifact,
                passed: Some(passed),
                ..Default::default()
            })
        }
        Kind::Invert { .. } => ctx.invert(),
        Kind::OracleCompare { .. } => ctx.oracle_compare(),
        Kind::Abel {
            rho,
            horizon,
            steps,
            graded,
            variation_tol,
            residual_tol,
        } => {
            let orders = orders.ok_or("orders required")?;
            run_abel(
                orders,
                rho,
                *horizon,
                steps,
                *graded,
                *variation_tol,
                *residual_tol,
            )
        }
        Kind::Monotonicity {
            random,
            lambda,
            depth,
            times,
        } => {
            let ts = times.points(1.0);
            let draws: Vec<(FractionalOrders, f64)> = match random {
                Some((samples, seed, m_max)) => {
                    let mut r = rng(*seed);
                    (0..*samples)
                        .map(|_| random_orders(&mut r, *m_max))
                        .collect::<Result<_, _>>()?
                }
                None => {
                    let o = orders.ok_or("orders required")?;
                    lambda.iter().map(|&l| (o.clone(), l)).collect()
                }
            };
            let mut reports = Vec::new();
            let mut failures = 0;
            for (o, l) in &draws {
                let rep = check_complete_monotonicity(*l, o, &ts, *depth).map_err(err)?;
                if !rep.all_hold() {
                    failures += 1;
                }
                reports.push(json!({ "alpha": o.alpha(), "q": o.q(), "report": rep }));
            }
            Ok(Report {
                summary: summary(
                    json!({ "draws": draws.len(), "failures": failures, "depth": depth }),
                ),
                artifact: json!({ "depth": depth, "draws": reports }),
                passed: Some(failures == 0),
                ..Default::default()
            })
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    orders: Option<&'a FractionalOrders>,
}

impl<'a> Ctx<'a> {
    fn pde(&self) -> Result<(&'a OperatorSpec, &'a FractionalOrders), String> {
        match (self.cfg.operator.as_ref(), self.orders) {
            (Some(op), Some(o)) => Ok((op, o)),
            _ => Err("operator and orders required".into()),
        }
    }

    /// Closed form for −u″, finite differences otherwise.
    fn eigensystem(&self, modes: usize) -> Result<Arc<EigenSystem>, String> {
        let (op, _) = self.pde()?;
        if op.is_laplacian() {
            dirichlet_laplacian_eigensystem(op.length(), modes).map_err(err)
        } else {
            sturm_liouville_eigensystem(op, self.cfg.fd_points, modes).map_err(err)
        }
    }

    fn maxprin(&self) -> RunResult {
        let Kind::VerifyMaxprin {
            strict,
            initial,
            samples,
            seed,
            modal,
            t_min,
            x,
            x0,
            times,
            tol,
        } = &self.cfg.kind
        else {
            unreachable!()
        };
        let (op, orders) = self.pde()?;
        let es = self.eigensystem(modal.modes)?;
        let ts = times.points(op.length());
        let t_lo = t_min.unwrap_or_else(|| ts.iter().copied().fold(f64::INFINITY, f64::min));
        let sign = match initial.nonnegative() {
            Some(true) => DataSign::Nonnegative,
            _ => DataSign::SignChanging,
        };
        let mut r = rng(*seed);
        let mut reports = Vec::new();
        let mut passed = true;
        let (mut violations, mut min_value, mut longest) = (0usize, f64::INFINITY, 0usize);
        let mut trace = None;
        for _ in 0..*samples {
            let a = modal_data(initial, &es, modal.modes, &mut r)?;
            let sol = solve_homogeneous(&a, orders, modal.trunc_tol, t_lo).map_err(err)?;
            if *strict {
                let x0 = x0.expect("validated");
                let rep = verify_strict_positivity(&sol, x0, &ts, *tol).map_err(err)?;
                passed &= rep.passed();
                min_value = min_value.min(rep.min_value);
                longest = longest.max(rep.longest_refined_run);
                if trace.is_none() {
                    let u = sol.eval_grid(&[x0], &ts).map_err(err)?;
                    trace = Some(csv(
                        &[],
                        "t,x,u",
                        ts.iter().zip(&u).map(|(t, row)| vec![*t, x0, row[0]]),
                    ));
                }
                reports.push(serde_json::to_value(&rep).map_err(err)?);
            } else {
                let xs = x.as_ref().expect("validated").points(op.length());
                let rep = verify_weak_maximum(&sol, &xs, &ts, *tol, Some(sign)).map_err(err)?;
                passed &= rep.passed();
                violations += rep.violations;
                min_value = min_value.min(rep.min_value);
                reports.push(serde_json::to_value(&rep).map_err(err)?);
            }
        }
        let s = if *strict {
            json!({ "check": "strict", "samples": samples, "min_value": min_value, "longest_refined_run": longest })
        } else {
            json!({ "check": "weak", "samples": samples, "violations": violations, "min_value": min_value })
        };
        Ok(Report {
            summary: summary(s),
            artifact: json!({ "check": if *strict { "strict" } else { "weak" }, "tolerance": tol, "reports": reports }),
            passed: Some(passed),
            csv: trace,
            observation_csv: None,
        })
    }

    fn invert(&self) -> RunResult {
        let Kind::Invert {
            observation,
            rho,
            g,
            g_nonnegative,
            modal,
            x0,
            horizon,
            steps,
            graded,
            noise,
            seed,
            samples,
            regularization,
            tolerance,
            uniqueness_tol,
        } = &self.cfg.kind
        else {
            unreachable!()
        };
        let (_, orders) = self.pde()?;
        let es = self.eigensystem(modal.modes)?;
        let mut r = rng(*seed);
        let g_modal = modal_data(g, &es, modal.modes, &mut r)?;
        let g_sign = match g_nonnegative.or(g.nonnegative()) {
            Some(true) => Some(DataSign::Nonnegative),
            Some(false) => Some(DataSign::SignChanging),
            None => None,
        };
        let opts = ReconstructionOptions {
            regularization: regularization.resolve(*noise),
            ..Default::default()
        };

        let mut cases: Vec<(Observation, Option<Box<dyn Fn(f64) -> f64 + Sync>>)> = Vec::new();
        match (observation, rho) {
            (Some(path), _) => cases.push((read_observation(path, *x0, *noise, g_sign)?, None)),
            (None, Some(rho)) => {
                // synthesized on a grid twice as fine and sampled at the coarse nodes
                let fine = time_grid(*horizon, 2 * steps, *graded, orders)?;
                for s in 0..*samples {
                    let f = rho.realize(*horizon, &mut r);
                    let src = SourceSpec::new(
                        SampledFunction::from_fn(fine.clone(), &f),
                        g_modal.clone(),
                    )
                    .map_err(err)?;
                    let nm = (*noise > 0.0).then(|| NoiseModel {
                        level: *noise,
                        seed: seed.wrapping_add(s as u64 + 1),
                    });
                    let obs =
                        synthesize_observation(&src, orders, *x0, modal.trunc_tol, nm, g_sign)
                            .and_then(|o| o.subsample(2))
                            .map_err(err)?;
                    cases.push((obs, Some(f)));
                }
            }
            (None, None) => return Err("no observation source".into()),
        }

        let mut results = Vec::new();
        let mut worst: Option<f64> = None;
        let mut first = None;
        for (obs, truth) in &cases {
            let rec = reconstruct_rho_with(obs, &g_modal, orders, &opts).map_err(err)?;
            let error = truth.as_ref().map(|f| reconstruction_error(&rec.rho, f));
            if let Some(e) = error {
                worst = Some(worst.map_or(e, |w: f64| w.max(e)));
            }
            results.push(json!({
                "residual": rec.residual,
                "min_diagonal": rec.min_diagonal,
                "penalty": rec.penalty,
                "error": error,
            }));
            if first.is_none() {
                first = Some(rec);
            }
        }
        let (obs, _) = &cases[0];
        let rec = first.expect("at least one case");
        let mut passed = None;
        if let (Some(tol), Some(w)) = (tolerance, worst) {
            passed = Some(w <= *tol);
        }
        let verdict = match uniqueness_tol {
            Some(tol) => {
                let v = uniqueness_test(obs, &g_modal, orders, *tol).map_err(err)?;
                if v.applicable {
                    passed = Some(passed.unwrap_or(true) && v.holds);
                }
                Some(v)
            }
            None => None,
        };
        let nodes = obs.grid().nodes();
        let rows =
            (0..nodes.len()).map(|k| vec![nodes[k], rec.rho.cofactors()[k], rec.mu.cofactors()[k]]);
        let recon_csv = csv(&[], "t,rho,mu_cofactor", rows);
        let obs_csv = observation_csv(obs, orders);
        Ok(Report {
            summary: summary(json!({
                "samples": cases.len(),
                "residual": rec.residual,
                "min_diagonal": rec.min_diagonal,
                "worst_error": worst,
                "rho_max_abs": rec.rho.max_abs(),
                "verdict": verdict.as_ref().map(|v| v.message.clone()),
            })),
            artifact: json!({
                "x0": obs.x0(),
                "noise": obs.noise(),
                "regularization": format!("{:?}", opts.regularization),
                "residual": rec.residual,
                "conditioning": { "min_diagonal": rec.min_diagonal },
                "penalty": rec.penalty,
                "worst_error": worst,
                "tolerance": tolerance,
                "cases": results,
                "uniqueness": verdict,
            }),
            passed,
            csv: Some(recon_csv),
            observation_csv: Some(obs_csv),
        })
    }

    fn oracle_compare(&self) -> RunResult {
        let Kind::OracleCompare {
            initial,
            source,
            modal,
            horizon,
            steps,
            points,
            source_steps,
            t_from,
            stride,
            tolerance,
        } = &self.cfg.kind
        else {
            unreachable!()
        };
        let (op, orders) = self.pde()?;
        let es = self.eigensystem(modal.modes)?;
        let h = op.mesh_width(*points);
        let xs: Vec<f64> = (0..points + 2).map(|i| i as f64 * h).collect();
        let grid = Arc::new(TimeGrid::uniform(*horizon, *steps).map_err(err)?);
        let mut r = rng(0);

        let mut a0 = vec![0.0; points + 2];
        let mut homogeneous = None;
        if let Some(init) = initial {
            let a = modal_data(init, &es, modal.modes, &mut r)?;
            a0 = pointwise(init, &a, op.length(), &xs, &mut rng(0));
            homogeneous =
                Some(solve_homogeneous(&a, orders, modal.trunc_tol, *t_from).map_err(err)?);
        }
        let mut forced = None;
        let oracle_source = match source {
            Some((rho, g)) => {
                let gm = modal_data(g, &es, modal.modes, &mut r)?;
                let gx = pointwise(g, &gm, op.length(), &xs, &mut rng(0));
                let f = rho.realize(*horizon, &mut r);
                let rho_k: Vec<f64> = grid.nodes().iter().map(|&t| f(t)).collect();
                let sgrid = time_grid(*horizon, *source_steps, true, orders)?;
                let src = SourceSpec::new(SampledFunction::from_fn(sgrid, &f), gm).map_err(err)?;
                forced = Some(solve_source_duhamel(&src, orders, modal.trunc_tol).map_err(err)?);
                SpaceTimeSource::Separable { rho: rho_k, g: gx }
            }
            None => SpaceTimeSource::Zero,
        };
        let oracle =
            solve_l1_oracle(&a0, &oracle_source, orders, op, *points, &grid).map_err(err)?;

        let ks: Vec<usize> = (0..=grid.steps())
            .filter(|&k| grid.node(k) >= *t_from && k % (*stride).max(1) == 0)
            .collect();
        let ts: Vec<f64> = ks.iter().map(|&k| grid.node(k)).collect();
        let mut spectral = vec![vec![0.0; xs.len()]; ts.len()];
        for sol in homogeneous.iter().chain(forced.iter()) {
            for (row, part) in spectral
                .iter_mut()
                .zip(sol.eval_grid(&xs, &ts).map_err(err)?)
            {
                row.iter_mut().zip(part).for_each(|(a, b)| *a += b);
            }
        }
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        let mut rows = Vec::new();
        for (i, &k) in ks.iter().enumerate() {
            for (j, &x) in xs.iter().enumerate() {
                let (o, s) = (oracle.values[k][j], spectral[i][j]);
                diff = diff.max((o - s).abs());
                scale = scale.max(s.abs());
                rows.push(vec![ts[i], x, o, s]);
            }
        }
        let rel = if scale > 0.0 { diff / scale } else { diff };
        Ok(Report {
            summary: summary(
                json!({ "relative_linf": rel, "tolerance": tolerance, "steps": steps, "points": points }),
            ),
            artifact: json!({
                "relative_linf": rel,
                "absolute_linf": diff,
                "tolerance": tolerance,
                "steps": steps,
                "points": points,
                "t_from": t_from,
                "compared_times": ts.len(),
            }),
            passed: Some(rel <= *tolerance),
            csv: Some(csv(&[], "t,x,u_oracle,u_spectral", rows)),
            observation_csv: None,
        })
    }
}

/// Graded for the leading order, or uniform.
fn time_grid(
    horizon: f64,
    steps: usize,
    graded: bool,
    orders: &FractionalOrders,
) -> Result<Arc<TimeGrid>, String> {
    let g = if graded {
        TimeGrid::graded_for(horizon, steps, orders.alpha1())
    } else {
        TimeGrid::uniform(horizon, steps)
    };
    g.map(Arc::new).map_err(err)
}

fn modal_data(
    spec: &SpatialSpec,
    es: &Arc<EigenSystem>,
    modes: usize,
    r: &mut ChaCha8Rng,
) -> Result<ModalCoefficients, String> {
    match spec {
        SpatialSpec::Mode(k) => ModalCoefficients::unit(k - 1, modes, es.clone()).map_err(err),
        _ => project_fn(spec.realize(es.length(), r), es, modes).map_err(err),
    }
}

/// Pointwise samples; eigenfunctions come from their modal form.
fn pointwise(
    spec: &SpatialSpec,
    modal: &ModalCoefficients,
    length: f64,
    xs: &[f64],
    r: &mut ChaCha8Rng,
) -> Vec<f64> {
    match spec {
        SpatialSpec::Mode(_) => xs.iter().map(|&x| modal.eval(x)).collect(),
        _ => {
            let f = spec.realize(length, r);
            let mut v: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            // Dirichlet ends
            v[0] = 0.0;
            *v.last_mut().unwrap() = 0.0;
            v
        }
    }
}

fn field_report(values: &[Vec<f64>], xs: &[f64], ts: &[f64], modes: usize) -> RunResult {
    let rows = ts
        .iter()
        .zip(values)
        .flat_map(|(t, row)| xs.iter().zip(row).map(move |(x, u)| vec![*t, *x, *u]));
    let max_abs = values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let s = json!({ "times": ts.len(), "points": xs.len(), "modes": modes, "max_abs": max_abs });
    Ok(Report {
        summary: summary(s.clone()),
        artifact: s,
        passed: None,
        csv: Some(csv(&[], "t,x,u", rows)),
        observation_csv: None,
    })
}

fn run_ml_eval(
    beta0: f64,
    beta: &[f64],
    z: &[f64],
    tol: f64,
    expect: Option<(f64, f64)>,
) -> RunResult {
    let args = MlArguments::new(beta0, beta.to_vec(), z.to_vec()).map_err(err)?;
    let v = ml_eval(&args, tol).map_err(err)?;
    let mut s = summary(json!({
        "value": v.value,
        "abs_error_estimate": v.abs_error_estimate,
        "terms_used": v.terms_used,
        "precision_escalated": v.precision_escalated,
    }));
    let mut passed = None;
    if let Some((e, t)) = expect {
        let dev = (v.value - e).abs();
        s.insert("expected".into(), json!(e));
        s.insert("deviation".into(), json!(dev));
        passed = Some(dev <= t);
    }
    Ok(Report {
        artifact: Value::Object(s.clone()),
        summary: s,
        passed,
        ..Default::default()
    })
}

fn run_ml_identities(kind: &Kind) -> RunResult {
    let &Kind::MlIdentities {
        remainder,
        samples,
        seed,
        tol,
        threshold,
        ell_max,
        m_max,
        beta0_range,
        beta_range,
        z_range,
    } = kind
    else {
        unreachable!()
    };
    let mut r = rng(seed);
    let mut ctx = MlContext::new();
    let opts = MlOptions::default();
    let mut worst = 0.0f64;
    let mut worst_args = None;
    for _ in 0..samples {
        let m = r.gen_range(1..=m_max.max(1));
        let beta0 = r.gen_range(beta0_range.0..=beta0_range.1);
        let beta: Vec<f64> = (0..m)
            .map(|_| r.gen_range(beta_range.0..=beta_range.1))
            .collect();
        let z: Vec<f64> = (0..m).map(|_| r.gen_range(z_range.0..=z_range.1)).collect();
        let args = MlArguments::new(beta0, beta, z).map_err(err)?;
        let d = if remainder {
            let mut d = 0.0f64;
            for ell in 1..=ell_max {
                let p = ml_remainder_with(ell, &args, tol, &opts, &mut ctx).map_err(err)?;
                d = d.max((p.direct_tail - p.identity_value).abs());
            }
            d
        } else {
            ml_recurrence_residual_with(&args, tol, &opts, &mut ctx).map_err(err)?
        };
        if d > worst || worst_args.is_none() {
            worst = worst.max(d);
            worst_args = Some(json!({ "beta0": args.beta0, "beta": args.beta, "z": args.z }));
        }
    }
    let name = if remainder { "remainder" } else { "recurrence" };
    let s = json!({ "identity": name, "samples": samples, "max_deviation": worst, "threshold": threshold });
    let mut artifact = s.clone();
    artifact["worst_arguments"] = worst_args.unwrap_or(Value::Null);
    Ok(Report {
        summary: summary(s),
        artifact,
        passed: Some(worst <= threshold),
        ..Default::default()
    })
}

fn run_abel(
    orders: &FractionalOrders,
    rho: &TemporalSpec,
    horizon: f64,
    steps: &[usize],
    graded: bool,
    variation_tol: f64,
    residual_tol: f64,
) -> RunResult {
    let f = rho.realize(horizon, &mut rng(0));
    let opts = AbelOptions {
        residual_threshold: f64::INFINITY,
        ..Default::default()
    };
    let mut levels = Vec::new();
    let mut last = None;
    for &k in steps {
        let grid = time_grid(horizon, k, graded, orders)?;
        let sol = solve_abel_system_with(&SampledFunction::from_fn(grid, &f), orders, &opts)
            .map_err(err)?;
        // cofactors are t^{1−α₁} μ(t)
        let sup = sol
            .mu
            .cofactors()
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        levels.push(json!({ "steps": k, "sup_scaled_mu": sup, "residual": sol.residual, "min_diagonal": sol.min_diagonal }));
        last = Some((sup, sol));
    }
    let sups: Vec<f64> = levels
        .iter()
        .map(|l| l["sup_scaled_mu"].as_f64().unwrap())
        .collect();
    let variation = sups
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / w[0].abs())
        .fold(0.0f64, f64::max);
    let residual = levels
        .iter()
        .map(|l| l["residual"].as_f64().unwrap())
        .fold(0.0f64, f64::max);
    let (_, sol) = last.ok_or("no step counts")?;
    let nodes = sol.mu.grid().nodes();
    let rows = nodes
        .iter()
        .zip(sol.mu.cofactors())
        .map(|(t, c)| vec![*t, *c]);
    Ok(Report {
        summary: summary(
            json!({ "sup_scaled_mu": sups, "variation": variation, "max_residual": residual }),
        ),
        artifact: json!({ "levels": levels, "variation": variation, "variation_tol": variation_tol, "residual_tol": residual_tol }),
        passed: Some(variation < variation_tol && residual <= residual_tol),
        csv: Some(csv(&[], "t,mu_cofactor", rows)),
        observation_csv: None,
    })
}

/// m ≤ m_max orders in (0.05, 0.95), q₁ = 1, λ log-uniform in [0.1, 100].
fn random_orders(r: &mut ChaCha8Rng, m_max: usize) -> Result<(FractionalOrders, f64), String> {
    let m = r.gen_range(1..=m_max.max(1));
    let mut alpha: Vec<f64> = (0..m).map(|_| r.gen_range(0.05..0.95)).collect();
    alpha.sort_by(|a, b| b.total_cmp(a));
    alpha.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let q: Vec<f64> = (0..alpha.len())
        .map(|j| if j == 0 { 1.0 } else { r.gen_range(0.1..3.0) })
        .collect();
    let lambda = 10f64.powf(r.gen_range(-1.0..2.0));
    Ok((FractionalOrders::new(alpha, q).map_err(err)?, lambda))
}

/// Relative L² error (trapezoidal), or the sup norm of the estimate when ρ ≡ 0.
fn reconstruction_error(est: &SampledFunction, exact: &dyn Fn(f64) -> f64) -> f64 {
    let nodes = est.grid().nodes();
    let v = est.cofactors();
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..nodes.len() - 1 {
        let h = nodes[k + 1] - nodes[k];
        let e = |i: usize| v[i] - exact(nodes[i]);
        num += 0.5 * h * (e(k).powi(2) + e(k + 1).powi(2));
        den += 0.5 * h * (exact(nodes[k]).powi(2) + exact(nodes[k + 1]).powi(2));
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        est.max_abs()
    }
}

fn observation_csv(obs: &Observation, orders: &FractionalOrders) -> String {
    let list = |v: &[f64]| {
        v.iter()
            .map(|x| crate::output::num(*x))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let comments = vec![
        format!("x0 = {}", crate::output::num(obs.x0())),
        format!("horizon = {}", crate::output::num(obs.grid().horizon())),
        format!("steps = {}", obs.grid().steps()),
        format!("grading = {}", crate::output::num(obs.grid().grading())),
        format!("alpha = {}", list(orders.alpha())),
        format!("q = {}", list(orders.q())),
        format!(
            "g_nonnegative = {}",
            match obs.g_sign() {
                Some(DataSign::Nonnegative) => "true",
                Some(DataSign::SignChanging) => "false",
                None => "unknown",
            }
        ),
    ];
    let rows = obs
        .grid()
        .nodes()
        .iter()
        .zip(obs.values())
        .map(|(t, u)| vec![*t, *u]);
    csv(&comments, "t,u", rows)
}

/// Reads a `t,u` observation written by [`observation_csv`].
fn read_observation(
    path: &std::path::Path,
    x0: f64,
    noise: f64,
    g_sign: Option<DataSign>,
) -> Result<Observation, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut meta = std::collections::BTreeMap::new();
    let (mut ts, mut us) = (Vec::new(), Vec::new());
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line == "t,u" {
            continue;
        }
        let (t, u) = line
            .split_once(',')
            .ok_or_else(|| format!("{}: malformed row `{line}`", path.display()))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("{}: `{s}`: {e}", path.display()))
        };
        ts.push(parse(t)?);
        us.push(parse(u)?);
    }
    let field = |k: &str| -> Result<f64, String> {
        meta.get(k)
            .ok_or_else(|| format!("{}: header lacks `{k}`", path.display()))?
            .parse::<f64>()
            .map_err(|e| format!("{}: {k}: {e}", path.display()))
    };
    if let Ok(file_x0) = field("x0") {
        if (file_x0 - x0).abs() > 1e-12 * x0.abs().max(1.0) {
            return Err(format!(
                "observation sensor {file_x0} differs from scenario x0 = {x0}"
            ));
        }
    }
    let horizon = field("horizon")?;
    let grading = field("grading").unwrap_or(1.0);
    let steps = ts
        .len()
        .checked_sub(1)
        .filter(|s| *s > 0)
        .ok_or("observation needs at least two rows")?;
    let grid = Arc::new(TimeGrid::new(horizon, steps, grading).map_err(err)?);
    for (k, t) in ts.iter().enumerate() {
        if (t - grid.node(k)).abs() > 1e-12 * horizon {
            return Err(format!(
                "observation time {t} is not node {k} of the declared grid"
            ));
        }
    }
    Observation::new(x0, grid, us, noise, g_sign).map_err(err)
}
