//! The experiments. Each takes a resolved config, writes its series into the
//! output directory and returns its checks and report sections.

use serde::Serialize;

use dissipde::analysis::semigroup::{estimate_functional, gradient_bounds};
use dissipde::analysis::stats::mean_se;
use dissipde::analysis::ultrabound::{fit_envelope_lambda, BOUND_SLACK};
use dissipde::analysis::{
    check_contraction_bound, check_gradient_estimate, check_harnack, check_hyperbound_condition,
    density_bound_rhs, estimate_invariant, harnack_constant, lyapunov_drift_check, ou_exact,
    ou_mean_variance, ultrabound_envelope, Estimate, Functional, HarnackReport, TestFunction,
    UltraboundSpec,
};
use dissipde::coupling::{girsanov_moment_bound, run_coupling_batch, simulate_coupled, xi_schedule, CouplingConfig};
use dissipde::monotone::YosidaParams;
use dissipde::sde::{self, IntegratorConfig};
use dissipde::spectral::ModelSpec;
use dissipde::SpectralModel;

use crate::config::{regularize, ConfigError, ExperimentConfig, Params};
use crate::report::{Cell, Check, Findings, Output};
use crate::{CliError, Experiment};

type Run = Result<Findings, CliError>;

pub fn run(experiment: Experiment, cfg: &ExperimentConfig, out: &mut Output) -> Run {
    match experiment {
        Experiment::Simulate => simulate(cfg, out),
        Experiment::Couple => couple(cfg, out),
        Experiment::Harnack => harnack(cfg, out),
        Experiment::Gradient => gradient(cfg, out),
        Experiment::Invariant => invariant(cfg, out),
        Experiment::Ultrabound => ultrabound(cfg, out),
        Experiment::YosidaTable => yosida_table(cfg, out),
    }
}

fn build(spec: &ModelSpec) -> Result<SpectralModel, CliError> {
    SpectralModel::from_spec(spec).map_err(|e| CliError::Config(ConfigError::new("model", e.to_string())))
}

fn model_of(cfg: &ExperimentConfig) -> Result<(SpectralModel, &ModelSpec), CliError> {
    let spec = cfg.model()?;
    Ok((build(spec)?, spec))
}

fn integrator(cfg: &ExperimentConfig, t_end: f64) -> IntegratorConfig {
    IntegratorConfig {
        dt: cfg.params.dt(),
        scheme: cfg.params.scheme(),
        t_end,
        seed: cfg.seed,
        stream_id: 0,
    }
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn test_function(p: &Params, experiment: Experiment, n: usize) -> TestFunction {
    p.test_function
        .clone()
        .unwrap_or_else(|| crate::config::default_test_function(experiment, n))
}

/// `f^p` as a test function of the same family, when the family is closed
/// under powers.
pub fn power_of(f: &TestFunction, p: f64) -> Option<TestFunction> {
    match f {
        TestFunction::ExpLinear { h, lambda } => Some(TestFunction::ExpLinear {
            h: h.clone(),
            lambda: lambda * p,
        }),
        TestFunction::GaussianBump { center, width } => Some(TestFunction::GaussianBump {
            center: center.clone(),
            width: width / p.sqrt(),
        }),
        TestFunction::Constant { value } => Some(TestFunction::Constant { value: value.powf(p) }),
        _ => None,
    }
}

/// Closed-form Harnack ratio `(p_t f(x))^p / (p_t f^p(y) · C)` for linear models.
pub fn exact_harnack_ratio(model: &SpectralModel, t: f64, x: &[f64], y: &[f64], f: &TestFunction, p: f64) -> Option<f64> {
    let fp = power_of(f, p)?;
    let lhs = ou_exact(model, t, x, f).ok()?.powf(p);
    let rhs = ou_exact(model, t, y, &fp).ok()?;
    let c = harnack_constant(model.sigma_inv_norm(), p, model.omega(), t, distance(x, y));
    Some(lhs / (rhs * c))
}

fn harnack_check(name: String, r: &HarnackReport) -> Check {
    Check::new(name, r.lhs, r.rhs_expectation * r.constant, r.pass)
        .constant(r.constant)
        .ratio(r.ratio)
        .se(r.rel_se * r.ratio)
}

fn simulate(cfg: &ExperimentConfig, out: &mut Output) -> Run {
    let (model, _) = model_of(cfg)?;
    let p = &cfg.params;
    let n = model.dim();
    let x0 = p.x0(n);
    let icfg = integrator(cfg, p.t());
    let rec = sde::simulate(&model, &icfg, &x0)?;
    out.write_with("path.csv", |w| sde::write_csv(&rec, w))?;
    out.write_with("path.bin", |w| sde::write_binary(&rec, w))?;
    let mut f = Findings::default();
    f.section("final_state", rec.final_state())?;
    f.section("steps", rec.times.len().saturating_sub(1))?;
    if let (Some(n_paths), Ok((mean, var))) = (p.n_paths, ou_mean_variance(&model, p.t(), &x0)) {
        let exact: f64 = mean.iter().zip(&var).map(|(m, v)| m * m + v).sum();
        let est = estimate_functional(&model, &icfg.with_stream(1), &x0, n_paths, sq_norm)?;
        f.check(Check::agrees("second_moment", &est, exact, 3.0));
    }
    Ok(f)
}

#[derive(Serialize)]
struct MomentRow {
    p: f64,
    q: f64,
    moment: f64,
    moment_se: f64,
    lhs: f64,
    bound: f64,
    ratio: f64,
}

fn couple(cfg: &ExperimentConfig, out: &mut Output) -> Run {
    let (model, _) = model_of(cfg)?;
    let p = &cfg.params;
    let n = model.dim();
    let (x0, y0) = (p.x0(n), p.y0(n));
    let horizon = p.t();
    let glue_tol = p.glue_tol.unwrap_or_else(|| dissipde::coupling::default_glue_tol(distance(&x0, &y0)));
    let ccfg = CouplingConfig::new(integrator(cfg, horizon), p.p(), glue_tol);
    let n_paths = p.n_paths();
    let paths = run_coupling_batch(&model, &ccfg, &x0, &y0, n_paths)?;
    let d0 = distance(&x0, &y0);
    let mut f = Findings::default();

    let coupled = paths.iter().filter(|s| s.coupled()).count();
    let fraction = coupled as f64 / n_paths as f64;
    f.check(Check::new("coupled_fraction", fraction, 0.99, fraction >= 0.99));
    let excess = paths.iter().map(|s| s.contraction_excess).fold(f64::NEG_INFINITY, f64::max);
    f.check(Check::new("contraction_nonincreasing", excess, 0.0, excess <= 0.0));
    let split = paths.iter().filter(|s| !s.identical_after_tau).count();
    f.check(Check::new("identical_after_tau", split as f64, 0.0, split == 0));

    let r: Vec<f64> = paths.iter().map(|s| s.log_r.exp()).collect();
    let e = mean_se(&r);
    f.check(Check::agrees("girsanov_martingale", &e, 1.0, 3.0));

    let s = model.sigma_inv_norm();
    let mut rows = Vec::new();
    for pp in p.p_grid() {
        let q = pp / (pp - 1.0);
        let m = mean_se(&paths.iter().map(|s| (q * s.log_r).exp()).collect::<Vec<_>>());
        let lhs = m.mean.powf(pp - 1.0);
        // delta method for the (p-1)th power
        let lhs_se = (pp - 1.0) * m.mean.powf(pp - 2.0) * m.se;
        let bound = girsanov_moment_bound(s, pp, model.omega(), horizon, d0);
        let rel = lhs_se / lhs;
        f.check(
            Check::new(format!("girsanov_moment_p{pp}"), lhs, bound, lhs <= bound * (1.0 + 3.0 * rel))
                .ratio(lhs / bound)
                .se(lhs_se),
        );
        rows.push(MomentRow {
            p: pp,
            q,
            moment: m.mean,
            moment_se: m.se,
            lhs,
            bound,
            ratio: lhs / bound,
        });
    }

    let taus: Vec<f64> = paths.iter().filter(|s| s.coupled()).map(|s| s.tau).collect();
    f.section(
        "coupling",
        serde_json::json!({
            "n_paths": n_paths,
            "dist0": d0,
            "glue_tol": glue_tol,
            "fraction_coupled": fraction,
            "mean_tau": if taus.is_empty() { None } else { Some(mean_se(&taus).mean) },
            "max_final_distance": paths.iter().map(|s| s.final_distance).fold(0.0, f64::max),
            "max_increment": paths.iter().map(|s| s.max_increment).fold(f64::NEG_INFINITY, f64::max),
            "girsanov_mean": e,
            "moments": rows,
        }),
    )?;

    let table: Vec<Vec<Cell>> = paths
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                i.into(),
                s.tau.into(),
                s.log_r.into(),
                s.contraction_excess.into(),
                s.final_distance.into(),
            ]
        })
        .collect();
    out.csv(
        "coupling_paths.csv",
        &["path", "tau", "log_r", "contraction_excess", "final_distance"],
        &table,
    )?;
    let rec = simulate_coupled(&model, &ccfg, &x0, &y0)?;
    let series: Vec<Vec<Cell>> = rec
        .x_path
        .times
        .iter()
        .zip(rec.x_path.states.iter().zip(&rec.y_path.states))
        .zip(&rec.contraction_series)
        .map(|((t, (x, y)), c)| {
            vec![
                (*t).into(),
                distance(x, y).into(),
                (*c).into(),
                xi_schedule(model.omega(), horizon, d0, *t).into(),
            ]
        })
        .collect();
    out.csv("contraction_series.csv", &["t", "distance", "contraction", "xi"], &series)?;
    Ok(f)
}

#[derive(Serialize)]
struct SweepRow {
    alpha: f64,
    beta: f64,
    dt: f64,
    ratio: f64,
    rel_se: f64,
    pass: bool,
}

fn harnack(cfg: &ExperimentConfig, out: &mut Output) -> Run {
    let (model, spec) = model_of(cfg)?;
    let p = &cfg.params;
    let n = model.dim();
    let (x, y) = (p.x0(n), p.y0(n));
    let fun = test_function(p, Experiment::Harnack, n);
    let (pp, t, n_paths) = (p.p(), p.t(), p.n_paths());
    let mut f = Findings::default();

    let rep = check_harnack(&model, &integrator(cfg, t), &x, &y, &fun, pp, n_paths)?;
    f.check(harnack_check("harnack".into(), &rep));
    let exact = exact_harnack_ratio(&model, t, &x, &y, &fun, pp);
    if let Some(er) = exact {
        f.check(Check::new("harnack_exact", er, 1.0, er <= 1.0 + 1e-10));
        let se = rep.rel_se * rep.ratio;
        f.check(
            Check::new("harnack_mc_vs_exact", rep.ratio, er, (rep.ratio - er).abs() <= 3.0 * se).se(se),
        );
    }
    f.section("harnack", &rep)?;
    f.section("exact_ratio", exact)?;

    if let Some(grid) = &p.t_grid {
        let mut rows = Vec::new();
        // each horizon gets its own block of 2 n_paths streams
        for (i, &tg) in grid.iter().enumerate() {
            let ic = integrator(cfg, tg).with_stream(2 * n_paths as u64 * (i as u64 + 1));
            let r = check_harnack(&model, &ic, &x, &y, &fun, pp, n_paths)?;
            f.check(harnack_check(format!("harnack_t{tg}"), &r));
            let er = exact_harnack_ratio(&model, tg, &x, &y, &fun, pp);
            rows.push(vec![tg.into(), r.ratio.into(), r.rel_se.into(), r.constant.into(), er.unwrap_or(f64::NAN).into()]);
        }
        out.csv("harnack_ratio.csv", &["t", "ratio", "rel_se", "constant", "exact_ratio"], &rows)?;
    }

    if let Some(betas) = &p.beta_sweep {
        let sweep = harnack_sweep(cfg, spec, &x, &y, &fun, betas, &mut f)?;
        let rows: Vec<Vec<Cell>> = sweep
            .iter()
            .map(|r| vec![r.alpha.into(), r.beta.into(), r.dt.into(), r.ratio.into(), r.rel_se.into(), r.pass.into()])
            .collect();
        out.csv("harnack_sweep.csv", &["alpha", "beta", "dt", "ratio", "rel_se", "pass"], &rows)?;
    }
    Ok(f)
}

fn monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0]) || v.windows(2).all(|w| w[1] >= w[0])
}

/// Two-level grid in the order of the double limit: `β → 0` at each fixed
/// `α`, then `α → 0`. Monotonicity is reported, not enforced.
fn harnack_sweep(
    cfg: &ExperimentConfig,
    spec: &ModelSpec,
    x: &[f64],
    y: &[f64],
    fun: &TestFunction,
    betas: &[f64],
    f: &mut Findings,
) -> Result<Vec<SweepRow>, CliError> {
    let p = &cfg.params;
    let mut alphas = p
        .alpha_sweep
        .clone()
        .or_else(|| spec.drift.yosida_alpha().map(|a| vec![a]))
        .ok_or_else(|| ConfigError::new("params.beta_sweep", "needs a Yosida drift or params.alpha_sweep"))?;
    let mut betas = betas.to_vec();
    alphas.sort_by(|a, b| b.total_cmp(a));
    betas.sort_by(|a, b| b.total_cmp(a));
    let n_paths = p.n_paths();
    let mut rows = Vec::new();
    let mut per_alpha = Vec::new();
    let mut limits = Vec::new();
    for &a in &alphas {
        let mut ratios = Vec::new();
        for &b in &betas {
            let m = build(&regularize(spec, Some(a), Some((b, p.smoothing_nodes(), cfg.seed)))?)?;
            let dt = if p.allow_dt_override { p.dt() } else { p.dt().min(a / 4.0) };
            let ic = IntegratorConfig {
                dt,
                ..integrator(cfg, p.t())
            };
            let r = check_harnack(&m, &ic, x, y, fun, p.p(), n_paths)?;
            f.check(harnack_check(format!("harnack_alpha{a}_beta{b}"), &r));
            ratios.push(r.ratio);
            rows.push(SweepRow {
                alpha: a,
                beta: b,
                dt,
                ratio: r.ratio,
                rel_se: r.rel_se,
                pass: r.pass,
            });
        }
        per_alpha.push(serde_json::json!({ "alpha": a, "monotone_in_beta": monotone(&ratios) }));
        limits.push(*ratios.last().unwrap_or(&f64::NAN));
    }
    f.section(
        "sweep",
        serde_json::json!({
            "rows": &rows,
            "per_alpha": per_alpha,
            "monotone_in_alpha_at_smallest_beta": monotone(&limits),
        }),
    )?;
    Ok(rows)
}

fn gradient(cfg: &ExperimentConfig, _out: &mut Output) -> Run {
    let (model, _) = model_of(cfg)?;
    let p = &cfg.params;
    let n = model.dim();
    let (x, y) = (p.x0(n), p.y0(n));
    let fun = test_function(p, Experiment::Gradient, n);
    let t = p.t();
    let mut f = Findings::default();
    let rep = check_gradient_estimate(&model, &integrator(cfg, t), &x, &y, &fun, p.n_paths())?;
    let d = rep.difference.abs();
    if rep.bound.is_finite() {
        f.check(Check::upper("gradient_sup", d, rep.bound, rep.se).ratio(d / rep.bound));
    } else {
        f.warnings.push("test function is unbounded; the sup-norm gradient bound is vacuous and was skipped".into());
    }
    if let Some(lb) = rep.lipschitz_bound {
        f.check(Check::upper("gradient_lipschitz", d, lb, rep.se).ratio(d / lb));
    }
    if let (Ok(fx), Ok(fy)) = (ou_exact(&model, t, &x, &fun), ou_exact(&model, t, &y, &fun)) {
        let exact = fx - fy;
        let (sup, lip) = gradient_bounds(model.sigma_inv_norm(), model.omega(), t, distance(&x, &y), &fun);
        if sup.is_finite() {
            f.check(Check::new("gradient_exact_sup", exact.abs(), sup, exact.abs() <= sup));
        }
        if let Some(l) = lip {
            f.check(Check::new("gradient_exact_lipschitz", exact.abs(), l, exact.abs() <= l));
        }
        f.check(
            Check::new(
                "gradient_mc_vs_exact",
                rep.difference,
                exact,
                (rep.difference - exact).abs() <= 3.0 * rep.se,
            )
            .se(rep.se),
        );
        f.section("exact_difference", exact)?;
    }
    f.section("gradient", &rep)?;
    Ok(f)
}

fn default_functionals(model: &SpectralModel, spec: &ModelSpec, f: &mut Findings) -> Vec<Functional> {
    let mut v = vec![Functional::AbsMoment { m: 1.0 }, Functional::AbsMoment { m: 2.0 }];
    match model.theta(None) {
        Ok(_) => v.push(Functional::Theta),
        Err(e) => f.warnings.push(format!("theta moment skipped: {e}")),
    }
    if let (Some(_), Some(s)) = (model.lift(), spec.drift.scalar()) {
        v.push(Functional::GSquared { m: s.growth.m });
    }
    v.extend((1..=model.dim()).map(|k| Functional::Mode { k, power: 2 }));
    v
}

fn invariant(cfg: &ExperimentConfig, out: &mut Output) -> Run {
    let (model, spec) = model_of(cfg)?;
    let p = &cfg.params;
    let n = model.dim();
    let x0 = p.x0(n);
    let mut f = Findings::default();
    let functionals = match &p.functionals {
        Some(v) => v.clone(),
        None => default_functionals(&model, spec, &mut f),
    };
    let icfg = integrator(cfg, p.horizon());
    let est = estimate_invariant(&model, &icfg, &x0, p.burn_in(), p.horizon(), &functionals, p.thin())?;

    if let (true, Some(sig)) = (model.drift_field().is_zero(), model.sigma().as_diagonal()) {
        let var: Vec<f64> = model.a_eigs().iter().zip(&sig).map(|(a, s)| s * s / (-2.0 * a)).collect();
        for (k, v) in var.iter().enumerate() {
            if let Some(e) = est.moments.get(&Functional::Mode { k: k + 1, power: 2 }.name()) {
                f.check(Check::agrees(format!("stationary_variance_mode{}", k + 1), e, *v, 3.0));
            }
        }
        if let (Some(e), Ok(th)) = (est.moments.get("theta"), model.theta(None)) {
            let exact: f64 = th
                .lambda_eigs()
                .iter()
                .zip(th.q_coeffs())
                .zip(&var)
                .map(|((l, q), v)| l / q * v)
                .sum();
            f.check(Check::agrees("theta_moment", e, exact, 3.0));
        }
        if let Some(e) = est.moments.get("abs_moment_2") {
            f.check(Check::agrees("second_moment", e, var.iter().sum(), 3.0));
        }
    }
    f.section("invariant", &est)?;

    if !est.samples.is_empty() {
        if let Ok(theta) = model.theta(None) {
            let m = spec.drift.scalar().map_or(1.0, |s| s.growth.m as f64);
            f.section("lyapunov", lyapunov_drift_check(&model, &theta, &est.samples, m)?)?;
        }
        if est.samples.len() >= 8 {
            let s = model.sigma_inv_norm();
            let threshold = 2.0 * model.omega().min(0.0).powi(2) * s * s;
            let grid = p.lambda_grid.clone().unwrap_or_else(|| {
                let mut g = vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
                if threshold > 0.0 {
                    g.extend([threshold, 2.0 * threshold]);
                }
                g
            });
            f.section("hyperbound", check_hyperbound_condition(&est.samples, &grid, model.omega(), s)?)?;
            let rhs = density_bound_rhs(&est.samples, &x0, p.p(), model.omega(), p.t(), s)?;
            f.section("density_bound_rhs", serde_json::json!({ "x": x0, "p": p.p(), "t": p.t(), "value": rhs }))?;
        }
        let rows: Vec<Vec<Cell>> = est.samples.iter().map(|x| x.iter().map(|v| Cell::Num(*v)).collect()).collect();
        let header: Vec<String> = (1..=n).map(|k| format!("mode_{k}")).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        out.csv("invariant_samples.csv", &header, &rows)?;
    }

    if let Some(alphas) = &p.alpha_sweep {
        alpha_sweep(cfg, spec, &x0, alphas, &mut f, out)?;
    }
    Ok(f)
}

/// Moments of the regularized invariant measures along `α`; each pair of
/// levels must agree within 4 combined standard errors.
fn alpha_sweep(
    cfg: &ExperimentConfig,
    spec: &ModelSpec,
    x0: &[f64],
    alphas: &[f64],
    f: &mut Findings,
    out: &mut Output,
) -> Result<(), CliError> {
    let p = &cfg.params;
    let fs = [Functional::AbsMoment { m: 1.0 }, Functional::AbsMoment { m: 2.0 }];
    let mut levels: Vec<(f64, f64, Vec<Estimate>)> = Vec::new();
    for &a in alphas {
        let m = build(&regularize(spec, Some(a), None)?)?;
        let dt = if p.allow_dt_override { p.dt() } else { p.dt().min(a / 4.0) };
        let ic = IntegratorConfig {
            dt,
            ..integrator(cfg, p.horizon())
        };
        let est = estimate_invariant(&m, &ic, x0, p.burn_in(), p.horizon(), &fs, 0)?;
        levels.push((a, dt, fs.iter().map(|g| est.moments[&g.name()]).collect()));
    }
    for (gi, g) in fs.iter().enumerate() {
        for i in 0..levels.len() {
            for j in i + 1..levels.len() {
                let (ei, ej) = (levels[i].2[gi], levels[j].2[gi]);
                let se = ei.se.hypot(ej.se);
                f.check(
                    Check::new(
                        format!("alpha_sweep_{}_{}_vs_{}", g.name(), levels[i].0, levels[j].0),
                        ei.mean,
                        ej.mean,
                        (ei.mean - ej.mean).abs() <= 4.0 * se,
                    )
                    .se(se),
                );
            }
        }
    }
    let rows: Vec<Vec<Cell>> = levels
        .iter()
        .map(|(a, dt, e)| {
            let mut r = vec![Cell::Num(*a), Cell::Num(*dt)];
            for x in e {
                r.push(x.mean.into());
                r.push(x.se.into());
            }
            r
        })
        .collect();
    out.csv(
        "invariant_sweep.csv",
        &["alpha", "dt", "abs_moment_1", "abs_moment_1_se", "abs_moment_2", "abs_moment_2_se"],
        &rows,
    )?;
    f.section(
        "alpha_sweep",
        levels
            .iter()
            .map(|(a, dt, e)| serde_json::json!({ "alpha": a, "dt": dt, "abs_moment_1": e[0], "abs_moment_2": e[1] }))
            .collect::<Vec<_>>(),
    )?;
    Ok(())
}

fn ultrabound(cfg: &ExperimentConfig, out: &mut Output) -> Run {
    let sec = cfg
        .ultrabound
        .as_ref()
        .ok_or_else(|| ConfigError::new("ultrabound", "this experiment needs an [ultrabound] section"))?;
    let spec = UltraboundSpec {
        phi: sec.phi.clone(),
        c: sec.c,
        a: sec.a,
    };
    let t_max = sec.t_max.unwrap_or(20.0);
    let t_points = sec.t_points.unwrap_or(200);
    let grid: Vec<f64> = (1..=t_points).map(|i| t_max * i as f64 / t_points as f64).collect();
    let level = spec.case1_level();
    let y0s = sec.y0.clone().unwrap_or_else(|| vec![0.0, level, 10.0 * level]);
    let mut f = Findings::default();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (i, &y0) in y0s.iter().enumerate() {
        let r = check_contraction_bound(&spec, y0, &grid)?;
        f.check(Check::new(format!("contraction_y0_{i}"), r.max_excess, BOUND_SLACK, r.bound_holds));
        if r.case1 {
            let top = r.points.iter().map(|p| p.y).fold(y0, f64::max);
            f.check(Check::new(format!("case1_y0_{i}"), top, level, r.case1_holds));
        }
        rows.extend(r.points.iter().map(|p| vec![Cell::Num(y0), p.t.into(), p.y.into(), p.bound.into()]));
        reports.push(serde_json::json!({
            "y0": y0,
            "max_excess": r.max_excess,
            "bound_holds": r.bound_holds,
            "case1": r.case1,
            "case1_holds": r.case1_holds,
        }));
    }
    out.csv("ultrabound_series.csv", &["y0", "t", "y", "bound"], &rows)?;
    f.section("case1_level", level)?;
    f.section("contraction", reports)?;

    let omega = sec.omega.unwrap_or(1.0);
    let lambda = match &sec.observations {
        Some(obs) => {
            let l = fit_envelope_lambda(&spec, omega, obs)?;
            f.section("fitted_lambda", l)?;
            Some(l)
        }
        None => sec.lambda,
    };
    if let Some(l) = lambda {
        let env = grid
            .iter()
            .map(|&t| ultrabound_envelope(&spec, l, omega, t))
            .collect::<Result<Vec<_>, _>>()?;
        let nonincreasing = env.windows(2).all(|w| w[1] <= w[0]);
        f.section(
            "envelope",
            serde_json::json!({ "lambda": l, "omega": omega, "nonincreasing": nonincreasing }),
        )?;
        let rows: Vec<Vec<Cell>> = grid.iter().zip(&env).map(|(t, e)| vec![Cell::Num(*t), Cell::Num(*e)]).collect();
        out.csv("ultrabound_envelope.csv", &["t", "envelope"], &rows)?;
    }
    Ok(f)
}

/// Tolerance for `|F_α| ≤ |F₀|`, which holds exactly in exact arithmetic.
const DOMINATION_TOL: f64 = 1e-12;

fn yosida_table(cfg: &ExperimentConfig, out: &mut Output) -> Run {
    let sec = cfg
        .yosida_table
        .as_ref()
        .ok_or_else(|| ConfigError::new("yosida_table", "missing [yosida_table] section"))?;
    let scalar = sec
        .scalar
        .clone()
        .or_else(|| cfg.model.as_ref().and_then(|m| m.drift.scalar().cloned()))
        .unwrap_or_else(dissipde::ScalarMapSpec::neg_sign);
    let map = scalar.build()?;
    let alphas = sec.alpha_grid.clone().unwrap_or_else(|| vec![1.0, 0.1]);
    let rs = sec
        .r_grid
        .clone()
        .unwrap_or_else(|| (0..=16).map(|i| -2.0 + 0.25 * i as f64).collect());
    let mut rows = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0usize;
    // err[alpha][r] at continuity points
    let mut errs: Vec<Vec<Option<f64>>> = Vec::new();
    for &a in &alphas {
        let yp = YosidaParams::new(a)?;
        let mut col = Vec::new();
        for &r in &rs {
            let j = map.resolvent(&yp, r)?;
            let fa = map.yosida(&yp, r)?;
            let f0 = map.minimal_section(r);
            let diff = fa.abs() - f0.abs();
            let bad = diff > DOMINATION_TOL * (1.0 + f0.abs());
            violations += bad as usize;
            worst = worst.max(diff);
            let continuous = map.jumps().iter().all(|jp| jp.at != r);
            col.push(continuous.then(|| (fa - map.value(r)).abs()));
            rows.push(vec![
                Cell::Num(a),
                r.into(),
                j.into(),
                fa.into(),
                f0.into(),
                diff.into(),
                Cell::Int(bad as u64),
            ]);
        }
        errs.push(col);
    }
    out.csv("yosida_table.csv", &["alpha", "r", "J", "F_alpha", "F0", "abs_diff", "violation"], &rows)?;
    let mut f = Findings::default();
    f.check(Check::new("domination", worst, 0.0, violations == 0));
    if alphas.len() >= 2 {
        let (hi, lo) = (argmax(&alphas), argmin(&alphas));
        let mut gain = f64::NEG_INFINITY;
        for (e_lo, e_hi) in errs[lo].iter().zip(&errs[hi]) {
            if let (Some(l), Some(h)) = (e_lo, e_hi) {
                gain = gain.max(l - h);
            }
        }
        f.check(Check::new("convergence", gain, 0.0, gain <= DOMINATION_TOL));
    }
    f.section("domination_violations", violations)?;
    f.section("scalar", &scalar)?;
    Ok(f)
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] < v[b] { i } else { b })
}
