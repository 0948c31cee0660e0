//! Experiment configuration: one TOML document with the model, the numeric
//! parameters, and optional sections for the deterministic experiments.
//!
//! Loading goes text -> table -> overrides -> typed config -> resolved
//! config. The resolved config has every default the experiment uses filled
//! in; it is what the manifest stores and what a replay starts from.

use std::path::Path;

use serde::{Deserialize, Serialize};

use dissipde::analysis::{Functional, PhiSpec, TestFunction};
use dissipde::coupling::default_glue_tol;
use dissipde::sde::Scheme;
use dissipde::spectral::{DriftSpec, ModelSpec, SelectionSpec, SmoothingSpec};
use dissipde::ScalarMapSpec;

use crate::Experiment;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("invalid configuration: `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

type CfgResult<T> = Result<T, ConfigError>;

pub const DEFAULT_T: f64 = 1.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_P: f64 = 2.0;
pub const DEFAULT_N_PATHS: usize = 1000;
pub const DEFAULT_DISTANCE: f64 = 1.0;
pub const DEFAULT_BURN_IN: f64 = 10.0;
pub const DEFAULT_HORIZON: f64 = 1000.0;
pub const DEFAULT_THIN: usize = 100;
pub const DEFAULT_SMOOTHING_NODES: usize = 16;
/// Statistical experiments refuse smaller ensembles.
pub const MIN_PATHS: usize = 100;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ultrabound: Option<UltraboundSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yosida_table: Option<YosidaTableSection>,
}

/// Numeric parameters. Absent entries take the experiment's default.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Horizon `T` of the semigroup, coupling or path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Defaults to `x0 + distance · e_1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glue_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_function: Option<TestFunction>,
    /// Exponents of the Girsanov moment checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    /// Extra horizons for the Harnack ratio series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    /// Replaces the Yosida parameter of the model drift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Adds Gaussian smoothing of this width to the model drift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_sweep: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_sweep: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Keep every `thin`-th post-burn-in state as a sample of the invariant measure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals: Option<Vec<Functional>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    /// Accept `dt > alpha / 4`. Runs still carry a warning.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_dt_override: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UltraboundSection {
    pub phi: PhiSpec,
    pub a: f64,
    #[serde(default)]
    pub c: f64,
    /// Defaults to `0`, `Φ₀⁻¹(2a)` and `10 Φ₀⁻¹(2a)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Envelope constant; fitted from `observations` when those are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// `(t, log ratio)` pairs to fit the envelope constant against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YosidaTableSection {
    /// Defaults to the scalar of the model drift, then to `-sign`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ScalarMapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
}

pub struct Bundled {
    pub name: &'static str,
    /// Experiment the config was written for.
    pub experiment: Experiment,
    pub text: &'static str,
}

pub const BUNDLED: &[Bundled] = &[
    Bundled {
        name: "ou_1mode",
        experiment: Experiment::Harnack,
        text: include_str!("../configs/ou_1mode.toml"),
    },
    Bundled {
        name: "ou_8mode",
        experiment: Experiment::Couple,
        text: include_str!("../configs/ou_8mode.toml"),
    },
    Bundled {
        name: "example54_n8_alpha1e-2",
        experiment: Experiment::Harnack,
        text: include_str!("../configs/example54_n8_alpha1e-2.toml"),
    },
    Bundled {
        name: "ultrabound_power2",
        experiment: Experiment::Ultrabound,
        text: include_str!("../configs/ultrabound_power2.toml"),
    },
];

pub fn bundled(name: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name)
}

/// Reads `source` as a file path, falling back to a bundled config name.
pub fn load_source(source: &str) -> CfgResult<String> {
    let path = Path::new(source);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("{source}: {e}")));
    }
    let name = source.strip_suffix(".toml").unwrap_or(source);
    bundled(name).map(|b| b.text.to_string()).ok_or_else(|| {
        let names: Vec<&str> = BUNDLED.iter().map(|b| b.name).collect();
        ConfigError::new(
            "config",
            format!("`{source}` is neither a file nor a bundled config ({})", names.join(", ")),
        )
    })
}

/// Sets a dotted key such as `params.p` to a TOML literal. Values that do not
/// parse as TOML are taken as strings.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> CfgResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new("override", format!("expected key=value, got `{assignment}`")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(ConfigError::new("override", format!("malformed key `{key}`")));
    }
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().unwrap_or(key);
    let mut node = table;
    for (depth, part) in parts.iter().enumerate() {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry.as_table_mut().ok_or_else(|| {
            ConfigError::new(parts[..=depth].join("."), "cannot override inside a non-table value")
        })?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// Parses config text, applies overrides and the seed, and returns the
/// unresolved config.
pub fn parse(text: &str, overrides: &[String], seed: Option<u64>) -> CfgResult<ExperimentConfig> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    if let Some(s) = seed {
        let s = i64::try_from(s).map_err(|_| ConfigError::new("seed", "must fit in a signed 64-bit integer"))?;
        table.insert("seed".into(), toml::Value::Integer(s));
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::new("config", e.to_string().trim_end().to_string()))
}

fn unit(n: usize, k: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = scale;
    v
}

impl Params {
    pub fn t(&self) -> f64 {
        self.t.unwrap_or(DEFAULT_T)
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(DEFAULT_DT)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme.unwrap_or(Scheme::ExponentialEuler)
    }

    pub fn p(&self) -> f64 {
        self.p.unwrap_or(DEFAULT_P)
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths.unwrap_or(DEFAULT_N_PATHS)
    }

    pub fn x0(&self, n: usize) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| vec![0.0; n])
    }

    pub fn y0(&self, n: usize) -> Vec<f64> {
        self.y0.clone().unwrap_or_else(|| {
            let d = self.distance.unwrap_or(DEFAULT_DISTANCE);
            self.x0(n).iter().zip(unit(n, 0, d)).map(|(a, b)| a + b).collect()
        })
    }

    pub fn p_grid(&self) -> Vec<f64> {
        self.p_grid.clone().unwrap_or_else(|| vec![1.5, 2.0, 4.0])
    }

    pub fn burn_in(&self) -> f64 {
        self.burn_in.unwrap_or(DEFAULT_BURN_IN)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(DEFAULT_HORIZON)
    }

    pub fn thin(&self) -> usize {
        self.thin.unwrap_or(DEFAULT_THIN)
    }

    pub fn smoothing_nodes(&self) -> usize {
        self.smoothing_nodes.unwrap_or(DEFAULT_SMOOTHING_NODES)
    }
}

/// Sets the Yosida parameter and, with `beta`, Gaussian smoothing of a
/// regularized drift.
pub fn regularize(model: &ModelSpec, alpha: Option<f64>, beta: Option<(f64, usize, u64)>) -> CfgResult<ModelSpec> {
    let mut m = model.clone();
    match &mut m.drift {
        DriftSpec::Nemytskii {
            selection, smoothing, ..
        }
        | DriftSpec::Coordinatewise {
            selection, smoothing, ..
        } => {
            if let Some(a) = alpha {
                *selection = match selection {
                    SelectionSpec::Yosida {
                        bisection_tol, max_iter, ..
                    } => SelectionSpec::Yosida {
                        alpha: a,
                        bisection_tol: *bisection_tol,
                        max_iter: *max_iter,
                    },
                    SelectionSpec::Minimal => SelectionSpec::yosida(a),
                };
            }
            if let Some((b, nodes, seed)) = beta {
                *smoothing = Some(SmoothingSpec {
                    beta: b,
                    node_count: nodes,
                    node_seed: seed,
                    b_coeffs: smoothing.as_ref().and_then(|s| s.b_coeffs.clone()),
                });
            }
        }
        _ => {
            if alpha.is_some() || beta.is_some() {
                return Err(ConfigError::new(
                    "params.alpha",
                    "alpha and beta need a nemytskii or coordinatewise drift",
                ));
            }
        }
    }
    Ok(m)
}

fn positive(field: &str, v: f64) -> CfgResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {v}")))
    }
}

fn p_constraint(field: &str, p: f64) -> CfgResult<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must satisfy p > 1, got {p}")))
    }
}

fn check_len(field: &str, v: &[f64], n: usize) -> CfgResult<()> {
    if v.len() != n {
        return Err(ConfigError::new(field, format!("has length {}, model dimension is {n}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(ConfigError::new(field, "entries must be finite"));
    }
    Ok(())
}

fn nonempty_positive(field: &str, v: &[f64]) -> CfgResult<()> {
    if v.is_empty() {
        return Err(ConfigError::new(field, "must be nonempty"));
    }
    v.iter().try_for_each(|x| positive(field, *x))
}

/// A validated config with all defaults the experiment uses written out.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    pub fn model(&self) -> CfgResult<&ModelSpec> {
        self.model
            .as_ref()
            .ok_or_else(|| ConfigError::new("model", "this experiment needs a [model] section"))
    }

    /// Validates for `experiment` and fills in defaults.
    pub fn resolve(&self, experiment: Experiment) -> CfgResult<Resolved> {
        let mut cfg = self.clone();
        let mut warnings = Vec::new();
        match experiment {
            Experiment::Ultrabound => resolve_ultrabound(&mut cfg)?,
            Experiment::YosidaTable => resolve_yosida_table(&mut cfg)?,
            _ => resolve_stochastic(&mut cfg, experiment, &mut warnings)?,
        }
        Ok(Resolved { config: cfg, warnings })
    }
}

fn resolve_stochastic(cfg: &mut ExperimentConfig, experiment: Experiment, warnings: &mut Vec<String>) -> CfgResult<()> {
    let beta = match cfg.params.beta {
        Some(b) => {
            positive("params.beta", b)?;
            Some((b, cfg.params.smoothing_nodes(), cfg.seed))
        }
        None => None,
    };
    if let Some(a) = cfg.params.alpha {
        positive("params.alpha", a)?;
    }
    let model = regularize(cfg.model()?, cfg.params.alpha, beta)?;
    let p = &mut cfg.params;
    let n = model.dimension;
    if n == 0 {
        return Err(ConfigError::new("model.dimension", "must be >= 1"));
    }

    let dt = p.dt();
    positive("params.dt", dt)?;
    // Sweeps shrink dt per level to min(dt, alpha / 4); only the base model
    // is held to the rule here.
    if let Some(sweep) = &p.alpha_sweep {
        nonempty_positive("params.alpha_sweep", sweep)?;
        if model.drift.scalar().is_none() {
            return Err(ConfigError::new("params.alpha_sweep", "needs a nemytskii or coordinatewise drift"));
        }
    }
    if let Some(a) = model.drift.yosida_alpha() {
        if dt > a / 4.0 {
            let msg = format!("dt = {dt} exceeds alpha / 4 = {} for the Yosida drift", a / 4.0);
            if p.allow_dt_override {
                warnings.push(format!("{msg}; accepted because allow_dt_override is set"));
            } else {
                return Err(ConfigError::new(
                    "params.dt",
                    format!("{msg}; lower dt or set params.allow_dt_override = true"),
                ));
            }
        }
    }
    if let Some(sweep) = &p.beta_sweep {
        nonempty_positive("params.beta_sweep", sweep)?;
        if model.drift.scalar().is_none() {
            return Err(ConfigError::new("params.beta_sweep", "needs a nemytskii or coordinatewise drift"));
        }
    }

    let statistical = matches!(experiment, Experiment::Couple | Experiment::Harnack | Experiment::Gradient);
    let needs_horizon = !matches!(experiment, Experiment::Invariant);
    if needs_horizon || p.t.is_some() {
        positive("params.t", p.t())?;
    }
    if statistical || p.n_paths.is_some() {
        if p.n_paths() < MIN_PATHS {
            return Err(ConfigError::new(
                "params.n_paths",
                format!("statistical experiments need n_paths >= {MIN_PATHS}, got {}", p.n_paths()),
            ));
        }
    }
    if matches!(experiment, Experiment::Couple | Experiment::Harnack | Experiment::Invariant) || p.p.is_some() {
        p_constraint("params.p", p.p())?;
    }
    check_len("params.x0", &p.x0(n), n)?;
    if let Some(d) = p.distance {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(ConfigError::new("params.distance", "must be finite and >= 0"));
        }
    }
    check_len("params.y0", &p.y0(n), n)?;
    if let Some(f) = &p.test_function {
        f.validate(n).map_err(|e| ConfigError::new("params.test_function", e.to_string()))?;
    }

    p.dt = Some(dt);
    p.scheme = Some(p.scheme());
    p.x0 = Some(p.x0(n));
    match experiment {
        Experiment::Simulate => {
            p.t = Some(p.t());
        }
        Experiment::Couple => {
            for q in p.p_grid() {
                p_constraint("params.p_grid", q)?;
            }
            let y0 = p.y0(n);
            let d0 = p.x0(n).iter().zip(&y0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let tol = p.glue_tol.unwrap_or_else(|| default_glue_tol(d0));
            positive("params.glue_tol", tol)?;
            p.glue_tol = Some(tol);
            p.y0 = Some(y0);
            p.p_grid = Some(p.p_grid());
            p.t = Some(p.t());
            p.p = Some(p.p());
            p.n_paths = Some(p.n_paths());
        }
        Experiment::Harnack | Experiment::Gradient => {
            p.y0 = Some(p.y0(n));
            p.t = Some(p.t());
            p.n_paths = Some(p.n_paths());
            if experiment == Experiment::Harnack {
                p.p = Some(p.p());
                if let Some(g) = &p.t_grid {
                    nonempty_positive("params.t_grid", g)?;
                }
                if p.beta_sweep.is_some() {
                    p.smoothing_nodes = Some(p.smoothing_nodes());
                }
            }
            p.test_function.get_or_insert_with(|| default_test_function(experiment, n));
        }
        Experiment::Invariant => {
            let (b, h) = (p.burn_in(), p.horizon());
            if !(b >= 0.0 && h > b && h.is_finite()) {
                return Err(ConfigError::new(
                    "params.horizon",
                    format!("need horizon > burn_in >= 0, got horizon = {h}, burn_in = {b}"),
                ));
            }
            p.burn_in = Some(b);
            p.horizon = Some(h);
            p.thin = Some(p.thin());
            p.p = Some(p.p());
            p.t = Some(p.t());
        }
        Experiment::Ultrabound | Experiment::YosidaTable => unreachable!("deterministic experiments resolve separately"),
    }
    cfg.model = Some(model);
    Ok(())
}

pub fn default_test_function(experiment: Experiment, n: usize) -> TestFunction {
    match experiment {
        Experiment::Gradient => TestFunction::GaussianBump {
            center: vec![0.0; n],
            width: 1.0,
        },
        _ => TestFunction::ExpLinear {
            h: unit(n, 0, 1.0),
            lambda: 1.0,
        },
    }
}

fn resolve_ultrabound(cfg: &mut ExperimentConfig) -> CfgResult<()> {
    let sec = cfg
        .ultrabound
        .as_mut()
        .ok_or_else(|| ConfigError::new("ultrabound", "this experiment needs an [ultrabound] section"))?;
    let spec = dissipde::analysis::UltraboundSpec {
        phi: sec.phi.clone(),
        c: sec.c,
        a: sec.a,
    };
    spec.validate().map_err(|e| ConfigError::new("ultrabound", e.to_string()))?;
    let level = spec.case1_level();
    let y0 = sec.y0.clone().unwrap_or_else(|| vec![0.0, level, 10.0 * level]);
    if y0.is_empty() || y0.iter().any(|y| !(*y >= 0.0 && y.is_finite())) {
        return Err(ConfigError::new("ultrabound.y0", "must be a nonempty list of finite values >= 0"));
    }
    let t_max = sec.t_max.unwrap_or(20.0);
    positive("ultrabound.t_max", t_max)?;
    let t_points = sec.t_points.unwrap_or(200);
    if t_points == 0 {
        return Err(ConfigError::new("ultrabound.t_points", "must be >= 1"));
    }
    let omega = sec.omega.unwrap_or(1.0);
    if !omega.is_finite() || omega == 0.0 {
        return Err(ConfigError::new("ultrabound.omega", "must be finite and nonzero"));
    }
    if let Some(l) = sec.lambda {
        if !(l >= 0.0 && l.is_finite()) {
            return Err(ConfigError::new("ultrabound.lambda", "must be finite and >= 0"));
        }
    }
    if let Some(obs) = &sec.observations {
        if obs.iter().any(|(t, v)| !(*t > 0.0 && t.is_finite() && v.is_finite())) {
            return Err(ConfigError::new("ultrabound.observations", "need t > 0 and finite values"));
        }
    }
    sec.y0 = Some(y0);
    sec.t_max = Some(t_max);
    sec.t_points = Some(t_points);
    sec.omega = Some(omega);
    Ok(())
}

fn resolve_yosida_table(cfg: &mut ExperimentConfig) -> CfgResult<()> {
    let from_model = cfg.model.as_ref().and_then(|m| m.drift.scalar().cloned());
    let sec = cfg.yosida_table.get_or_insert(YosidaTableSection {
        scalar: None,
        alpha_grid: None,
        r_grid: None,
    });
    let scalar = sec.scalar.clone().or(from_model).unwrap_or_else(ScalarMapSpec::neg_sign);
    scalar
        .build()
        .map_err(|e| ConfigError::new("yosida_table.scalar", e.to_string()))?;
    let alphas = sec.alpha_grid.clone().unwrap_or_else(|| vec![1.0, 0.1]);
    nonempty_positive("yosida_table.alpha_grid", &alphas)?;
    let rs = sec
        .r_grid
        .clone()
        .unwrap_or_else(|| (0..=16).map(|i| -2.0 + 0.25 * i as f64).collect());
    if rs.is_empty() || rs.iter().any(|r| !r.is_finite()) {
        return Err(ConfigError::new("yosida_table.r_grid", "must be a nonempty list of finite values"));
    }
    sec.scalar = Some(scalar);
    sec.alpha_grid = Some(alphas);
    sec.r_grid = Some(rs);
    Ok(())
}
