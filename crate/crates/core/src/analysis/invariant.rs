//! Long-run behaviour: time averages along one path, the Lyapunov drift of
//! `φ(x) = Σ x_i²/q_i`, exponential-square integrability diagnostics, and
//! the density-norm bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::stats::{quantile, Estimate};
use crate::error::{check_dim, invalid, Result};
use crate::monotone::Selection;
use crate::sde::{simulate_with, IntegratorConfig};
use crate::spectral::{SpectralModel, ThetaFunctional};

/// Quantities averaged along a stationary path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    /// `|x|^m`
    AbsMoment { m: f64 },
    /// `Θ(x)` with the model's `q`.
    Theta,
    /// `G(x)²` on the sine-basis grid.
    GSquared { m: u32 },
    /// `e^{λ|x|²}`
    ExpQuadratic { lambda: f64 },
    /// `x_k^power` for the 1-based mode `k`.
    Mode { k: usize, power: i32 },
}

impl Functional {
    pub fn name(&self) -> String {
        match self {
            Self::AbsMoment { m } => format!("abs_moment_{m}"),
            Self::Theta => "theta".into(),
            Self::GSquared { m } => format!("g_squared_{m}"),
            Self::ExpQuadratic { lambda } => format!("exp_quadratic_{lambda}"),
            Self::Mode { k, power } => format!("mode_{k}_pow_{power}"),
        }
    }
}

enum Evaluator<'a> {
    Abs(f64),
    Theta(ThetaFunctional),
    G(&'a crate::spectral::NemytskiiLift, u32),
    Exp(f64),
    Mode(usize, i32),
}

impl Evaluator<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        let sq = || x.iter().map(|v| v * v).sum::<f64>();
        Ok(match self {
            Self::Abs(m) => sq().sqrt().powf(*m),
            Self::Theta(t) => t.value(x)?,
            Self::G(lift, m) => lift.g_functional(x, *m)?.powi(2),
            Self::Exp(l) => (l * sq()).exp(),
            Self::Mode(k, p) => x[*k].powi(*p),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantEstimate {
    /// Yosida parameter of the drift, when regularized.
    pub alpha: Option<f64>,
    pub burn_in: f64,
    pub horizon: f64,
    /// Time averages with batch-means standard errors, keyed by functional name.
    pub moments: BTreeMap<String, Estimate>,
    /// States after burn-in, every `thin`-th step; empty when `thin == 0`.
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
}

/// Number of batches for batch-means standard errors.
pub const BATCHES: usize = 50;

fn model_alpha(model: &SpectralModel) -> Option<f64> {
    model.drift_field().scalar().and_then(|s| match &s.selection {
        Selection::Yosida(p) => Some(p.alpha),
        Selection::MinimalSection => None,
    })
}

/// Time averages over `(burn_in, horizon]` of one path from `x0` with the
/// step, scheme and noise of `cfg` (its `t_end` is replaced by `horizon`).
pub fn estimate_invariant(
    model: &SpectralModel,
    cfg: &IntegratorConfig,
    x0: &[f64],
    burn_in: f64,
    horizon: f64,
    functionals: &[Functional],
    thin: usize,
) -> Result<InvariantEstimate> {
    if !(burn_in >= 0.0 && horizon > burn_in) {
        return Err(invalid("horizon", format!("need horizon > burn_in >= 0, got {horizon} and {burn_in}")));
    }
    check_dim(model.dim(), x0.len())?;
    let mut evals = Vec::with_capacity(functionals.len());
    for f in functionals {
        evals.push(match f {
            Functional::AbsMoment { m } => Evaluator::Abs(*m),
            Functional::Theta => Evaluator::Theta(model.theta(None)?),
            Functional::GSquared { m } => Evaluator::G(
                model
                    .lift()
                    .ok_or_else(|| invalid("functionals", "g_squared needs the Dirichlet sine basis"))?,
                *m,
            ),
            Functional::ExpQuadratic { lambda } => Evaluator::Exp(*lambda),
            Functional::Mode { k, power } => {
                if *k == 0 || *k > model.dim() {
                    return Err(invalid("functionals", format!("mode {k} outside 1..={}", model.dim())));
                }
                Evaluator::Mode(k - 1, *power)
            }
        });
    }
    let run = cfg.with_t_end(horizon);
    let grid = run.grid();
    let first = (0..=grid.steps).find(|&k| grid.time(k) > burn_in).unwrap_or(grid.steps + 1);
    let kept = (grid.steps + 1).saturating_sub(first);
    if kept < BATCHES {
        return Err(invalid("horizon", "too few steps after burn_in for batch means"));
    }
    let batch_len = kept / BATCHES;
    let mut batch_sums = vec![vec![0.0; BATCHES]; evals.len()];
    let mut samples = Vec::new();
    let mut failure = None;
    simulate_with(model, &run, x0, |k, _, x, _| {
        if k < first || failure.is_some() {
            return;
        }
        let idx = k - first;
        let b = idx / batch_len;
        if b >= BATCHES {
            return;
        }
        for (sums, e) in batch_sums.iter_mut().zip(&evals) {
            match e.eval(x) {
                Ok(v) => sums[b] += v,
                Err(err) => failure = Some(err),
            }
        }
        if thin > 0 && idx % thin == 0 {
            samples.push(x.to_vec());
        }
    })?;
    if let Some(err) = failure {
        return Err(err);
    }
    let mut moments = BTreeMap::new();
    for (f, sums) in functionals.iter().zip(&batch_sums) {
        let means: Vec<f64> = sums.iter().map(|s| s / batch_len as f64).collect();
        let e = crate::analysis::stats::mean_se(&means);
        moments.insert(f.name(), Estimate { n: BATCHES * batch_len, ..e });
    }
    Ok(InvariantEstimate {
        alpha: model_alpha(model),
        burn_in,
        horizon,
        moments,
        samples,
    })
}

/// `L φ(x) = Σ q_i⁻¹ |σ* e_i|² + 2 Σ q_i⁻¹ x_i (a_i x_i + F_i(x))` for `φ = Σ x_i²/q_i`.
pub fn generator_phi(model: &SpectralModel, theta: &ThetaFunctional, x: &[f64]) -> Result<f64> {
    check_dim(model.dim(), x.len())?;
    check_dim(theta.dim(), x.len())?;
    let f = model.drift(x)?;
    let q = theta.q_coeffs();
    let trace: f64 = (0..x.len()).map(|i| model.sigma().column_norm_sq(i) / q[i]).sum();
    let drift: f64 = (0..x.len())
        .map(|i| 2.0 * x[i] * (model.a_eigs()[i] * x[i] + f[i]) / q[i])
        .sum();
    Ok(trace + drift)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub n_samples: usize,
    /// Growth exponent used in `|x|^{m+1}`.
    pub m: f64,
    /// `‖σ‖² Σ q_i⁻¹`
    pub noise_constant: f64,
    /// Smallest `c₁` making the inequality hold on 95% of the samples.
    pub c1_q95: f64,
    /// Smallest `c₁` making it hold on all samples.
    pub c1_sup: f64,
    /// Fraction of samples violating the inequality at `c1_q95`.
    pub violation_fraction: f64,
    /// `L φ(0)`
    pub origin_value: f64,
}

/// Calibrates `c₁` in
/// `L φ(x) ≤ -2Θ(x) + c₁(1 + |x|^{m+1} + Θ(x)^{1/2}|x|) + ‖σ‖² Σ q_i⁻¹`.
pub fn lyapunov_drift_check(
    model: &SpectralModel,
    theta: &ThetaFunctional,
    samples: &[Vec<f64>],
    m: f64,
) -> Result<LyapunovReport> {
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("samples", "must be finite"));
    }
    let noise_constant = model.sigma().norm().powi(2) * theta.q_inverse_sum();
    let mut needed = Vec::with_capacity(samples.len());
    for x in samples {
        let lphi = generator_phi(model, theta, x)?;
        let th = theta.value(x)?;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let weight = 1.0 + r.powf(m + 1.0) + th.sqrt() * r;
        needed.push(((lphi + 2.0 * th - noise_constant) / weight).max(0.0));
    }
    let c1_q95 = quantile(&needed, 0.95).max(0.0);
    let c1_sup = needed.iter().copied().fold(0.0, f64::max);
    let violations = needed.iter().filter(|v| **v > c1_q95).count();
    Ok(LyapunovReport {
        n_samples: samples.len(),
        m,
        noise_constant,
        c1_q95: if samples.is_empty() { 0.0 } else { c1_q95 },
        c1_sup,
        violation_fraction: if samples.is_empty() {
            0.0
        } else {
            violations as f64 / samples.len() as f64
        },
        origin_value: generator_phi(model, theta, &vec![0.0; model.dim()])?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperboundRow {
    pub lambda: f64,
    /// Empirical `μ(e^{λ|x|²})`.
    pub estimate: f64,
    /// Largest single term over the total.
    pub max_share: f64,
    /// `|mean(all) / mean(first quarter) - 1|`.
    pub prefix_drift: f64,
    pub stable: bool,
    pub above_threshold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperboundReport {
    /// `2 (ω ∧ 0)² ‖σ⁻¹‖²`
    pub threshold: f64,
    pub rows: Vec<HyperboundRow>,
    pub smallest_stable_above_threshold: Option<f64>,
}

/// Tail diagnostics: a mean dominated by one sample, or one that keeps
/// growing with the sample size, is treated as divergent.
pub const MAX_SHARE: f64 = 0.01;
pub const MAX_PREFIX_DRIFT: f64 = 0.05;

fn log_mean_exp(v: &[f64]) -> (f64, f64) {
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = v.iter().map(|x| (x - mx).exp()).sum();
    (mx + s.ln() - (v.len() as f64).ln(), 1.0 / s)
}

pub fn check_hyperbound_condition(
    samples: &[Vec<f64>],
    lambda_grid: &[f64],
    omega: f64,
    sigma_inv_norm: f64,
) -> Result<HyperboundReport> {
    if samples.len() < 8 {
        return Err(invalid("samples", "need at least 8 samples"));
    }
    let threshold = 2.0 * omega.min(0.0).powi(2) * sigma_inv_norm * sigma_inv_norm;
    let sq: Vec<f64> = samples.iter().map(|x| x.iter().map(|v| v * v).sum()).collect();
    let quarter = sq.len() / 4;
    let mut rows = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let logs: Vec<f64> = sq.iter().map(|s| lambda * s).collect();
        let (lm, share) = log_mean_exp(&logs);
        let (lq, _) = log_mean_exp(&logs[..quarter]);
        let prefix_drift = (lm - lq).exp_m1().abs();
        let stable = share <= MAX_SHARE && prefix_drift <= MAX_PREFIX_DRIFT;
        rows.push(HyperboundRow {
            lambda,
            estimate: lm.exp(),
            max_share: share,
            prefix_drift,
            stable,
            above_threshold: lambda > threshold,
        });
    }
    let smallest_stable_above_threshold = rows
        .iter()
        .filter(|r| r.stable && r.above_threshold)
        .map(|r| r.lambda)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.min(l))));
    Ok(HyperboundReport {
        threshold,
        rows,
        smallest_stable_above_threshold,
    })
}

/// `1 / μ̂(exp[-‖σ⁻¹‖² p ω |x - y|² / (1 - e^{-2ωt})])` over samples `y`.
pub fn density_bound_rhs(samples: &[Vec<f64>], x: &[f64], p: f64, omega: f64, t: f64, sigma_inv_norm: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("samples", "must be nonempty"));
    }
    if !(p > 1.0 && t > 0.0) {
        return Err(invalid("p", "need p > 1 and t > 0"));
    }
    let rate = if omega.abs() < 1e-12 {
        1.0 / (2.0 * t)
    } else {
        omega / -(-2.0 * omega * t).exp_m1()
    };
    let k = sigma_inv_norm * sigma_inv_norm * p * rate;
    let logs: Vec<f64> = samples
        .iter()
        .map(|y| -k * y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .collect();
    Ok((-log_mean_exp(&logs).0).exp())
}
