//! Monte Carlo transition semigroup, Harnack and gradient checks, and the
//! Gaussian closed forms for linear models.

use serde::Serialize;

use crate::analysis::stats::{mean_se, par_indexed, Estimate};
use crate::analysis::TestFunction;
use crate::error::{check_dim, invalid, Error, Result};
use crate::sde::{simulate_final, stochastic_convolution_variance, IntegratorConfig};
use crate::spectral::SpectralModel;

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Mean of `g(X_T^x)` over `n` paths on streams `stream_id .. stream_id + n`.
pub fn estimate_functional<G>(model: &SpectralModel, cfg: &IntegratorConfig, x: &[f64], n: usize, g: G) -> Result<Estimate>
where
    G: Fn(&[f64]) -> f64 + Sync + Send,
{
    if n < 2 {
        return Err(invalid("n_paths", "need at least 2 paths"));
    }
    check_dim(model.dim(), x.len())?;
    let values = par_indexed(n, |i| {
        let c = cfg.with_stream(cfg.stream_id + i);
        Ok(g(&simulate_final(model, &c, x)?))
    })?;
    Ok(mean_se(&values))
}

/// `p̂_T f(x)` with `T = cfg.t_end`.
pub fn estimate_semigroup(
    model: &SpectralModel,
    cfg: &IntegratorConfig,
    x: &[f64],
    f: &TestFunction,
    n: usize,
) -> Result<Estimate> {
    f.validate(model.dim())?;
    estimate_functional(model, cfg, x, n, |z| f.eval(z))
}

/// `exp[‖σ⁻¹‖² p ω |x-y|² / ((p-1)(1 - e^{-2ωt}))]`; the `ω → 0` limit uses `|x-y|²/(2t)`.
pub fn harnack_constant(sigma_inv_norm: f64, p: f64, omega: f64, t: f64, dist: f64) -> f64 {
    let rate = if omega.abs() < 1e-12 {
        1.0 / (2.0 * t)
    } else {
        omega / -(-2.0 * omega * t).exp_m1()
    };
    (sigma_inv_norm * sigma_inv_norm * p * rate * dist * dist / (p - 1.0)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnackReport {
    /// `(p̂ f(x))^p`
    pub lhs: f64,
    pub lhs_se: f64,
    /// `p̂ f^p(y)`
    pub rhs_expectation: f64,
    pub rhs_se: f64,
    pub constant: f64,
    /// `lhs / (rhs_expectation · constant)`
    pub ratio: f64,
    /// Delta-method relative standard error of `ratio`.
    pub rel_se: f64,
    /// `(ratio - 1) / rel_se`; how far above 1 in standard errors.
    pub excess_se: f64,
    pub pass: bool,
}

impl HarnackReport {
    pub fn from_estimates(ex: Estimate, ey: Estimate, p: f64, constant: f64) -> Self {
        let lhs = ex.mean.powf(p);
        let lhs_se = p * ex.mean.powf(p - 1.0) * ex.se;
        let ratio = lhs / (ey.mean * constant);
        let rel_se = ((p * ex.rel_se()).powi(2) + ey.rel_se().powi(2)).sqrt();
        let excess_se = if ratio <= 1.0 {
            (ratio - 1.0) / rel_se.max(f64::MIN_POSITIVE)
        } else if rel_se == 0.0 {
            f64::INFINITY
        } else {
            (ratio - 1.0) / rel_se
        };
        Self {
            lhs,
            lhs_se,
            rhs_expectation: ey.mean,
            rhs_se: ey.se,
            constant,
            ratio,
            rel_se,
            excess_se,
            pass: ratio <= 1.0 + 3.0 * rel_se,
        }
    }
}

/// Harnack inequality at horizon `cfg.t_end`. The `x` side uses streams
/// `stream_id .. stream_id + n`, the `y` side the next `n`.
pub fn check_harnack(
    model: &SpectralModel,
    cfg: &IntegratorConfig,
    x: &[f64],
    y: &[f64],
    f: &TestFunction,
    p: f64,
    n: usize,
) -> Result<HarnackReport> {
    if !(p > 1.0) {
        return Err(invalid("p", format!("must satisfy p > 1, got {p}")));
    }
    if !(cfg.t_end > 0.0) {
        return Err(invalid("t_end", "must be > 0"));
    }
    f.validate(model.dim())?;
    check_dim(model.dim(), y.len())?;
    let ex = estimate_functional(model, cfg, x, n, |z| f.eval(z))?;
    let ey = estimate_functional(model, &cfg.with_stream(cfg.stream_id + n as u64), y, n, |z| f.eval_pow(z, p))?;
    let c = harnack_constant(model.sigma_inv_norm(), p, model.omega(), cfg.t_end, distance(x, y));
    Ok(HarnackReport::from_estimates(ex, ey, p, c))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientReport {
    /// `p̂ f(x) - p̂ f(y)` from paired paths.
    pub difference: f64,
    pub se: f64,
    /// `e^{|ω|t} / √(t ∧ 1) · ‖f‖_0 · ‖σ⁻¹‖ · |x - y|`
    pub bound: f64,
    pub pass: bool,
    /// `e^{|ω|t} ‖f‖_Lip |x - y|` when `f` is Lipschitz.
    pub lipschitz_bound: Option<f64>,
    pub lipschitz_pass: Option<bool>,
}

impl GradientReport {
    pub fn new(difference: f64, se: f64, sup_bound: f64, lipschitz_bound: Option<f64>) -> Self {
        let slack = 3.0 * se;
        Self {
            difference,
            se,
            bound: sup_bound,
            pass: difference.abs() <= sup_bound + slack,
            lipschitz_bound,
            lipschitz_pass: lipschitz_bound.map(|b| difference.abs() <= b + slack),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.pass && self.lipschitz_pass.unwrap_or(true)
    }
}

/// Right-hand sides of the gradient estimate and its Lipschitz variant.
pub fn gradient_bounds(
    sigma_inv_norm: f64,
    omega: f64,
    t: f64,
    dist: f64,
    f: &TestFunction,
) -> (f64, Option<f64>) {
    let growth = (omega.abs() * t).exp();
    let sup = growth / t.min(1.0).sqrt() * f.sup_norm() * sigma_inv_norm * dist;
    let lip = f.lipschitz().map(|l| growth * l * dist);
    (sup, lip)
}

/// Gradient estimate with common noise for the two starting points.
pub fn check_gradient_estimate(
    model: &SpectralModel,
    cfg: &IntegratorConfig,
    x: &[f64],
    y: &[f64],
    f: &TestFunction,
    n: usize,
) -> Result<GradientReport> {
    if !(cfg.t_end > 0.0) {
        return Err(invalid("t_end", "must be > 0"));
    }
    if n < 2 {
        return Err(invalid("n_paths", "need at least 2 paths"));
    }
    f.validate(model.dim())?;
    check_dim(model.dim(), x.len())?;
    check_dim(model.dim(), y.len())?;
    let diffs = par_indexed(n, |i| {
        let c = cfg.with_stream(cfg.stream_id + i);
        Ok(f.eval(&simulate_final(model, &c, x)?) - f.eval(&simulate_final(model, &c, y)?))
    })?;
    let e = mean_se(&diffs);
    let (sup, lip) = gradient_bounds(model.sigma_inv_norm(), model.omega(), cfg.t_end, distance(x, y), f);
    Ok(GradientReport::new(e.mean, e.se, sup, lip))
}

/// Exact mean `e^{tA} x` and per-mode variance of a zero-drift model with
/// diagonal noise.
pub fn ou_mean_variance(model: &SpectralModel, t: f64, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if !model.drift_field().is_zero() {
        return Err(Error::NotLinearModel);
    }
    let sigma = model.sigma().as_diagonal().ok_or(Error::NotLinearModel)?;
    check_dim(model.dim(), x.len())?;
    let a = model.a_eigs();
    let mean = a.iter().zip(x).map(|(a, x)| (a * t).exp() * x).collect();
    let var = a
        .iter()
        .zip(&sigma)
        .map(|(a, s)| stochastic_convolution_variance(*a, *s, t))
        .collect();
    Ok((mean, var))
}

fn exp_linear_parts(f: &TestFunction) -> Result<(&[f64], f64)> {
    match f {
        TestFunction::ExpLinear { h, lambda } => Ok((h, *lambda)),
        _ => Err(invalid("test_function", "closed form needs exp_linear")),
    }
}

/// Closed-form `p_t f(x)` for a zero-drift model with diagonal noise:
/// for `f = exp(λ⟨h, ·⟩)` it is `exp(λ⟨h, e^{tA}x⟩ + λ² Σ h_k² v_k(t) / 2)`,
/// and for a Gaussian bump of width `w` it is
/// `Π_k √(w²/(w²+v_k)) exp(-(m_k - c_k)² / (2(w²+v_k)))`.
pub fn ou_exact(model: &SpectralModel, t: f64, x: &[f64], f: &TestFunction) -> Result<f64> {
    let (m, v) = ou_mean_variance(model, t, x)?;
    match f {
        TestFunction::ExpLinear { h, lambda } => {
            check_dim(model.dim(), h.len())?;
            let lin: f64 = h.iter().zip(&m).map(|(h, m)| h * m).sum();
            let quad: f64 = h.iter().zip(&v).map(|(h, v)| h * h * v).sum();
            Ok((lambda * lin + 0.5 * lambda * lambda * quad).exp())
        }
        TestFunction::GaussianBump { center, width } => {
            check_dim(model.dim(), center.len())?;
            let w2 = width * width;
            Ok(m.iter()
                .zip(&v)
                .zip(center)
                .map(|((m, v), c)| (w2 / (w2 + v)).sqrt() * (-(m - c) * (m - c) / (2.0 * (w2 + v))).exp())
                .product())
        }
        TestFunction::Constant { value } => Ok(*value),
        _ => Err(invalid("test_function", "closed form needs exp_linear, gaussian_bump or constant")),
    }
}

/// `p_t(p_s f)(x)` composed in closed form: `p_s f = C_s exp(λ⟨e^{sA}h, ·⟩)`.
pub fn ou_nested(model: &SpectralModel, t: f64, s: f64, x: &[f64], f: &TestFunction) -> Result<f64> {
    let (h, lambda) = exp_linear_parts(f)?;
    check_dim(model.dim(), h.len())?;
    let zero = vec![0.0; model.dim()];
    let (_, v_s) = ou_mean_variance(model, s, &zero)?;
    let c_s = (0.5 * lambda * lambda * h.iter().zip(&v_s).map(|(h, v)| h * h * v).sum::<f64>()).exp();
    let h_s: Vec<f64> = h.iter().zip(model.a_eigs()).map(|(h, a)| (a * s).exp() * h).collect();
    let inner = TestFunction::ExpLinear { h: h_s, lambda };
    Ok(c_s * ou_exact(model, t, x, &inner)?)
}
