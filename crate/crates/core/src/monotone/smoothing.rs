//! Gaussian smoothing of a dissipative vector field on `R^n`.
//!
//! `F_{α,β}(x) = ∫ e^{βB} F_α(e^{βB} x + y) N(0, ½B⁻¹(e^{2βB} - 1))(dy)` with
//! `-B = diag(b_i)`, estimated on a fixed table of antithetic Gaussian nodes.
//! Sharing the nodes across all `x` keeps the estimate a deterministic,
//! dissipative function of `x`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};
use crate::rng::normal_table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub beta: f64,
    /// Eigenvalues of `-B`, one per coordinate.
    pub b_coeffs: Vec<f64>,
    pub node_count: usize,
    pub node_seed: u64,
}

impl SmoothingParams {
    /// `b_i = i^2`, the default spectrum of `-B`.
    pub fn with_square_spectrum(n: usize, beta: f64, node_count: usize, node_seed: u64) -> Self {
        Self {
            beta,
            b_coeffs: (1..=n).map(|i| (i * i) as f64).collect(),
            node_count,
            node_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(invalid("beta", "must lie in (0, 1]"));
        }
        if self.b_coeffs.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(invalid("b_coeffs", "all eigenvalues of -B must be positive"));
        }
        if self.node_count == 0 {
            return Err(invalid("node_count", "must be positive"));
        }
        Ok(())
    }
}

/// Precomputed smoothing kernel. Nodes come in antithetic pairs, so the
/// effective node count is `node_count` rounded up to an even number.
#[derive(Clone, Debug)]
pub struct GaussianSmoother {
    params: SmoothingParams,
    /// Standard normal nodes, shared across every `beta`.
    standard_nodes: Vec<Vec<f64>>,
    decay: Vec<f64>,
    std_dev: Vec<f64>,
}

impl GaussianSmoother {
    pub fn new(params: SmoothingParams) -> Result<Self> {
        params.validate()?;
        let n = params.b_coeffs.len();
        let half = params.node_count.div_ceil(2);
        let base = normal_table(params.node_seed, u64::MAX - 1, n, half);
        let mut standard_nodes = Vec::with_capacity(2 * half);
        for z in base {
            let neg: Vec<f64> = z.iter().map(|v| -v).collect();
            standard_nodes.push(z);
            standard_nodes.push(neg);
        }
        let mut s = Self {
            params,
            standard_nodes,
            decay: Vec::new(),
            std_dev: Vec::new(),
        };
        s.rescale();
        Ok(s)
    }

    fn rescale(&mut self) {
        let beta = self.params.beta;
        self.decay = self
            .params
            .b_coeffs
            .iter()
            .map(|b| (-beta * b).exp())
            .collect();
        self.std_dev = self
            .params
            .b_coeffs
            .iter()
            .map(|b| (-(-2.0 * beta * b).exp_m1() / (2.0 * b)).sqrt())
            .collect();
    }

    /// Same nodes, different `beta`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let mut params = self.params.clone();
        params.beta = beta;
        params.validate()?;
        let mut s = Self {
            params,
            standard_nodes: self.standard_nodes.clone(),
            decay: Vec::new(),
            std_dev: Vec::new(),
        };
        s.rescale();
        Ok(s)
    }

    pub fn params(&self) -> &SmoothingParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.b_coeffs.len()
    }

    pub fn node_count(&self) -> usize {
        self.standard_nodes.len()
    }

    /// Per-coordinate variance `(1 - e^{-2βb_i}) / (2 b_i)` of the smoothing measure.
    pub fn variances(&self) -> Vec<f64> {
        self.std_dev.iter().map(|s| s * s).collect()
    }

    pub fn apply<F>(&self, field: F, x: &[f64]) -> Result<Vec<f64>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let n = self.dim();
        check_dim(n, x.len())?;
        let mut acc = vec![0.0; n];
        let mut point = vec![0.0; n];
        for z in &self.standard_nodes {
            for i in 0..n {
                point[i] = self.decay[i] * x[i] + self.std_dev[i] * z[i];
            }
            let v = field(&point)?;
            check_dim(n, v.len())?;
            for i in 0..n {
                acc[i] += v[i];
            }
        }
        let w = 1.0 / self.standard_nodes.len() as f64;
        for i in 0..n {
            acc[i] *= self.decay[i] * w;
        }
        Ok(acc)
    }
}

/// One-shot smoothing of `field` at `x`.
pub fn smooth_yosida<F>(field: F, sp: &SmoothingParams, x: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    GaussianSmoother::new(sp.clone())?.apply(field, x)
}

/// `max |F(x)| / (1 + |x|)` over the probe set: an empirical lower estimate of
/// the linear growth constant.
pub fn growth_constant<F>(field: F, probes: &[Vec<f64>]) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if probes.is_empty() {
        return Err(invalid("probes", "probe set must be nonempty"));
    }
    let mut best = 0.0f64;
    for x in probes {
        let v = field(x)?;
        let ratio = norm(&v) / (1.0 + norm(x));
        best = best.max(ratio);
    }
    Ok(best)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
