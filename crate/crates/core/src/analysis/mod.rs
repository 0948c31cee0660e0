//! Monte Carlo estimation of the transition semigroup and checks of the
//! inequalities it satisfies, plus the deterministic ultraboundedness
//! machinery and invariant-measure estimates.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};

pub mod invariant;
pub mod semigroup;
pub mod stats;
pub mod ultrabound;

pub use invariant::{
    check_hyperbound_condition, density_bound_rhs, estimate_invariant, lyapunov_drift_check, Functional,
    HyperboundReport, InvariantEstimate, LyapunovReport,
};
pub use semigroup::{
    check_gradient_estimate, check_harnack, estimate_semigroup, harnack_constant, ou_exact, ou_mean_variance,
    ou_nested, GradientReport, HarnackReport,
};
pub use stats::{batch_means, mean_se, Estimate};
pub use ultrabound::{
    check_contraction_bound, psi, psi_inverse, ultrabound_envelope, ContractionReport, PhiSpec, UltraboundSpec,
};

/// User-supplied nonnegative bounded function.
#[derive(Clone)]
pub struct CustomFunction {
    pub name: String,
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub sup_norm: f64,
    pub lipschitz: Option<f64>,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("name", &self.name)
            .field("sup_norm", &self.sup_norm)
            .finish_non_exhaustive()
    }
}

/// Nonnegative test functions on the Galerkin space.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(λ⟨h, x⟩)`; unbounded, used where closed forms exist.
    ExpLinear { h: Vec<f64>, lambda: f64 },
    /// `exp(-|x - c|² / (2 w²))`.
    GaussianBump { center: Vec<f64>, width: f64 },
    /// `1 / (1 + |x - c|²/s²)`.
    BoundedRational { center: Vec<f64>, scale: f64 },
    /// `1_{|x - c| ≤ r}`, or with `ramp` a linear decay to zero over `[r, 1.1 r]`.
    IndicatorBall {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        ramp: bool,
    },
    Constant { value: f64 },
    #[serde(skip)]
    Custom(CustomFunction),
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::ExpLinear { h, lambda } => (lambda * h.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).exp(),
            Self::GaussianBump { center, width } => {
                let r = dist(x, center) / width;
                (-0.5 * r * r).exp()
            }
            Self::BoundedRational { center, scale } => {
                let r = dist(x, center) / scale;
                1.0 / (1.0 + r * r)
            }
            Self::IndicatorBall { center, radius, ramp } => {
                let d = dist(x, center);
                if d <= *radius {
                    1.0
                } else if *ramp {
                    (1.0 - (d - radius) / (0.1 * radius)).max(0.0)
                } else {
                    0.0
                }
            }
            Self::Constant { value } => *value,
            Self::Custom(c) => (c.f)(x),
        }
    }

    pub fn eval_pow(&self, x: &[f64], p: f64) -> f64 {
        match self {
            Self::ExpLinear { h, lambda } => {
                (p * lambda * h.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).exp()
            }
            Self::GaussianBump { center, width } => {
                let r = dist(x, center) / width;
                (-0.5 * p * r * r).exp()
            }
            _ => self.eval(x).powf(p),
        }
    }

    /// `‖f‖_0`; infinite for the exponential.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::ExpLinear { h, lambda } => {
                if *lambda == 0.0 || h.iter().all(|v| *v == 0.0) {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            Self::GaussianBump { .. } | Self::BoundedRational { .. } | Self::IndicatorBall { .. } => 1.0,
            Self::Constant { value } => value.abs(),
            Self::Custom(c) => c.sup_norm,
        }
    }

    /// Lipschitz constant when finite.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Self::ExpLinear { h, lambda } => (*lambda == 0.0 || h.iter().all(|v| *v == 0.0)).then_some(0.0),
            // max of r e^{-r²/2} is at r = 1
            Self::GaussianBump { width, .. } => Some((-0.5f64).exp() / width),
            // max of 2r/(1+r²)² is at r = 1/√3
            Self::BoundedRational { scale, .. } => Some(3.0 * 3f64.sqrt() / (8.0 * scale)),
            Self::IndicatorBall { radius, ramp, .. } => ramp.then(|| 10.0 / radius),
            Self::Constant { .. } => Some(0.0),
            Self::Custom(c) => c.lipschitz,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Self::ExpLinear { h, lambda } => {
                check_dim(dim, h.len())?;
                if !lambda.is_finite() {
                    return Err(invalid("test_function.lambda", "must be finite"));
                }
            }
            Self::GaussianBump { center, width } => {
                check_dim(dim, center.len())?;
                if !(*width > 0.0) {
                    return Err(invalid("test_function.width", "must be > 0"));
                }
            }
            Self::BoundedRational { center, scale } => {
                check_dim(dim, center.len())?;
                if !(*scale > 0.0) {
                    return Err(invalid("test_function.scale", "must be > 0"));
                }
            }
            Self::IndicatorBall { center, radius, .. } => {
                check_dim(dim, center.len())?;
                if !(*radius > 0.0) {
                    return Err(invalid("test_function.radius", "must be > 0"));
                }
            }
            Self::Constant { value } => {
                if !(*value >= 0.0) {
                    return Err(invalid("test_function.value", "must be >= 0"));
                }
            }
            Self::Custom(c) => {
                if !(c.sup_norm >= 0.0) {
                    return Err(invalid("test_function.sup_norm", "must be >= 0"));
                }
            }
        }
        Ok(())
    }
}
