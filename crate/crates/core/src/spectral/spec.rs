//! Declarative model description, stored as TOML.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::monotone::{ScalarMapSpec, YosidaParams};
use crate::spectral::theta::QSpec;

fn default_oversampling() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub dimension: usize,
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    /// Overrides the norm of `σ⁻¹` on the full space; defaults to the
    /// truncated value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_inv_norm: Option<f64>,
    pub operator: OperatorSpec,
    pub drift: DriftSpec,
    pub sigma: SigmaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<QSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    /// Dirichlet Laplacian on (0, 1): `a_k = -π²k²`, `ω = -π²`.
    Dirichlet,
    /// Diagonal operator with the given eigenvalues; `ω` defaults to their maximum.
    Diagonal {
        eigenvalues: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaSpec {
    Scalar { value: f64 },
    Diagonal { values: Vec<f64> },
    Dense { rows: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionSpec {
    Minimal,
    Yosida {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bisection_tol: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_iter: Option<usize>,
    },
}

impl SelectionSpec {
    pub fn yosida(alpha: f64) -> Self {
        SelectionSpec::Yosida {
            alpha,
            bisection_tol: None,
            max_iter: None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            SelectionSpec::Minimal => None,
            SelectionSpec::Yosida { alpha, .. } => Some(*alpha),
        }
    }

    pub fn yosida_params(&self) -> Result<Option<YosidaParams>> {
        match self {
            SelectionSpec::Minimal => Ok(None),
            SelectionSpec::Yosida {
                alpha,
                bisection_tol,
                max_iter,
            } => {
                let mut p = YosidaParams::new(*alpha)?;
                if let Some(t) = bisection_tol {
                    p.bisection_tol = *t;
                }
                if let Some(m) = max_iter {
                    p.max_iter = *m;
                }
                p.validate()?;
                Ok(Some(p))
            }
        }
    }
}

/// Gaussian smoothing on top of the selected drift; `b_coeffs` default to `i²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSpec {
    pub beta: f64,
    pub node_count: usize,
    pub node_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_coeffs: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriftSpec {
    Zero,
    /// `F(x) = L x`, rows of `L`.
    Linear { matrix: Vec<Vec<f64>> },
    /// `x ↦ f̄ ∘ x` through the sine basis (Dirichlet operator only).
    Nemytskii {
        scalar: ScalarMapSpec,
        selection: SelectionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        smoothing: Option<SmoothingSpec>,
    },
    /// `F(x)_k = f(x_k)`.
    Coordinatewise {
        scalar: ScalarMapSpec,
        selection: SelectionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        smoothing: Option<SmoothingSpec>,
    },
}

impl DriftSpec {
    /// The Yosida parameter of a regularized drift, if any.
    pub fn yosida_alpha(&self) -> Option<f64> {
        match self {
            DriftSpec::Nemytskii { selection, .. } | DriftSpec::Coordinatewise { selection, .. } => {
                selection.alpha()
            }
            _ => None,
        }
    }

    pub fn scalar(&self) -> Option<&ScalarMapSpec> {
        match self {
            DriftSpec::Nemytskii { scalar, .. } | DriftSpec::Coordinatewise { scalar, .. } => {
                Some(scalar)
            }
            _ => None,
        }
    }
}

impl ModelSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid("model", e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| invalid("model", e.to_string()))
    }
}
