//! Finite-dimensional model assembly.
//!
//! A [`SpectralModel`] is the Galerkin truncation of the evolution equation
//! to the span of the first `n` eigenvectors of `A`: the eigenvalues `a_k`,
//! the dissipativity constant `ω`, the noise matrix `σ_n` and a drift field
//! on `R^n`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, invalid, Error, Result};
use crate::monotone::{GaussianSmoother, SelectedScalar, Selection, SmoothingParams};
use crate::rng::NoiseStream;

pub mod lift;
pub mod spec;
pub mod theta;

pub use lift::{g_functional, lift_drift, NemytskiiLift};
pub use spec::{DriftSpec, ModelSpec, OperatorSpec, SelectionSpec, SigmaSpec, SmoothingSpec};
pub use theta::{default_q, theta_value, QSpec, ThetaFunctional};

/// Noise matrix `σ_n` in the eigenbasis.
#[derive(Clone, Debug)]
pub enum Sigma {
    Diagonal(Vec<f64>),
    Dense {
        matrix: DMatrix<f64>,
        cholesky: Cholesky<f64, Dyn>,
    },
}

impl Sigma {
    pub fn from_spec(spec: &SigmaSpec, n: usize) -> Result<Self> {
        match spec {
            SigmaSpec::Scalar { value } => Self::diagonal(vec![*value; n]),
            SigmaSpec::Diagonal { values } => {
                check_dim(n, values.len())?;
                Self::diagonal(values.clone())
            }
            SigmaSpec::Dense { rows } => {
                check_dim(n, rows.len())?;
                for r in rows {
                    check_dim(n, r.len())?;
                }
                let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
                Self::dense(matrix)
            }
        }
    }

    pub fn diagonal(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidSigma("diagonal entries must be positive".into()));
        }
        Ok(Sigma::Diagonal(values))
    }

    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::InvalidSigma("matrix is not square".into()));
        }
        let scale = matrix.amax().max(1.0);
        if (&matrix - matrix.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidSigma("matrix is not symmetric".into()));
        }
        let cholesky = Cholesky::new(matrix.clone())
            .ok_or_else(|| Error::InvalidSigma("matrix is not positive definite".into()))?;
        let min_eig = matrix.clone().symmetric_eigen().eigenvalues.min();
        if !(min_eig > 0.0) {
            return Err(Error::InvalidSigma(format!("smallest eigenvalue {min_eig} <= 0")));
        }
        Ok(Sigma::Dense { matrix, cholesky })
    }

    pub fn dim(&self) -> usize {
        match self {
            Sigma::Diagonal(v) => v.len(),
            Sigma::Dense { matrix, .. } => matrix.nrows(),
        }
    }

    /// Per-mode values when `σ` is diagonal in the eigenbasis.
    pub fn as_diagonal(&self) -> Option<Vec<f64>> {
        match self {
            Sigma::Diagonal(v) => Some(v.clone()),
            Sigma::Dense { matrix, .. } => {
                let n = matrix.nrows();
                let off = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|(i, j)| i != j)
                    .any(|(i, j)| matrix[(i, j)] != 0.0);
                (!off).then(|| (0..n).map(|i| matrix[(i, i)]).collect())
            }
        }
    }

    /// `σ v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Sigma::Diagonal(d) => d.iter().zip(v).map(|(a, b)| a * b).collect(),
            Sigma::Dense { matrix, .. } => {
                (matrix * DVector::from_column_slice(v)).as_slice().to_vec()
            }
        }
    }

    /// `σ⁻¹ v`.
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        let out: Vec<f64> = match self {
            Sigma::Diagonal(d) => d.iter().zip(v).map(|(a, b)| b / a).collect(),
            Sigma::Dense { cholesky, .. } => cholesky
                .solve(&DVector::from_column_slice(v))
                .as_slice()
                .to_vec(),
        };
        if out.iter().all(|x| x.is_finite()) {
            Ok(out)
        } else {
            Err(Error::SingularSigma("non-finite solve result".into()))
        }
    }

    /// Operator norm `‖σ⁻¹‖` of the truncated matrix.
    pub fn inverse_norm(&self) -> f64 {
        match self {
            Sigma::Diagonal(d) => 1.0 / d.iter().cloned().fold(f64::INFINITY, f64::min),
            Sigma::Dense { matrix, .. } => 1.0 / matrix.clone().symmetric_eigen().eigenvalues.min(),
        }
    }

    /// Operator norm `‖σ‖`.
    pub fn norm(&self) -> f64 {
        match self {
            Sigma::Diagonal(d) => d.iter().cloned().fold(0.0, f64::max),
            Sigma::Dense { matrix, .. } => matrix.clone().symmetric_eigen().eigenvalues.max(),
        }
    }

    /// `|σ e_i|²`.
    pub fn column_norm_sq(&self, i: usize) -> f64 {
        match self {
            Sigma::Diagonal(d) => d[i] * d[i],
            Sigma::Dense { matrix, .. } => matrix.column(i).norm_squared(),
        }
    }
}

/// Drift field on `R^n`.
#[derive(Clone, Debug)]
pub enum Drift {
    Zero,
    Linear(DMatrix<f64>),
    Nemytskii {
        lift: NemytskiiLift,
        scalar: SelectedScalar,
    },
    Coordinatewise(SelectedScalar),
    Smoothed {
        inner: Box<Drift>,
        smoother: GaussianSmoother,
    },
}

impl Drift {
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Drift::Zero => Ok(vec![0.0; x.len()]),
            Drift::Linear(m) => {
                check_dim(m.ncols(), x.len())?;
                Ok((m * DVector::from_column_slice(x)).as_slice().to_vec())
            }
            Drift::Nemytskii { lift, scalar } => lift.lift_drift(x, |s| scalar.eval(s)),
            Drift::Coordinatewise(scalar) => x.iter().map(|&s| scalar.eval(s)).collect(),
            Drift::Smoothed { inner, smoother } => smoother.apply(|p| inner.eval(p), x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Drift::Zero)
    }

    /// The scalar map behind a pointwise drift.
    pub fn scalar(&self) -> Option<&SelectedScalar> {
        match self {
            Drift::Nemytskii { scalar, .. } | Drift::Coordinatewise(scalar) => Some(scalar),
            Drift::Smoothed { inner, .. } => inner.scalar(),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralModel {
    a_eigs: Vec<f64>,
    omega: f64,
    sigma: Sigma,
    sigma_inv_norm: f64,
    drift: Drift,
    /// Spatial grid, present for the Dirichlet operator.
    lift: Option<NemytskiiLift>,
    q_spec: Option<QSpec>,
}

/// Pairs used for the construction-time dissipativity spot check.
const SPOT_CHECK_PAIRS: usize = 24;

impl SpectralModel {
    /// Assembles a model and checks `σ` SPD, `a_k <= ω` and drift dissipativity.
    pub fn new(
        a_eigs: Vec<f64>,
        omega: f64,
        sigma: Sigma,
        drift: Drift,
        lift: Option<NemytskiiLift>,
    ) -> Result<Self> {
        let n = a_eigs.len();
        if n == 0 {
            return Err(invalid("n", "dimension must be >= 1"));
        }
        check_dim(n, sigma.dim())?;
        if let Some(k) = a_eigs.iter().position(|a| !(*a <= omega + 1e-12 * omega.abs().max(1.0))) {
            return Err(invalid(
                "a_eigs",
                format!("a_{} = {} exceeds omega = {omega}", k + 1, a_eigs[k]),
            ));
        }
        let sigma_inv_norm = sigma.inverse_norm();
        let model = Self {
            a_eigs,
            omega,
            sigma,
            sigma_inv_norm,
            drift,
            lift,
            q_spec: None,
        };
        model.spot_check_dissipativity()?;
        Ok(model)
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let n = spec.dimension;
        if n == 0 {
            return Err(invalid("dimension", "must be >= 1"));
        }
        let (a_eigs, omega, lift) = match &spec.operator {
            OperatorSpec::Dirichlet => {
                if spec.oversampling < 2 {
                    return Err(invalid("oversampling", "must be >= 2"));
                }
                let a: Vec<f64> = (1..=n).map(|k| -PI * PI * (k * k) as f64).collect();
                (a, -PI * PI, Some(NemytskiiLift::new(n, spec.oversampling * n)?))
            }
            OperatorSpec::Diagonal { eigenvalues, omega } => {
                check_dim(n, eigenvalues.len())?;
                let max = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (eigenvalues.clone(), omega.unwrap_or(max), None)
            }
        };
        let sigma = Sigma::from_spec(&spec.sigma, n)?;
        let drift = build_drift(&spec.drift, n, lift.as_ref())?;
        let mut model = Self::new(a_eigs, omega, sigma, drift, lift)?;
        if let Some(v) = spec.sigma_inv_norm {
            if !(v > 0.0) {
                return Err(invalid("sigma_inv_norm", "must be > 0"));
            }
            model.sigma_inv_norm = v;
        }
        model.q_spec = spec.theta.clone();
        Ok(model)
    }

    /// Replaces the `q` used by [`SpectralModel::theta`].
    pub fn with_q(mut self, q: QSpec) -> Self {
        self.q_spec = Some(q);
        self
    }

    pub fn dim(&self) -> usize {
        self.a_eigs.len()
    }

    pub fn a_eigs(&self) -> &[f64] {
        &self.a_eigs
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    pub fn sigma_inv_norm(&self) -> f64 {
        self.sigma_inv_norm
    }

    pub fn drift_field(&self) -> &Drift {
        &self.drift
    }

    pub fn lift(&self) -> Option<&NemytskiiLift> {
        self.lift.as_ref()
    }

    pub fn drift(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        self.drift.eval(x)
    }

    /// Same operator and noise with a different drift.
    pub fn with_drift(&self, drift: Drift) -> Result<Self> {
        let mut m = self.clone();
        m.drift = drift;
        m.spot_check_dissipativity()?;
        Ok(m)
    }

    /// Eigenvalues `λ_i = 1 + ω - a_i` of `1 + ω - A`.
    pub fn lambda_eigs(&self) -> Vec<f64> {
        self.a_eigs.iter().map(|a| 1.0 + self.omega - a).collect()
    }

    /// The Θ functional, with `q` from the override, the model file, or the default rule.
    pub fn theta(&self, q_override: Option<&QSpec>) -> Result<ThetaFunctional> {
        let lambda = self.lambda_eigs();
        let q = q_override
            .or(self.q_spec.as_ref())
            .unwrap_or(&QSpec::Default)
            .resolve(&lambda)?;
        ThetaFunctional::new(lambda, q)
    }

    /// Largest `⟨F(x) - F(y), x - y⟩ / |x - y|²` over the given pairs.
    pub fn dissipativity_excess(&self, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for (x, y) in pairs {
            let fx = self.drift(x)?;
            let fy = self.drift(y)?;
            let mut inner = 0.0;
            let mut dist2 = 0.0;
            for i in 0..self.dim() {
                let d = x[i] - y[i];
                inner += (fx[i] - fy[i]) * d;
                dist2 += d * d;
            }
            if dist2 > 0.0 {
                worst = worst.max(inner / dist2);
            }
        }
        Ok(worst)
    }

    fn spot_check_dissipativity(&self) -> Result<()> {
        if let Drift::Linear(m) = &self.drift {
            check_dim(self.dim(), m.nrows())?;
            check_dim(self.dim(), m.ncols())?;
            let sym = (m + m.transpose()) * 0.5;
            let top = sym.symmetric_eigen().eigenvalues.max();
            if top > 1e-12 * m.amax().max(1.0) {
                return Err(invalid("drift", format!("linear drift is not dissipative (top eigenvalue {top})")));
            }
            return Ok(());
        }
        if self.drift.is_zero() {
            return Ok(());
        }
        let pairs = sample_pairs(self.dim(), SPOT_CHECK_PAIRS, 0x5eed);
        let excess = self.dissipativity_excess(&pairs)?;
        if excess > 1e-9 {
            return Err(invalid("drift", format!("dissipativity spot check failed: {excess}")));
        }
        Ok(())
    }
}

/// Deterministic pairs of points spread over a few scales.
pub fn sample_pairs(n: usize, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut noise = NoiseStream::new(seed, 0, n);
    (0..count)
        .map(|i| {
            let scale = [0.05, 0.5, 2.0][i % 3];
            let x: Vec<f64> = noise.next_vec().into_iter().map(|v| v * scale).collect();
            let y: Vec<f64> = noise.next_vec().into_iter().map(|v| v * scale).collect();
            (x, y)
        })
        .collect()
}

fn build_drift(spec: &DriftSpec, n: usize, lift: Option<&NemytskiiLift>) -> Result<Drift> {
    let selected = |scalar: &crate::monotone::ScalarMapSpec, sel: &SelectionSpec| -> Result<SelectedScalar> {
        let map = scalar.build()?;
        let selection = match sel.yosida_params()? {
            Some(p) => Selection::Yosida(p),
            None => Selection::MinimalSection,
        };
        Ok(SelectedScalar::new(map, selection))
    };
    let smooth = |inner: Drift, sm: &Option<SmoothingSpec>| -> Result<Drift> {
        match sm {
            None => Ok(inner),
            Some(s) => {
                let b = match &s.b_coeffs {
                    Some(b) => {
                        check_dim(n, b.len())?;
                        b.clone()
                    }
                    None => (1..=n).map(|i| (i * i) as f64).collect(),
                };
                let smoother = GaussianSmoother::new(SmoothingParams {
                    beta: s.beta,
                    b_coeffs: b,
                    node_count: s.node_count,
                    node_seed: s.node_seed,
                })?;
                Ok(Drift::Smoothed {
                    inner: Box::new(inner),
                    smoother,
                })
            }
        }
    };
    match spec {
        DriftSpec::Zero => Ok(Drift::Zero),
        DriftSpec::Linear { matrix } => {
            check_dim(n, matrix.len())?;
            for r in matrix {
                check_dim(n, r.len())?;
            }
            Ok(Drift::Linear(DMatrix::from_fn(n, n, |i, j| matrix[i][j])))
        }
        DriftSpec::Nemytskii {
            scalar,
            selection,
            smoothing,
        } => {
            let lift = lift
                .ok_or_else(|| invalid("drift", "nemytskii drift needs the dirichlet operator"))?
                .clone();
            let inner = Drift::Nemytskii {
                lift,
                scalar: selected(scalar, selection)?,
            };
            smooth(inner, smoothing)
        }
        DriftSpec::Coordinatewise {
            scalar,
            selection,
            smoothing,
        } => smooth(Drift::Coordinatewise(selected(scalar, selection)?), smoothing),
    }
}

/// Dirichlet Laplacian on (0, 1) truncated to `n` modes.
pub fn build_dirichlet_model(n: usize, drift: DriftSpec, sigma: SigmaSpec) -> Result<SpectralModel> {
    SpectralModel::from_spec(&ModelSpec {
        dimension: n,
        oversampling: 8,
        sigma_inv_norm: None,
        operator: OperatorSpec::Dirichlet,
        drift,
        sigma,
        theta: None,
    })
}

/// Zero-drift model with diagonal operator and noise.
pub fn diagonal_ou(a_eigs: Vec<f64>, sigma: Vec<f64>) -> Result<SpectralModel> {
    let omega = a_eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    SpectralModel::new(a_eigs, omega, Sigma::diagonal(sigma)?, Drift::Zero, None)
}
