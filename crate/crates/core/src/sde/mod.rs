//! Time discretization of the Galerkin system.
//!
//! The default exponential Euler scheme integrates the linear part and the
//! stochastic convolution exactly per mode and freezes the drift at the left
//! end of each step. Euler-Maruyama is kept for dense `σ` and as a reference.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::rng::NoiseStream;
use crate::spectral::SpectralModel;

pub mod export;

pub use export::{format_f64, read_binary, write_binary, write_csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExponentialEuler,
    EulerMaruyama,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    pub seed: u64,
    pub stream_id: u64,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, seed: u64) -> Self {
        Self {
            dt,
            scheme: Scheme::ExponentialEuler,
            t_end,
            seed,
            stream_id: 0,
        }
    }

    pub fn with_stream(&self, stream_id: u64) -> Self {
        Self {
            stream_id,
            ..self.clone()
        }
    }

    pub fn with_t_end(&self, t_end: f64) -> Self {
        Self {
            t_end,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "must be > 0"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", "must be finite and >= 0"));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            return Err(invalid("dt", format!("dt = {} exceeds t_end = {}", self.dt, self.t_end)));
        }
        Ok(())
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.dt, self.t_end)
    }
}

/// Uniform grid `t_k = k dt` closed by a possibly shorter final step at `t_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
    pub last_dt: f64,
    pub t_end: f64,
}

impl TimeGrid {
    pub fn new(dt: f64, t_end: f64) -> Self {
        if t_end <= 0.0 {
            return Self {
                dt,
                steps: 0,
                last_dt: 0.0,
                t_end: 0.0,
            };
        }
        let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
        let last_dt = t_end - (steps - 1) as f64 * dt;
        Self {
            dt,
            steps,
            last_dt,
            t_end,
        }
    }

    /// Time at the start of step `k` (0-based); `time(steps) = t_end`.
    pub fn time(&self, k: usize) -> f64 {
        if k >= self.steps {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }

    pub fn step_len(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.last_dt
        } else {
            self.dt
        }
    }
}

/// Per-mode exact OU increment variance `σ² (e^{2a dt} - 1) / (2a)`.
pub fn stochastic_convolution_variance(a_k: f64, sigma_k: f64, dt: f64) -> f64 {
    sigma_k * sigma_k * phi(2.0 * a_k, dt)
}

/// `(e^{a dt} - 1) / a`, with the `a → 0` limit `dt`.
pub fn phi(a: f64, dt: f64) -> f64 {
    if (a * dt).abs() < 1e-12 {
        dt
    } else {
        (a * dt).exp_m1() / a
    }
}

/// Precomputed per-mode factors for one step length.
#[derive(Clone, Debug)]
pub struct StepCoefficients {
    pub dt: f64,
    pub decay: Vec<f64>,
    pub phi: Vec<f64>,
    pub noise_std: Vec<f64>,
}

impl StepCoefficients {
    fn new(model: &SpectralModel, scheme: Scheme, dt: f64) -> Result<Self> {
        let a = model.a_eigs();
        match scheme {
            Scheme::ExponentialEuler => {
                let sig = model.sigma().as_diagonal().ok_or_else(|| {
                    invalid("scheme", "exponential_euler requires sigma diagonal in the eigenbasis")
                })?;
                Ok(Self {
                    dt,
                    decay: a.iter().map(|a| (a * dt).exp()).collect(),
                    phi: a.iter().map(|a| phi(*a, dt)).collect(),
                    noise_std: a
                        .iter()
                        .zip(&sig)
                        .map(|(a, s)| stochastic_convolution_variance(*a, *s, dt).sqrt())
                        .collect(),
                })
            }
            Scheme::EulerMaruyama => Ok(Self {
                dt,
                decay: a.iter().map(|a| 1.0 + a * dt).collect(),
                phi: vec![dt; a.len()],
                noise_std: vec![dt.sqrt(); a.len()],
            }),
        }
    }
}

/// A model bound to a scheme and step size.
#[derive(Clone, Debug)]
pub struct Stepper<'m> {
    model: &'m SpectralModel,
    scheme: Scheme,
    grid: TimeGrid,
    full: StepCoefficients,
    last: StepCoefficients,
}

impl<'m> Stepper<'m> {
    pub fn new(model: &'m SpectralModel, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid();
        let full = StepCoefficients::new(model, cfg.scheme, cfg.dt)?;
        let last = if grid.steps > 0 && grid.last_dt != cfg.dt {
            StepCoefficients::new(model, cfg.scheme, grid.last_dt)?
        } else {
            full.clone()
        };
        Ok(Self {
            model,
            scheme: cfg.scheme,
            grid,
            full,
            last,
        })
    }

    pub fn model(&self) -> &'m SpectralModel {
        self.model
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn coefficients(&self, k: usize) -> &StepCoefficients {
        if k + 1 == self.grid.steps {
            &self.last
        } else {
            &self.full
        }
    }

    /// Deterministic part of step `k`: `e^{A dt} x + φ(A) F(x)` (or its Euler analogue).
    pub fn drift_part(&self, k: usize, x: &[f64], fx: &[f64]) -> Vec<f64> {
        let c = self.coefficients(k);
        (0..x.len())
            .map(|i| c.decay[i] * x[i] + c.phi[i] * fx[i])
            .collect()
    }

    /// Noise part of step `k` for a standard normal vector.
    pub fn noise_part(&self, k: usize, noise: &[f64]) -> Vec<f64> {
        let c = self.coefficients(k);
        match self.scheme {
            Scheme::ExponentialEuler => noise.iter().zip(&c.noise_std).map(|(z, s)| z * s).collect(),
            Scheme::EulerMaruyama => {
                let sdt = c.dt.sqrt();
                self.model.sigma().apply(noise).into_iter().map(|v| v * sdt).collect()
            }
        }
    }

    /// One full step `k` from `x` with the given standard normal draw.
    pub fn advance(&self, k: usize, x: &[f64], noise: &[f64]) -> Result<Vec<f64>> {
        let fx = self.model.drift(x)?;
        let mut out = self.drift_part(k, x, &fx);
        for (o, n) in out.iter_mut().zip(self.noise_part(k, noise)) {
            *o += n;
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { step: k + 1 });
        }
        Ok(out)
    }
}

/// One step of length `cfg.dt` from `x`.
pub fn step(model: &SpectralModel, cfg: &IntegratorConfig, x: &[f64], noise: &[f64]) -> Result<Vec<f64>> {
    check_dim(model.dim(), x.len())?;
    check_dim(model.dim(), noise.len())?;
    let one = IntegratorConfig {
        t_end: cfg.dt,
        ..cfg.clone()
    };
    Stepper::new(model, &one)?.advance(0, x, noise)
}

/// Discretized trajectory with the standard normal draws of every step.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub noise_increments: Vec<Vec<f64>>,
}

impl PathRecord {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("path has at least the initial state")
    }
}

/// Runs the scheme to `t_end`, calling `visit(k, t_k, x_k)` for the initial
/// state and after every step. Returns the final state.
pub fn simulate_with<V>(model: &SpectralModel, cfg: &IntegratorConfig, x0: &[f64], mut visit: V) -> Result<Vec<f64>>
where
    V: FnMut(usize, f64, &[f64], Option<&[f64]>),
{
    check_dim(model.dim(), x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("x0", "initial state must be finite"));
    }
    let stepper = Stepper::new(model, cfg)?;
    let grid = *stepper.grid();
    let mut noise = NoiseStream::new(cfg.seed, cfg.stream_id, model.dim());
    let mut draw = vec![0.0; model.dim()];
    let mut x = x0.to_vec();
    visit(0, 0.0, &x, None);
    for k in 0..grid.steps {
        noise.fill_next(&mut draw);
        x = stepper.advance(k, &x, &draw)?;
        visit(k + 1, grid.time(k + 1), &x, Some(&draw));
    }
    Ok(x)
}

pub fn simulate(model: &SpectralModel, cfg: &IntegratorConfig, x0: &[f64]) -> Result<PathRecord> {
    let steps = cfg.grid().steps;
    let mut rec = PathRecord {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        noise_increments: Vec::with_capacity(steps),
    };
    simulate_with(model, cfg, x0, |_, t, x, noise| {
        rec.times.push(t);
        rec.states.push(x.to_vec());
        if let Some(z) = noise {
            rec.noise_increments.push(z.to_vec());
        }
    })?;
    Ok(rec)
}

/// Final state only.
pub fn simulate_final(model: &SpectralModel, cfg: &IntegratorConfig, x0: &[f64]) -> Result<Vec<f64>> {
    simulate_with(model, cfg, x0, |_, _, _, _| {})
}
