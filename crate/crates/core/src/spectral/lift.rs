//! Pointwise (Nemytskii) lift of a scalar map through the Dirichlet sine basis.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{check_dim, invalid, Result};

/// Composite trapezoid grid on `[0, 1]` (endpoints included) together with the
/// sampled basis `e_k(ξ) = √2 sin(kπξ)`, `k = 1..=n`.
#[derive(Clone, Debug)]
pub struct NemytskiiLift {
    n: usize,
    grid: Vec<f64>,
    weights: Vec<f64>,
    /// Row-major `grid.len() × n`.
    basis: Vec<f64>,
}

impl NemytskiiLift {
    pub fn new(n: usize, grid_size: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "dimension must be >= 1"));
        }
        if grid_size < 2 * n {
            return Err(invalid(
                "grid_size",
                format!("need at least 2n = {} grid points, got {grid_size}", 2 * n),
            ));
        }
        let h = 1.0 / (grid_size - 1) as f64;
        let grid: Vec<f64> = (0..grid_size).map(|j| j as f64 * h).collect();
        let mut weights = vec![h; grid_size];
        weights[0] = 0.5 * h;
        weights[grid_size - 1] = 0.5 * h;
        let mut basis = Vec::with_capacity(grid_size * n);
        for (j, xi) in grid.iter().enumerate() {
            for k in 1..=n {
                // the endpoints are zeros of every mode; keep them exact
                let v = if j == 0 || j == grid_size - 1 {
                    0.0
                } else {
                    SQRT_2 * (k as f64 * PI * xi).sin()
                };
                basis.push(v);
            }
        }
        Ok(Self {
            n,
            grid,
            weights,
            basis,
        })
    }

    /// Lift with the default 8× oversampling.
    pub fn with_default_grid(n: usize) -> Result<Self> {
        Self::new(n, 8 * n)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `x(ξ_j) = Σ_k c_k e_k(ξ_j)`.
    pub fn grid_values(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, coeffs.len())?;
        Ok(self
            .basis
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(coeffs).map(|(e, c)| e * c).sum())
            .collect())
    }

    /// `c_k = Σ_j w_j v_j e_k(ξ_j)`.
    pub fn project(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.grid.len(), values.len())?;
        let mut out = vec![0.0; self.n];
        for ((row, w), v) in self.basis.chunks_exact(self.n).zip(&self.weights).zip(values) {
            let wv = w * v;
            if wv != 0.0 {
                for (o, e) in out.iter_mut().zip(row) {
                    *o += wv * e;
                }
            }
        }
        Ok(out)
    }

    /// `(F_n)_k = Σ_j w_j f(x(ξ_j)) e_k(ξ_j)`.
    pub fn lift_drift<F>(&self, coeffs: &[f64], f: F) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let mut values = self.grid_values(coeffs)?;
        for v in values.iter_mut() {
            *v = f(*v)?;
        }
        self.project(&values)
    }

    /// `G(x) = (∫ |x|^{2m})^{1/2}` from sine coefficients.
    pub fn g_functional(&self, coeffs: &[f64], m: u32) -> Result<f64> {
        let values = self.grid_values(coeffs)?;
        self.g_functional_grid(&values, m)
    }

    /// `G` from values already sampled on the grid.
    pub fn g_functional_grid(&self, values: &[f64], m: u32) -> Result<f64> {
        check_dim(self.grid.len(), values.len())?;
        if m == 0 {
            return Err(invalid("m", "must be >= 1"));
        }
        let integral: f64 = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.abs().powi(2 * m as i32))
            .sum();
        Ok(integral.sqrt())
    }
}

pub fn lift_drift<F>(lift: &NemytskiiLift, coeffs: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    lift.lift_drift(coeffs, f)
}

pub fn g_functional(lift: &NemytskiiLift, coeffs: &[f64], m: u32) -> Result<f64> {
    lift.g_functional(coeffs, m)
}
