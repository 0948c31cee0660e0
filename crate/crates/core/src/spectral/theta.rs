use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};

/// `Θ(x) = Σ (λ_i / q_i) x_i²` with `λ_i` the eigenvalues of `1 + ω - A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaFunctional {
    lambda_eigs: Vec<f64>,
    q_coeffs: Vec<f64>,
}

impl ThetaFunctional {
    pub fn new(lambda_eigs: Vec<f64>, q_coeffs: Vec<f64>) -> Result<Self> {
        check_dim(lambda_eigs.len(), q_coeffs.len())?;
        for (i, (l, q)) in lambda_eigs.iter().zip(&q_coeffs).enumerate() {
            if !(*l > 0.0) {
                return Err(invalid("lambda_eigs", format!("lambda_{} = {l} is not positive", i + 1)));
            }
            if !(*q > 0.0 && q < l) {
                return Err(invalid("q_coeffs", format!("need 0 < q_{0} < lambda_{0}, got q = {q}, lambda = {l}", i + 1)));
            }
        }
        for i in 1..lambda_eigs.len() {
            if lambda_eigs[i] < lambda_eigs[i - 1] {
                return Err(invalid("lambda_eigs", "eigenvalues must be increasing"));
            }
            if q_coeffs[i] < q_coeffs[i - 1] {
                return Err(invalid("q_coeffs", "q must be increasing"));
            }
            if q_coeffs[i] / lambda_eigs[i] > q_coeffs[i - 1] / lambda_eigs[i - 1] {
                return Err(invalid("q_coeffs", "q_i / lambda_i must be decreasing"));
            }
        }
        Ok(Self {
            lambda_eigs,
            q_coeffs,
        })
    }

    pub fn lambda_eigs(&self) -> &[f64] {
        &self.lambda_eigs
    }

    pub fn q_coeffs(&self) -> &[f64] {
        &self.q_coeffs
    }

    pub fn dim(&self) -> usize {
        self.q_coeffs.len()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self
            .lambda_eigs
            .iter()
            .zip(&self.q_coeffs)
            .zip(x)
            .map(|((l, q), v)| l / q * v * v)
            .sum())
    }

    /// `φ_n(x) = Σ x_i² / q_i`, the Lyapunov test function.
    pub fn phi(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.q_coeffs.iter().zip(x).map(|(q, v)| v * v / q).sum())
    }

    pub fn q_inverse_sum(&self) -> f64 {
        self.q_coeffs.iter().map(|q| 1.0 / q).sum()
    }
}

pub fn theta_value(t: &ThetaFunctional, x: &[f64]) -> Result<f64> {
    t.value(x)
}

/// `q_i = i^{3/2}`; fails when that choice is not strictly below `λ_i`.
pub fn default_q(lambda_eigs: &[f64]) -> Result<Vec<f64>> {
    let q: Vec<f64> = (1..=lambda_eigs.len()).map(|i| (i as f64).powf(1.5)).collect();
    for (i, (l, qi)) in lambda_eigs.iter().zip(&q).enumerate() {
        if *l <= *qi {
            return Err(Error::InfeasibleQ {
                index: i + 1,
                lambda: *l,
                q: *qi,
            });
        }
    }
    Ok(q)
}

/// How the `q_i` of the Θ functional are chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QSpec {
    /// `q_i = i^{3/2}`.
    Default,
    /// `q_i = scale · i^exponent`.
    Power { scale: f64, exponent: f64 },
    Explicit { values: Vec<f64> },
}

impl QSpec {
    pub fn resolve(&self, lambda_eigs: &[f64]) -> Result<Vec<f64>> {
        match self {
            QSpec::Default => default_q(lambda_eigs),
            QSpec::Power { scale, exponent } => Ok((1..=lambda_eigs.len())
                .map(|i| scale * (i as f64).powf(*exponent))
                .collect()),
            QSpec::Explicit { values } => {
                check_dim(lambda_eigs.len(), values.len())?;
                Ok(values.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn theta_examples() {
        let t = ThetaFunctional::new(vec![2.0, 5.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(t.value(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((t.value(&[1.0, 1.0]).unwrap() - 4.5).abs() < 1e-15);
    }

    #[test]
    fn default_q_examples() {
        let lambda: Vec<f64> = (1..=4).map(|i| 1.0 + PI * PI * (i * i) as f64).collect();
        let q = default_q(&lambda).unwrap();
        let expected = [1.0, 2.0f64.powf(1.5), 3.0f64.powf(1.5), 8.0];
        for (a, b) in q.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((q[1] - 2.828_427_124_746_19).abs() < 1e-12);
        assert!((q[2] - 5.196_152_422_706_632).abs() < 1e-12);

        let linear: Vec<f64> = (1..=4).map(|i| i as f64).collect();
        assert_eq!(
            default_q(&linear),
            Err(Error::InfeasibleQ { index: 1, lambda: 1.0, q: 1.0 })
        );
    }

    #[test]
    fn inverse_q_sum_is_summable() {
        let lambda: Vec<f64> = (1..=10_000).map(|i| 1.0 + PI * PI * (i as f64).powi(2)).collect();
        let q = default_q(&lambda).unwrap();
        let partial: f64 = q.iter().map(|v| 1.0 / v).sum();
        // ζ(3/2) = 2.612375348685488...
        assert!(partial <= 2.612_375_348_685_488);
        assert!(partial > 2.59);
    }

    #[test]
    fn rejects_invalid_q() {
        assert!(ThetaFunctional::new(vec![1.0, 5.0], vec![1.0, 2.0]).is_err());
        assert!(ThetaFunctional::new(vec![2.0, 5.0], vec![1.0, 0.5]).is_err());
        // ratio must decrease
        assert!(ThetaFunctional::new(vec![2.0, 3.0], vec![0.5, 2.0]).is_err());
    }
}
