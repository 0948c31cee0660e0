//! Monte Carlo summaries with a fixed reduction order.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    /// Relative standard error; zero for an exact zero mean with zero spread.
    pub fn rel_se(&self) -> f64 {
        if self.se == 0.0 {
            0.0
        } else {
            self.se / self.mean.abs()
        }
    }
}

/// Sample mean and `s/√n`. Summation is sequential in input order.
pub fn mean_se(values: &[f64]) -> Estimate {
    let n = values.len();
    if n == 0 {
        return Estimate {
            mean: f64::NAN,
            se: f64::NAN,
            n,
        };
    }
    // Shifted by the first value: identical samples give their value exactly.
    let v0 = values[0];
    let mean = v0 + values.iter().map(|v| v - v0).sum::<f64>() / n as f64;
    if n < 2 {
        return Estimate { mean, se: 0.0, n };
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Estimate {
        mean,
        se: (ss / (n - 1) as f64 / n as f64).sqrt(),
        n,
    }
}

/// Batch-means estimate for a correlated series: `batches` equal blocks,
/// trailing remainder dropped.
pub fn batch_means(values: &[f64], batches: usize) -> Estimate {
    let b = batches.max(2).min(values.len().max(1));
    let len = values.len() / b;
    if len == 0 {
        return mean_se(values);
    }
    let means: Vec<f64> = (0..b)
        .map(|i| values[i * len..(i + 1) * len].iter().sum::<f64>() / len as f64)
        .collect();
    let e = mean_se(&means);
    Estimate { n: b * len, ..e }
}

/// Maps `f` over `0..n` in parallel and returns results in index order.
pub fn par_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Empirical `q`-quantile by the nearest-rank rule.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample() {
        let e = mean_se(&[2.0; 10]);
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.se, 0.0);
        assert_eq!(e.rel_se(), 0.0);
    }

    #[test]
    fn known_sample() {
        let e = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        // s² = 5/3
        assert!((e.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn batches_of_a_ramp() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let e = batch_means(&v, 4);
        assert_eq!(e.mean, 49.5);
        assert_eq!(e.n, 100);
        let e = batch_means(&v[..99], 4);
        assert_eq!(e.n, 96);
    }

    #[test]
    fn nearest_rank() {
        let v = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(quantile(&v, 0.95), 5.0);
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
    }

    #[test]
    fn parallel_order() {
        let v = par_indexed(1000, |i| Ok(i * 2)).unwrap();
        assert!(v.iter().enumerate().all(|(i, x)| *x == 2 * i as u64));
    }
}
