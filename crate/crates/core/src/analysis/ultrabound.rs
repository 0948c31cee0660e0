//! Superlinear rate functions `Φ`, the tail integral `Ψ(s) = ∫_s^∞ dr/Φ(r)`,
//! and the deterministic contraction bound for `y' = a - Φ(y)/2`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Positive, strictly increasing, superlinear.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiSpec {
    /// `Φ(s) = s^m`, `m > 1`.
    Power { m: f64 },
    /// Piecewise linear through `(s, Φ(s))` knots starting at `s = 0`,
    /// continued past the last knot by the power law through the last two.
    Table { knots: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UltraboundSpec {
    pub phi: PhiSpec,
    /// Constant of the two-point dissipativity condition `⟨…⟩ ≤ c - Φ(|x-y|²)`.
    #[serde(default)]
    pub c: f64,
    /// Constant of the scalar comparison ODE `y' = a - Φ₀(y)`.
    pub a: f64,
}

impl PhiSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power { m } => {
                if !(*m > 1.0 && m.is_finite()) {
                    return Err(Error::DivergentTail(format!("power m = {m} is not superlinear")));
                }
            }
            Self::Table { knots } => {
                if knots.len() < 2 {
                    return Err(invalid("phi.knots", "need at least two knots"));
                }
                if knots[0].0 != 0.0 {
                    return Err(invalid("phi.knots", "first knot must be at s = 0"));
                }
                if knots.iter().any(|(s, v)| !s.is_finite() || !v.is_finite() || *v < 0.0) {
                    return Err(invalid("phi.knots", "values must be finite and >= 0"));
                }
                if knots.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
                    return Err(invalid("phi.knots", "Φ must be strictly increasing"));
                }
                if knots[knots.len() - 2].1 <= 0.0 {
                    return Err(invalid("phi.knots", "tail knots must be positive"));
                }
                let k = self.tail_exponent();
                if !(k > 1.0 + 1e-9) {
                    return Err(Error::DivergentTail(format!("tail exponent {k} is not superlinear")));
                }
            }
        }
        Ok(())
    }

    fn tail_exponent(&self) -> f64 {
        match self {
            Self::Power { m } => *m,
            Self::Table { knots } => {
                let (s1, v1) = knots[knots.len() - 2];
                let (s2, v2) = knots[knots.len() - 1];
                (v2 / v1).ln() / (s2 / s1).ln()
            }
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Power { m } => s.powf(*m),
            Self::Table { knots } => {
                let (sl, vl) = knots[knots.len() - 1];
                if s >= sl {
                    return vl * (s / sl).powf(self.tail_exponent());
                }
                let i = knots.partition_point(|(k, _)| *k <= s).max(1);
                let (s0, v0) = knots[i - 1];
                let (s1, v1) = knots[i];
                v0 + (v1 - v0) * (s - s0) / (s1 - s0)
            }
        }
    }

    /// Solves `Φ(s) = v` for `v ≥ Φ(0)`.
    pub fn inverse(&self, v: f64) -> f64 {
        match self {
            Self::Power { m } => v.max(0.0).powf(1.0 / m),
            Self::Table { .. } => {
                let (mut lo, mut hi) = (0.0, 1.0);
                while self.eval(hi) < v {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    if self.eval(mid) < v {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }
}

impl UltraboundSpec {
    pub fn validate(&self) -> Result<()> {
        self.phi.validate()?;
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(invalid("ultrabound.a", "must be > 0"));
        }
        // s/Φ(s) must decrease to zero along a sampled grid.
        let ratios: Vec<f64> = (0..40).map(|i| 2f64.powi(i) / self.phi.eval(2f64.powi(i))).collect();
        if ratios.windows(2).skip(20).any(|w| w[1] > w[0]) || ratios[39] > 1e-3 {
            return Err(Error::DivergentTail("s/Φ(s) does not vanish on the sampled grid".into()));
        }
        Ok(())
    }

    pub fn phi0(&self, s: f64) -> f64 {
        0.5 * self.phi.eval(s)
    }

    pub fn phi0_inverse(&self, v: f64) -> f64 {
        self.phi.inverse(2.0 * v)
    }

    /// `Φ₀⁻¹(2a)`; the ODE cannot leave `[0, level]` once inside.
    pub fn case1_level(&self) -> f64 {
        self.phi0_inverse(2.0 * self.a)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `Ψ(s) = ∫_s^∞ dr / Φ(r)` for `s > 0`. Power laws are integrated in
/// closed form; tables by quadrature in `ln r` up to the last knot plus the
/// exact power-law tail.
pub fn psi(spec: &UltraboundSpec, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid("s", "Ψ needs s > 0"));
    }
    spec.phi.validate()?;
    match &spec.phi {
        PhiSpec::Power { m } => Ok(s.powf(1.0 - m) / (m - 1.0)),
        PhiSpec::Table { knots } => {
            let k = spec.phi.tail_exponent();
            let sl = knots[knots.len() - 1].0;
            let start = s.max(sl);
            let tail = start / (spec.phi.eval(start) * (k - 1.0));
            if s >= sl {
                return Ok(tail);
            }
            if spec.phi.eval(s) <= 0.0 {
                return Err(Error::DivergentTail(format!("Φ({s}) = 0")));
            }
            // Split at knots so every piece is smooth.
            let mut total = tail;
            let mut lo = s;
            for &(kn, _) in knots.iter().filter(|(kn, _)| *kn > s) {
                let (a, b) = (lo.ln(), kn.ln());
                total += integrate(|u| u.exp() / spec.phi.eval(u.exp()), a, b, 1e-14);
                lo = kn;
            }
            Ok(total)
        }
    }
}

/// Solves `Ψ(s) = v` for `v > 0`.
pub fn psi_inverse(spec: &UltraboundSpec, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(invalid("v", "Ψ⁻¹ needs v > 0"));
    }
    match &spec.phi {
        PhiSpec::Power { m } => {
            spec.phi.validate()?;
            Ok(((m - 1.0) * v).powf(-1.0 / (m - 1.0)))
        }
        PhiSpec::Table { .. } => psi_inverse_by_bisection(spec, v),
    }
}

/// Bisection in `ln s` on the strictly decreasing `Ψ`.
pub fn psi_inverse_by_bisection(spec: &UltraboundSpec, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(invalid("v", "Ψ⁻¹ needs v > 0"));
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while psi(spec, lo)? < v {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(invalid("v", format!("Ψ stays below {v} near zero")));
        }
    }
    while psi(spec, hi)? > v {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(invalid("v", format!("Ψ stays above {v}")));
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if psi(spec, mid.exp())? > v {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// `exp[λ(1 + Ψ⁻¹(t/4)) / (1 - e^{-ωt/2})²]`.
pub fn ultrabound_envelope(spec: &UltraboundSpec, lambda: f64, omega: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("t", "must be > 0"));
    }
    let denom = (-(-omega * t / 2.0).exp_m1()).powi(2);
    Ok((lambda * (1.0 + psi_inverse(spec, t / 4.0)?) / denom).exp())
}

/// Smallest `λ` whose envelope dominates `exp(obs)` at every `(t, obs)`.
pub fn fit_envelope_lambda(spec: &UltraboundSpec, omega: f64, observations: &[(f64, f64)]) -> Result<f64> {
    let mut best = 0.0f64;
    for &(t, obs) in observations {
        let denom = (-(-omega * t / 2.0).exp_m1()).powi(2);
        best = best.max(obs * denom / (1.0 + psi_inverse(spec, t / 4.0)?));
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionPoint {
    pub t: f64,
    pub y: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    pub y0: f64,
    pub level: f64,
    pub points: Vec<ContractionPoint>,
    /// Largest `y(t) - bound(t)` on the grid.
    pub max_excess: f64,
    pub bound_holds: bool,
    /// Whether `y0 ≤ Φ₀⁻¹(2a)`.
    pub case1: bool,
    /// Every integration step stayed `≤ Φ₀⁻¹(2a)` (only meaningful with `case1`).
    pub case1_holds: bool,
}

/// Integration step of the comparison ODE.
pub const ODE_STEP: f64 = 1e-4;
/// Absolute slack on the contraction bound.
pub const BOUND_SLACK: f64 = 1e-6;

fn rk4(spec: &UltraboundSpec, y: f64, h: f64) -> f64 {
    let f = |y: f64| spec.a - spec.phi0(y.max(0.0));
    let k1 = f(y);
    let k2 = f(y + 0.5 * h * k1);
    let k3 = f(y + 0.5 * h * k2);
    let k4 = f(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `y' = a - Φ₀(y)` by classical RK4 and compares with
/// `Ψ⁻¹(t/4) + Φ₀⁻¹(2a)` on `t_grid` (positive times).
pub fn check_contraction_bound(spec: &UltraboundSpec, y0: f64, t_grid: &[f64]) -> Result<ContractionReport> {
    spec.validate()?;
    if !(y0 >= 0.0 && y0.is_finite()) {
        return Err(invalid("y0", "must be finite and >= 0"));
    }
    let mut grid = t_grid.to_vec();
    if grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(invalid("t_grid", "times must be positive and finite"));
    }
    grid.sort_by(f64::total_cmp);
    let level = spec.case1_level();
    let case1 = y0 <= level;
    let mut case1_holds = true;
    let mut y = y0;
    let mut t = 0.0f64;
    let mut step = 0u64;
    let mut points = Vec::with_capacity(grid.len());
    let mut max_excess = f64::NEG_INFINITY;
    for &tg in &grid {
        while (step + 1) as f64 * ODE_STEP <= tg {
            y = rk4(spec, y, ODE_STEP);
            step += 1;
            t = step as f64 * ODE_STEP;
            case1_holds &= y <= level;
        }
        let yg = if tg > t { rk4(spec, y, tg - t) } else { y };
        case1_holds &= yg <= level;
        let bound = psi_inverse(spec, tg / 4.0)? + level;
        max_excess = max_excess.max(yg - bound);
        points.push(ContractionPoint { t: tg, y: yg, bound });
    }
    Ok(ContractionReport {
        y0,
        level,
        points,
        max_excess,
        bound_holds: max_excess <= BOUND_SLACK,
        case1,
        case1_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(m: f64, a: f64) -> UltraboundSpec {
        UltraboundSpec {
            phi: PhiSpec::Power { m },
            c: 0.0,
            a,
        }
    }

    #[test]
    fn psi_examples() {
        assert!((psi(&power(2.0, 1.0), 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((psi_inverse(&power(2.0, 1.0), 0.25).unwrap() - 4.0).abs() < 1e-14);
        assert!((psi(&power(3.0, 1.0), 1.0).unwrap() - 0.5).abs() < 1e-15);
        // Ψ⁻¹(1) = 1 for Φ = s², the envelope input at t = 4.
        assert!((psi_inverse(&power(2.0, 1.0), 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_closed_form_against_quadrature() {
        for m in [1.5, 2.0, 3.0, 4.0] {
            let spec = power(m, 1.0);
            for s in [0.1, 1.0, 3.0] {
                // r = s e^u on [0, 60] captures all but s^{1-m} e^{-60(m-1)}/(m-1).
                let q = integrate(|u| s * u.exp() / (s * u.exp()).powf(m), 0.0, 60.0, 1e-13);
                let v = psi(&spec, s).unwrap();
                assert!((q - v).abs() < 1e-9 * v, "m = {m}, s = {s}: {q} vs {v}");
            }
        }
    }

    #[test]
    fn table_matching_a_power_law() {
        // Φ(s) = s² sampled on a fine grid reproduces Ψ(s) = 1/s above the
        // first knot (the chords lie above the parabola, so Ψ is a bit smaller).
        let knots: Vec<(f64, f64)> = (0..=2000).map(|i| {
            let s = i as f64 * 0.01;
            (s, s * s)
        }).collect();
        let spec = UltraboundSpec {
            phi: PhiSpec::Table { knots },
            c: 0.0,
            a: 1.0,
        };
        spec.validate().unwrap();
        for s in [0.5, 1.0, 5.0, 25.0] {
            let v = psi(&spec, s).unwrap();
            assert!((v - 1.0 / s).abs() < 1e-4 / s, "s = {s}: {v}");
            assert!(v <= 1.0 / s + 1e-14);
        }
        for s in [0.3, 1.0, 7.0, 40.0] {
            let back = psi_inverse(&spec, psi(&spec, s).unwrap()).unwrap();
            assert!((back - s).abs() <= 1e-8 * (1.0 + s), "s = {s}: {back}");
        }
    }

    #[test]
    fn sublinear_tail_rejected() {
        let spec = UltraboundSpec {
            phi: PhiSpec::Table {
                knots: vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)],
            },
            c: 0.0,
            a: 1.0,
        };
        assert!(matches!(psi(&spec, 1.0), Err(Error::DivergentTail(_))));
        assert!(matches!(power(1.0, 1.0).validate(), Err(Error::DivergentTail(_))));
    }

    #[test]
    fn contraction_examples() {
        let spec = power(2.0, 1.0);
        let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.1).collect();
        let r = check_contraction_bound(&spec, 10.0, &grid).unwrap();
        assert!((r.level - 2.0).abs() < 1e-15);
        assert!(r.bound_holds, "excess {}", r.max_excess);
        for p in &r.points {
            assert!((p.bound - (4.0 / p.t + 2.0)).abs() < 1e-12);
        }
        let r = check_contraction_bound(&spec, 0.0, &grid).unwrap();
        assert!(r.case1 && r.case1_holds);
        // At the level, y' = a - 2a < 0.
        let r = check_contraction_bound(&spec, 2.0, &[1e-4]).unwrap();
        assert!(r.points[0].y < 2.0);
        assert!(r.case1_holds);
    }

    #[test]
    fn envelope_behaviour() {
        let spec = power(2.0, 1.0);
        let e = ultrabound_envelope(&spec, 0.7, 2.0, 1e6).unwrap();
        assert!((e - 0.7f64.exp()).abs() < 1e-5);
        let e4 = ultrabound_envelope(&spec, 0.5, 1.0, 4.0).unwrap();
        let manual = (0.5 * 2.0 / (1.0 - (-2.0f64).exp()).powi(2)).exp();
        assert!((e4 - manual).abs() < 1e-12 * manual);
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let v = ultrabound_envelope(&spec, 0.3, 1.5, i as f64 * 0.1).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn fitted_lambda_dominates() {
        let spec = power(3.0, 1.0);
        let obs = [(0.5, 3.0), (1.0, 1.2), (4.0, 0.4)];
        let lam = fit_envelope_lambda(&spec, 1.0, &obs).unwrap();
        for (t, o) in obs {
            assert!(ultrabound_envelope(&spec, lam, 1.0, t).unwrap().ln() >= o - 1e-12);
        }
    }
}
