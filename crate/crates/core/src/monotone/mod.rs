//! Scalar maximal dissipative maps and their regularizations.
//!
//! A decreasing scalar function `f` with finitely many jumps is stored
//! together with its filled graph: at a jump `s_i` the graph contains the
//! whole interval `[f(s_i+), f(s_i-)]`. From this we build the resolvent
//! `J_α = (I - α f̄)^{-1}`, the Yosida approximation `F_α = (J_α - I)/α`
//! and the minimal section. Lifts to `R^n` and Gaussian smoothing live in
//! [`smoothing`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub mod smoothing;

pub use smoothing::{growth_constant, smooth_yosida, GaussianSmoother, SmoothingParams};

/// A jump of `f` at `at` with one-sided limits `left = f(at-)` and `right = f(at+)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub at: f64,
    pub left: f64,
    pub right: f64,
}

/// Polynomial growth bound `|f(s)| <= c3 (1 + |s|^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub c3: f64,
    pub m: u32,
}

impl Growth {
    pub fn bound(&self, s: f64) -> f64 {
        self.c3 * (1.0 + s.abs().powi(self.m as i32))
    }
}

/// Continuous, nonincreasing part of a scalar map, from a small registry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuousPart {
    Zero,
    /// `f(s) = slope * s`, `slope <= 0`.
    Linear { slope: f64 },
    /// `f(s) = -coeff * sign(s) |s|^power`.
    PowerOdd { coeff: f64, power: u32 },
    /// `f(s) = -s^3`.
    Cubic,
    /// Piecewise linear interpolation of `(x, y)` knots, constant outside.
    Table { knots: Vec<(f64, f64)> },
}

impl ContinuousPart {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ContinuousPart::Zero => 0.0,
            ContinuousPart::Linear { slope } => slope * s,
            ContinuousPart::PowerOdd { coeff, power } => {
                -coeff * s.signum() * s.abs().powi(*power as i32)
            }
            ContinuousPart::Cubic => -s * s * s,
            ContinuousPart::Table { knots } => table_eval(knots, s),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ContinuousPart::Zero | ContinuousPart::Cubic => Ok(()),
            ContinuousPart::Linear { slope } => {
                if *slope <= 0.0 && slope.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("slope", "linear part must have slope <= 0"))
                }
            }
            ContinuousPart::PowerOdd { coeff, power } => {
                if *coeff < 0.0 || !coeff.is_finite() {
                    return Err(invalid("coeff", "power_odd coefficient must be >= 0"));
                }
                if *power == 0 {
                    return Err(invalid("power", "power_odd exponent must be >= 1"));
                }
                Ok(())
            }
            ContinuousPart::Table { knots } => {
                if knots.is_empty() {
                    return Err(invalid("knots", "table needs at least one knot"));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(invalid("knots", "knot abscissae must increase"));
                    }
                    if w[1].1 > w[0].1 {
                        return Err(invalid("knots", "table values must be nonincreasing"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Solves `s - alpha * c(s) = target`.
    fn solve_shifted(&self, alpha: f64, target: f64, tol: f64, max_iter: usize) -> Result<f64> {
        match self {
            ContinuousPart::Zero => Ok(target),
            ContinuousPart::Linear { slope } => Ok(target / (1.0 - alpha * slope)),
            ContinuousPart::PowerOdd { coeff, power } => {
                solve_power(alpha * coeff, *power, target, tol, max_iter)
            }
            ContinuousPart::Cubic => solve_power(alpha, 3, target, tol, max_iter),
            ContinuousPart::Table { knots } => Ok(table_solve(knots, alpha, target)),
        }
    }
}

fn table_eval(knots: &[(f64, f64)], s: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if s <= first.0 {
        return first.1;
    }
    if s >= last.0 {
        return last.1;
    }
    let j = knots.partition_point(|k| k.0 <= s) - 1;
    let (x0, y0) = knots[j];
    let (x1, y1) = knots[j + 1];
    y0 + (y1 - y0) * (s - x0) / (x1 - x0)
}

fn table_solve(knots: &[(f64, f64)], alpha: f64, target: f64) -> f64 {
    let g = |k: &(f64, f64)| k.0 - alpha * k.1;
    let first = &knots[0];
    let last = &knots[knots.len() - 1];
    if target <= g(first) {
        return target + alpha * first.1;
    }
    if target >= g(last) {
        return target + alpha * last.1;
    }
    let j = knots.partition_point(|k| g(k) <= target) - 1;
    let (a, b) = (&knots[j], &knots[j + 1]);
    a.0 + (target - g(a)) * (b.0 - a.0) / (g(b) - g(a))
}

/// Solves `u + k sign(u)|u|^p = target` for `k >= 0` by Newton from above.
fn solve_power(k: f64, p: u32, target: f64, tol: f64, max_iter: usize) -> Result<f64> {
    if k == 0.0 || target == 0.0 {
        return Ok(target);
    }
    let abs_t = target.abs();
    // the root lies below both candidates; Newton on a convex increasing map
    // started to the right of the root converges monotonically
    let mut u = abs_t.min((abs_t / k).powf(1.0 / p as f64));
    for _ in 0..max_iter {
        let h = u + k * u.powi(p as i32) - abs_t;
        let dh = 1.0 + k * p as f64 * u.powi(p as i32 - 1);
        let next = (u - h / dh).max(0.0);
        if (u - next).abs() <= tol * 1e-3 * (1.0 + u) || h.abs() <= tol * 1e-3 {
            return Ok(target.signum() * next);
        }
        u = next;
    }
    Err(Error::IterationLimit {
        r: target,
        max_iter,
    })
}

/// Declarative description of a scalar map: jumps plus a named continuous part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarMapSpec {
    pub continuous: ContinuousPart,
    #[serde(default)]
    pub jumps: Vec<Jump>,
    pub growth: Growth,
}

impl ScalarMapSpec {
    /// `f(s) = -sign(s)`.
    pub fn neg_sign() -> Self {
        Self {
            continuous: ContinuousPart::Zero,
            jumps: vec![Jump {
                at: 0.0,
                left: 1.0,
                right: -1.0,
            }],
            growth: Growth { c3: 1.0, m: 1 },
        }
    }

    /// `f(s) = slope * s`.
    pub fn linear(slope: f64) -> Self {
        Self {
            continuous: ContinuousPart::Linear { slope },
            jumps: Vec::new(),
            growth: Growth {
                c3: slope.abs().max(1e-300),
                m: 1,
            },
        }
    }

    /// `f(s) = -s^3`.
    pub fn neg_cubic() -> Self {
        Self {
            continuous: ContinuousPart::Cubic,
            jumps: Vec::new(),
            growth: Growth { c3: 1.0, m: 3 },
        }
    }

    /// `1` below `-1`, `0` on `(-1, 1)`, `-1` above `1`.
    pub fn staircase() -> Self {
        Self {
            continuous: ContinuousPart::Zero,
            jumps: vec![
                Jump {
                    at: -1.0,
                    left: 1.0,
                    right: 0.0,
                },
                Jump {
                    at: 1.0,
                    left: 0.0,
                    right: -1.0,
                },
            ],
            growth: Growth { c3: 1.0, m: 1 },
        }
    }

    pub fn build(&self) -> Result<MultivaluedScalarMap> {
        MultivaluedScalarMap::new(self.continuous.clone(), self.jumps.clone(), self.growth)
    }
}

/// A nonincreasing scalar function with finitely many jumps, viewed as the
/// maximal monotone graph obtained by filling every jump.
#[derive(Clone, Debug, PartialEq)]
pub struct MultivaluedScalarMap {
    continuous: ContinuousPart,
    jumps: Vec<Jump>,
    growth: Growth,
    /// Constant added to the continuous part on each open segment; segment
    /// `k` is the interval left of `jumps[k]` (and the last one is unbounded).
    offsets: Vec<f64>,
}

impl MultivaluedScalarMap {
    pub fn new(continuous: ContinuousPart, mut jumps: Vec<Jump>, growth: Growth) -> Result<Self> {
        continuous.validate()?;
        if growth.c3 < 0.0 || !growth.c3.is_finite() {
            return Err(invalid("c3", "growth constant must be finite and >= 0"));
        }
        jumps.sort_by(|a, b| a.at.total_cmp(&b.at));
        for w in jumps.windows(2) {
            if w[0].at == w[1].at {
                return Err(Error::InconsistentJump {
                    at: w[0].at,
                    reason: "duplicate breakpoint".into(),
                });
            }
        }
        for j in &jumps {
            if !(j.at.is_finite() && j.left.is_finite() && j.right.is_finite()) {
                return Err(Error::InconsistentJump {
                    at: j.at,
                    reason: "non-finite entry".into(),
                });
            }
            if j.right > j.left {
                return Err(Error::InconsistentJump {
                    at: j.at,
                    reason: format!("f(s+) = {} exceeds f(s-) = {}", j.right, j.left),
                });
            }
        }
        let mut offsets = Vec::with_capacity(jumps.len() + 1);
        match jumps.first() {
            Some(first) => offsets.push(first.left - continuous.eval(first.at)),
            None => offsets.push(0.0),
        }
        for (i, j) in jumps.iter().enumerate() {
            let off = j.right - continuous.eval(j.at);
            if let Some(next) = jumps.get(i + 1) {
                let predicted = off + continuous.eval(next.at);
                let scale = 1.0 + predicted.abs().max(next.left.abs());
                if (predicted - next.left).abs() > 1e-9 * scale {
                    return Err(Error::InconsistentJump {
                        at: next.at,
                        reason: format!(
                            "left limit {} disagrees with continuation {} of the previous segment",
                            next.left, predicted
                        ),
                    });
                }
            }
            offsets.push(off);
        }
        let map = Self {
            continuous,
            jumps,
            growth,
            offsets,
        };
        map.check_growth()?;
        Ok(map)
    }

    fn check_growth(&self) -> Result<()> {
        let mut probes: Vec<f64> = (-400..=400).map(|i| i as f64 * 0.25).collect();
        for j in &self.jumps {
            probes.push(j.at);
        }
        for s in probes {
            let (lo, hi) = self.fill_graph(s);
            let bound = self.growth.bound(s) * (1.0 + 1e-12);
            if lo.abs() > bound || hi.abs() > bound {
                return Err(invalid(
                    "growth",
                    format!("|f({s})| exceeds c3 (1 + |s|^m) = {bound}"),
                ));
            }
        }
        Ok(())
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn continuous_part(&self) -> &ContinuousPart {
        &self.continuous
    }

    fn segment(&self, s: f64) -> usize {
        self.jumps.partition_point(|j| j.at < s)
    }

    fn breakpoint_at(&self, s: f64) -> Option<&Jump> {
        let k = self.segment(s);
        self.jumps.get(k).filter(|j| j.at == s)
    }

    /// Value of `f` at a continuity point (at a jump, the right limit).
    pub fn value(&self, s: f64) -> f64 {
        if let Some(j) = self.breakpoint_at(s) {
            return j.right;
        }
        self.continuous.eval(s) + self.offsets[self.segment(s)]
    }

    /// The filled graph `f̄(s)` as an interval `[lo, hi]`.
    pub fn fill_graph(&self, s: f64) -> (f64, f64) {
        match self.breakpoint_at(s) {
            Some(j) => (j.right, j.left),
            None => {
                let v = self.continuous.eval(s) + self.offsets[self.segment(s)];
                (v, v)
            }
        }
    }

    /// Element of `f̄(s)` with the smallest absolute value.
    pub fn minimal_section(&self, s: f64) -> f64 {
        let (lo, hi) = self.fill_graph(s);
        nearest_to_zero(lo, hi)
    }

    /// Resolvent `J_α(r)`: the unique `s` with `r ∈ s - α f̄(s)`.
    ///
    /// The jump intervals of `s ↦ s - α f̄(s)` are located first; inside a
    /// continuity segment the equation is solved in closed form (linear and
    /// table parts) or by monotone Newton (power parts).
    pub fn resolvent(&self, p: &YosidaParams, r: f64) -> Result<f64> {
        let alpha = p.alpha;
        let k = self
            .jumps
            .partition_point(|j| j.at - alpha * j.right < r);
        if let Some(j) = self.jumps.get(k) {
            if j.at - alpha * j.left <= r {
                return Ok(j.at);
            }
        }
        let target = r + alpha * self.offsets[k];
        let s = self
            .continuous
            .solve_shifted(alpha, target, p.bisection_tol, p.max_iter)?;
        // keep rounding from pushing the root across a breakpoint
        let lower = if k == 0 { f64::NEG_INFINITY } else { self.jumps[k - 1].at };
        let upper = self.jumps.get(k).map_or(f64::INFINITY, |j| j.at);
        Ok(s.clamp(lower, upper))
    }

    /// Resolvent by plain bisection on the filled graph, the slow general route.
    pub fn resolvent_by_bisection(&self, p: &YosidaParams, r: f64) -> Result<f64> {
        let alpha = p.alpha;
        // r - (s - α f̄(s)) as an interval; zero inside means r is in the image
        let residual = |s: f64| {
            let (lo, hi) = self.fill_graph(s);
            let image_lo = s - alpha * hi;
            let image_hi = s - alpha * lo;
            if r < image_lo {
                r - image_lo
            } else if r > image_hi {
                r - image_hi
            } else {
                0.0
            }
        };
        let m = self.growth.m as i32;
        let mut half_width = alpha * self.growth.c3 * (1.0 + r.abs().powi(m) + 1.0) + p.bisection_tol;
        let mut iters = 0usize;
        let (mut a, mut b) = loop {
            let (a, b) = (r - half_width, r + half_width);
            if residual(a) >= 0.0 && residual(b) <= 0.0 {
                break (a, b);
            }
            half_width *= 2.0;
            iters += 1;
            if iters > p.max_iter {
                return Err(Error::IterationLimit {
                    r,
                    max_iter: p.max_iter,
                });
            }
        };
        for _ in 0..p.max_iter {
            let mid = 0.5 * (a + b);
            let res = residual(mid);
            if res.abs() <= p.bisection_tol || b - a <= f64::EPSILON * (1.0 + mid.abs()) {
                return Ok(mid);
            }
            if res > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        Err(Error::IterationLimit {
            r,
            max_iter: p.max_iter,
        })
    }

    /// Yosida approximation `F_α(r) = (J_α(r) - r) / α`.
    pub fn yosida(&self, p: &YosidaParams, r: f64) -> Result<f64> {
        Ok((self.resolvent(p, r)? - r) / p.alpha)
    }
}

fn nearest_to_zero(lo: f64, hi: f64) -> f64 {
    if lo <= 0.0 && hi >= 0.0 {
        0.0
    } else if lo > 0.0 {
        lo
    } else {
        hi
    }
}

/// `[f(s+), f(s-)]` at a jump, `[f(s), f(s)]` elsewhere.
pub fn fill_graph(f: &MultivaluedScalarMap, s: f64) -> (f64, f64) {
    f.fill_graph(s)
}

pub fn resolvent_scalar(f: &MultivaluedScalarMap, p: &YosidaParams, r: f64) -> Result<f64> {
    f.resolvent(p, r)
}

pub fn yosida_scalar(f: &MultivaluedScalarMap, p: &YosidaParams, r: f64) -> Result<f64> {
    f.yosida(p, r)
}

pub fn minimal_section(f: &MultivaluedScalarMap, s: f64) -> f64 {
    f.minimal_section(s)
}

/// Minimal-norm element of an interval `[lo, hi]`.
pub fn minimal_element(lo: f64, hi: f64) -> f64 {
    nearest_to_zero(lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YosidaParams {
    pub alpha: f64,
    #[serde(default = "default_bisection_tol")]
    pub bisection_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_bisection_tol() -> f64 {
    1e-12
}

fn default_max_iter() -> usize {
    200
}

impl YosidaParams {
    pub fn new(alpha: f64) -> Result<Self> {
        let p = Self {
            alpha,
            bisection_tol: default_bisection_tol(),
            max_iter: default_max_iter(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", "must be > 0"));
        }
        if !(self.bisection_tol > 0.0) {
            return Err(invalid("bisection_tol", "must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be positive"));
        }
        Ok(())
    }
}

/// How the multivalued map is turned into a single-valued drift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selection {
    MinimalSection,
    Yosida(YosidaParams),
}

/// A scalar map together with the single-valued selection used in simulation.
#[derive(Clone, Debug)]
pub struct SelectedScalar {
    pub map: MultivaluedScalarMap,
    pub selection: Selection,
}

impl SelectedScalar {
    pub fn new(map: MultivaluedScalarMap, selection: Selection) -> Self {
        Self { map, selection }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> Result<f64> {
        match &self.selection {
            Selection::MinimalSection => Ok(self.map.minimal_section(s)),
            Selection::Yosida(p) => self.map.yosida(p, s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yp(alpha: f64) -> YosidaParams {
        YosidaParams::new(alpha).unwrap()
    }

    /// Brute-force inclusion check: scan a fine grid for the s minimizing the
    /// distance of r to the filled image interval.
    fn grid_resolvent(f: &MultivaluedScalarMap, alpha: f64, r: f64) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for i in -200_000..=200_000 {
            let s = i as f64 * 1e-4;
            let (lo, hi) = f.fill_graph(s);
            let (a, b) = (s - alpha * hi, s - alpha * lo);
            let d = if r < a { a - r } else if r > b { r - b } else { 0.0 };
            if d < best.0 {
                best = (d, s);
            }
        }
        best.1
    }

    #[test]
    fn fill_graph_examples() {
        let sign = ScalarMapSpec::neg_sign().build().unwrap();
        assert_eq!(sign.fill_graph(0.0), (-1.0, 1.0));
        assert_eq!(sign.fill_graph(0.5), (-1.0, -1.0));
        let lin = ScalarMapSpec::linear(-1.0).build().unwrap();
        assert_eq!(lin.fill_graph(2.0), (-2.0, -2.0));
    }

    #[test]
    fn resolvent_examples() {
        let lin = ScalarMapSpec::linear(-1.0).build().unwrap();
        assert!((lin.resolvent(&yp(0.5), 3.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((lin.yosida(&yp(0.5), 2.0).unwrap() + 4.0 / 3.0).abs() < 1e-14);

        let sign = ScalarMapSpec::neg_sign().build().unwrap();
        let j = sign.resolvent(&yp(1.0), 0.5).unwrap();
        assert_eq!(j, 0.0);
        assert!((grid_resolvent(&sign, 1.0, 0.5) - j).abs() < 1e-4);
        let j = sign.resolvent(&yp(1.0), 3.0).unwrap();
        assert!((j - 2.0).abs() < 1e-14);
        assert!((grid_resolvent(&sign, 1.0, 3.0) - j).abs() < 1e-4);
        assert!((sign.yosida(&yp(1.0), 0.5).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn yosida_vanishes_at_zero_of_f() {
        let cubic = ScalarMapSpec::neg_cubic().build().unwrap();
        for alpha in [1.0, 0.1, 1e-3] {
            assert_eq!(cubic.yosida(&yp(alpha), 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn minimal_section_examples() {
        let sign = ScalarMapSpec::neg_sign().build().unwrap();
        assert_eq!(sign.minimal_section(0.0), 0.0);
        assert_eq!(minimal_element(2.0, 5.0), 2.0);
        assert_eq!(minimal_element(-5.0, -2.0), -2.0);
    }

    #[test]
    fn fast_and_bisection_routes_agree() {
        let table = ScalarMapSpec {
            continuous: ContinuousPart::Table {
                knots: vec![(-2.0, 3.0), (0.0, 0.5), (1.0, -0.5), (4.0, -2.0)],
            },
            jumps: vec![Jump {
                at: 0.5,
                left: 0.0,
                right: -0.3,
            }],
            growth: Growth { c3: 3.5, m: 1 },
        };
        let maps = [
            ScalarMapSpec::neg_sign(),
            ScalarMapSpec::linear(-2.0),
            ScalarMapSpec::neg_cubic(),
            ScalarMapSpec::staircase(),
            table,
        ];
        for spec in maps {
            let f = spec.build().unwrap();
            for alpha in [2.0, 0.3, 1e-3] {
                let p = yp(alpha);
                for i in -60..=60 {
                    let r = i as f64 * 0.1 + 0.013;
                    let fast = f.resolvent(&p, r).unwrap();
                    let slow = f.resolvent_by_bisection(&p, r).unwrap();
                    assert!(
                        (fast - slow).abs() < 1e-9 * (1.0 + fast.abs()),
                        "{spec:?} alpha={alpha} r={r}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn inconsistent_jumps_rejected() {
        let bad = ScalarMapSpec {
            continuous: ContinuousPart::Zero,
            jumps: vec![
                Jump { at: 0.0, left: 1.0, right: 0.0 },
                Jump { at: 1.0, left: 0.5, right: -1.0 },
            ],
            growth: Growth { c3: 1.0, m: 1 },
        };
        assert!(matches!(bad.build(), Err(Error::InconsistentJump { .. })));
        let increasing = ScalarMapSpec {
            continuous: ContinuousPart::Zero,
            jumps: vec![Jump { at: 0.0, left: -1.0, right: 1.0 }],
            growth: Growth { c3: 1.0, m: 1 },
        };
        assert!(increasing.build().is_err());
        assert!(ScalarMapSpec::linear(1.0).build().is_err());
    }

    #[test]
    fn growth_violation_rejected() {
        let mut spec = ScalarMapSpec::neg_cubic();
        spec.growth = Growth { c3: 1.0, m: 2 };
        assert!(spec.build().is_err());
    }

    #[test]
    fn invalid_alpha_rejected() {
        assert!(YosidaParams::new(0.0).is_err());
        assert!(YosidaParams::new(-1.0).is_err());
    }
}
