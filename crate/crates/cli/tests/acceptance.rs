//! Acceptance battery. Runs every criterion at its stated tolerance, prints
//! one `[PASS]`/`[FAIL]` line per criterion and exits non-zero on any failure.
//!
//! Oracles live here, not in the library: closed-form Gaussian moments, the
//! matrix exponential, and the explicit solution of `y' = a - y²/2`.

use std::f64::consts::{E, PI};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dissipde::analysis::semigroup::estimate_functional;
use dissipde::analysis::{
    check_contraction_bound, check_gradient_estimate, check_harnack, estimate_invariant, harnack_constant, ou_exact,
    Functional, PhiSpec, TestFunction, UltraboundSpec,
};
use dissipde::coupling::{girsanov_moment_bound, run_coupling_batch, CouplingConfig, CouplingSummary};
use dissipde::sde::{IntegratorConfig, Scheme, Stepper};
use dissipde::spectral::{Drift, ModelSpec, Sigma};
use dissipde::{MultivaluedScalarMap, ScalarMapSpec, SpectralModel, YosidaParams};
use dissipde_cli::config::{bundled, regularize, ExperimentConfig, BUNDLED};
use dissipde_cli::experiments::exact_harnack_ratio;
use dissipde_cli::{replay, run, Experiment};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn config(name: &str) -> ExperimentConfig {
    let b = bundled(name).expect("bundled config");
    dissipde_cli::config::parse(b.text, &[], None).expect("bundled config parses")
}

fn model_spec(name: &str) -> ModelSpec {
    config(name).model.expect("model section")
}

fn model(name: &str) -> SpectralModel {
    SpectralModel::from_spec(&model_spec(name)).expect("model builds")
}

fn unit(n: usize, k: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = s;
    v
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------- 1

/// Pairs are drawn uniformly from [-2, 2], which contains every breakpoint of
/// the four maps with margin.
fn yosida_suite() -> Verdict {
    let maps = [
        ("-s", ScalarMapSpec::linear(-1.0)),
        ("-sign", ScalarMapSpec::neg_sign()),
        ("-s^3", ScalarMapSpec::neg_cubic()),
        ("staircase", ScalarMapSpec::staircase()),
    ];
    let alphas = [1e-1, 1e-2, 1e-3];
    let mut rng = ChaCha8Rng::seed_from_u64(0x9051da);
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, spec) in &maps {
        let f: MultivaluedScalarMap = spec.build().unwrap();
        let jumps: Vec<f64> = f.jumps().iter().map(|j| j.at).collect();
        let (mut expand, mut dissip, mut lip, mut dom, mut conv, mut routes, mut conv_pts) = (0, 0, 0, 0, 0, 0, 0);
        let mut nonmonotone = 0;
        let mut worst_conv = 0.0f64;
        let mut worst_r = f64::NAN;
        for _ in 0..1000 {
            let r1 = uniform(&mut rng, -2.0, 2.0);
            let r2 = uniform(&mut rng, -2.0, 2.0);
            let dr = (r1 - r2).abs();
            for &a in &alphas {
                let p = YosidaParams::new(a).unwrap();
                let (j1, j2) = (f.resolvent(&p, r1).unwrap(), f.resolvent(&p, r2).unwrap());
                let (f1, f2) = (f.yosida(&p, r1).unwrap(), f.yosida(&p, r2).unwrap());
                // F = (J - r)/α amplifies rounding by 1/α
                let eps = 1e-13 / a * (1.0 + r1.abs() + r2.abs());
                expand += ((j1 - j2).abs() > dr + 1e-14) as usize;
                dissip += ((f1 - f2) * (r1 - r2) > eps * dr) as usize;
                lip += ((f1 - f2).abs() > 2.0 / a * dr + eps) as usize;
                for (r, fa) in [(r1, f1), (r2, f2)] {
                    dom += (fa.abs() > f.minimal_section(r).abs() + eps) as usize;
                    let jb = f.resolvent_by_bisection(&p, r).unwrap();
                    routes += ((jb - f.resolvent(&p, r).unwrap()).abs() > 1e-9 * (1.0 + r.abs())) as usize;
                }
            }
            for r in [r1, r2] {
                if jumps.contains(&r) {
                    continue;
                }
                conv_pts += 1;
                let fr = f.value(r);
                let errs: Vec<f64> = alphas
                    .iter()
                    .map(|&a| (f.yosida(&YosidaParams::new(a).unwrap(), r).unwrap() - fr).abs())
                    .collect();
                // error must not grow as α decreases
                nonmonotone += errs.windows(2).any(|w| w[1] > w[0] + 1e-12 * (1.0 + fr.abs())) as usize;
                let err = errs[errs.len() - 1];
                let tol = 1e-2 * (1.0 + fr.abs());
                if err / tol > worst_conv {
                    worst_conv = err / tol;
                    worst_r = r;
                }
                conv += (err > tol) as usize;
            }
        }
        let ok = expand + dissip + lip + dom + conv + routes + nonmonotone == 0;
        pass &= ok;
        notes.push(format!(
            "{name}: expansive {expand}, non-dissipative {dissip}, lipschitz {lip}, domination {dom}, \
             routes {routes}, non-monotone {nonmonotone}, convergence {conv}/{conv_pts} (worst err/tol {worst_conv:.3} at r = {worst_r:.5})"
        ));
    }
    verdict(pass, notes.join("; "))
}

// ---------------------------------------------------------------- 2

fn slope(dts: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn integrator_order() -> Verdict {
    // A + L with a nondiagonal dissipative L; noise is numerically zero
    let a = vec![-1.0, -4.0, -9.0];
    let l = DMatrix::from_row_slice(3, 3, &[-0.5, 0.3, 0.1, 0.3, -0.8, 0.2, 0.1, 0.2, -0.6]);
    let full = DMatrix::from_diagonal(&DVector::from_vec(a.clone())) + &l;
    let m = SpectralModel::new(a, -1.0, Sigma::diagonal(vec![1e-200; 3]).unwrap(), Drift::Linear(l), None).unwrap();
    let x0 = [1.0, -0.5, 0.25];
    let exact = full.exp() * DVector::from_row_slice(&x0);
    let dts = [1e-2, 1e-3, 1e-4];
    let mut pass = true;
    let mut notes = Vec::new();
    for scheme in [Scheme::ExponentialEuler, Scheme::EulerMaruyama] {
        let errs: Vec<f64> = dts
            .iter()
            .map(|&dt| {
                let mut cfg = IntegratorConfig::new(dt, 1.0, 0);
                cfg.scheme = scheme;
                let st = Stepper::new(&m, &cfg).unwrap();
                let zero = [0.0; 3];
                let mut x = x0.to_vec();
                for k in 0..st.grid().steps {
                    x = st.advance(k, &x, &zero).unwrap();
                }
                (DVector::from_vec(x) - &exact).norm()
            })
            .collect();
        let s = slope(&dts, &errs);
        pass &= (s - 1.0).abs() <= 0.15;
        notes.push(format!("{scheme:?} slope {s:.4}"));
    }

    // E|X_t|² for the 8-mode OU: Σ (e^{a t} x_k)² + (1 - e^{2 a t}) / (-2a)
    let ou = model("ou_8mode");
    let x0 = unit(8, 0, 1.0);
    let t = 0.5;
    let exact: f64 = (1..=8)
        .map(|k| {
            let ak = -PI * PI * (k * k) as f64;
            (ak * t).exp().powi(2) * x0[k - 1] * x0[k - 1] + (1.0 - (2.0 * ak * t).exp()) / (-2.0 * ak)
        })
        .sum();
    let cfg = IntegratorConfig::new(1e-3, t, 4242);
    let e = estimate_functional(&ou, &cfg, &x0, 10_000, |x| x.iter().map(|v| v * v).sum()).unwrap();
    let z = (e.mean - exact) / e.se;
    pass &= z.abs() <= 3.0;
    notes.push(format!("OU E|X|² {:.6} vs {exact:.6} (z = {z:.2})", e.mean));
    verdict(pass, notes.join("; "))
}

// ---------------------------------------------------------------- 3, 4

fn coupling_setup(name: &str) -> (SpectralModel, CouplingConfig, Vec<f64>, Vec<f64>) {
    let cfg = config(name);
    let m = SpectralModel::from_spec(cfg.model.as_ref().unwrap()).unwrap();
    let n = m.dim();
    let (x0, y0) = (cfg.params.x0(n), cfg.params.y0(n));
    let icfg = IntegratorConfig::new(1e-3, 1.0, cfg.seed);
    (m, CouplingConfig::new(icfg, 2.0, 1e-4), x0, y0)
}

fn coupling_suite() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["ou_8mode", "example54_n8_alpha1e-2"] {
        let (m, cc, x0, y0) = coupling_setup(name);
        let s = run_coupling_batch(&m, &cc, &x0, &y0, 1000).unwrap();
        let frac = s.iter().filter(|p| p.coupled()).count() as f64 / s.len() as f64;
        let excess = s.iter().map(|p| p.contraction_excess).fold(f64::NEG_INFINITY, f64::max);
        let split = s.iter().filter(|p| !p.identical_after_tau).count();
        let ok = frac >= 0.99 && excess <= 0.0 && split == 0;
        pass &= ok;
        notes.push(format!(
            "{name}: coupled {frac:.3}, max contraction excess {excess:.3e}, paths split after tau {split}"
        ));
    }
    verdict(pass, notes.join("; "))
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn girsanov_suite() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["ou_8mode", "example54_n8_alpha1e-2"] {
        let (m, cc, x0, y0) = coupling_setup(name);
        let s: Vec<CouplingSummary> = run_coupling_batch(&m, &cc, &x0, &y0, 10_000).unwrap();
        let (mr, se) = mean_se(&s.iter().map(|p| p.log_r.exp()).collect::<Vec<_>>());
        let mart = (mr - 1.0).abs() <= 3.0 * se;
        pass &= mart;
        let mut line = format!("{name}: E[R] = {mr:.6} ± {se:.2e}");
        let d0 = x0.iter().zip(&y0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        for p in [1.5, 2.0, 4.0] {
            let q = p / (p - 1.0);
            let (mq, seq) = mean_se(&s.iter().map(|r| (q * r.log_r).exp()).collect::<Vec<_>>());
            let lhs = mq.powf(p - 1.0);
            let rel = (p - 1.0) * seq / mq;
            let bound = girsanov_moment_bound(m.sigma_inv_norm(), p, m.omega(), 1.0, d0);
            let ok = lhs <= bound * (1.0 + 3.0 * rel);
            pass &= ok;
            line.push_str(&format!(", p={p}: {lhs:.6} vs {bound:.7} ({})", if ok { "ok" } else { "exceeds" }));
        }
        notes.push(line);
    }
    verdict(pass, notes.join("; "))
}

// ---------------------------------------------------------------- 5

/// `p_t exp(λ⟨e_1, ·⟩)(x)` for one mode with `a = -1`, `σ = 1`.
fn ou1_exp(t: f64, x: f64, lambda: f64) -> f64 {
    let v = (1.0 - (-2.0 * t).exp()) / 2.0;
    (lambda * (-t).exp() * x + lambda * lambda * v / 2.0).exp()
}

fn harnack_exact_grid() -> Verdict {
    let m = model("ou_1mode");
    let p = 2.0;
    let mut worst = f64::NEG_INFINITY;
    let mut tight = 0.0f64;
    let mut mismatch = 0.0f64;
    for t in [0.1f64, 0.3, 1.0, 3.0, 10.0] {
        for d in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let v = (1.0 - (-2.0 * t).exp()) / 2.0;
            // the optimizing λ makes the inequality an equality
            let star = (-t).exp() * d / ((p - 1.0) * v);
            let c = (p / (p - 1.0) * d * d / ((2.0 * t).exp() - 1.0)).exp();
            for lambda in [0.25, 1.0, star] {
                let ratio = ou1_exp(t, d, lambda).powf(p) / (ou1_exp(t, 0.0, p * lambda) * c);
                worst = worst.max(ratio - 1.0);
                if lambda == star {
                    tight = tight.max((ratio - 1.0).abs());
                }
                let f = TestFunction::ExpLinear {
                    h: vec![1.0],
                    lambda,
                };
                let lib = exact_harnack_ratio(&m, t, &[d], &[0.0], &f, p).unwrap();
                mismatch = mismatch.max((lib - ratio).abs() / ratio);
                let hc = harnack_constant(m.sigma_inv_norm(), p, m.omega(), t, d);
                mismatch = mismatch.max((hc - c).abs() / c);
            }
        }
    }
    verdict(
        worst <= 1e-10 && mismatch <= 1e-12,
        format!(
            "max ratio - 1 = {worst:.2e} over 5x5 (t, |x-y|) x 3 lambda; |ratio - 1| at optimal lambda {tight:.2e}; \
             library vs oracle rel diff {mismatch:.2e}"
        ),
    )
}

fn harnack_randomized() -> Verdict {
    let names = ["ou_1mode", "ou_8mode", "example54_n8_alpha1e-2"];
    let models: Vec<SpectralModel> = names.iter().map(|n| model(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4a7c);
    let mut fails = 0;
    let mut beyond5 = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut lines = Vec::new();
    for i in 0..20 {
        let k = i % 3;
        let m = &models[k];
        let n = m.dim();
        let p = uniform(&mut rng, 1.5, 4.0);
        let t = uniform(&mut rng, 0.2, 1.0);
        let d = uniform(&mut rng, 0.2, 2.0);
        let mut u: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
        u[0] = u[0].abs() + 0.5;
        let un = norm(&u);
        let x: Vec<f64> = u.iter().map(|v| d * v / un).collect();
        let y = vec![0.0; n];
        let f = match i % 3 {
            0 => TestFunction::ExpLinear {
                h: unit(n, 0, 1.0),
                lambda: uniform(&mut rng, 0.1, 0.5),
            },
            1 => TestFunction::GaussianBump {
                center: unit(n, 0, 0.5 * d),
                width: uniform(&mut rng, 0.3, 1.5),
            },
            _ => TestFunction::BoundedRational {
                center: unit(n, 0, d),
                scale: uniform(&mut rng, 0.3, 1.5),
            },
        };
        let dt = if k == 0 { 1e-2 } else { 1e-3 };
        let cfg = IntegratorConfig::new(dt, t, 1000 + i as u64);
        let r = check_harnack(m, &cfg, &x, &y, &f, p, 4000).unwrap();
        fails += !r.pass as usize;
        beyond5 += (r.excess_se > 5.0) as usize;
        worst = worst.max(r.excess_se);
        lines.push(format!("{}:{:.3}", names[k].split('_').next().unwrap(), r.ratio));
    }
    verdict(
        fails == 0 && beyond5 == 0,
        format!(
            "20 configs, failures {fails}, beyond 5 SE {beyond5}, max (ratio-1)/SE {worst:.2}; ratios {}",
            lines.join(" ")
        ),
    )
}

// ---------------------------------------------------------------- 6

fn gradient_suite() -> Verdict {
    let m = model("ou_1mode");
    let mut worst_sup = 0.0f64;
    let mut worst_lip = 0.0f64;
    let mut mismatch = 0.0f64;
    for w in [0.5, 1.0, 2.0] {
        let f = TestFunction::GaussianBump {
            center: vec![0.0],
            width: w,
        };
        for t in [0.1f64, 0.5, 1.0, 2.0, 5.0] {
            let v = (1.0 - (-2.0 * t).exp()) / 2.0;
            let bump = |x: f64| {
                let mu = (-t).exp() * x;
                w / (w * w + v).sqrt() * (-mu * mu / (2.0 * (w * w + v))).exp()
            };
            for d in [0.1, 0.5, 1.0, 2.0] {
                let diff = (bump(d) - bump(0.0)).abs();
                let lib = (ou_exact(&m, t, &[d], &f).unwrap() - ou_exact(&m, t, &[0.0], &f).unwrap()).abs();
                mismatch = mismatch.max((lib - diff).abs());
                let growth = t.exp();
                let sup = growth / t.min(1.0).sqrt() * 1.0 * 1.0 * d;
                let lip = growth * d / (w * E.sqrt());
                worst_sup = worst_sup.max(diff / sup);
                worst_lip = worst_lip.max(diff / lip);
            }
        }
    }
    let exact_ok = worst_sup <= 1.0 && worst_lip <= 1.0 && mismatch <= 1e-12;

    let m = model("example54_n8_alpha1e-2");
    let f = TestFunction::GaussianBump {
        center: vec![0.0; 8],
        width: 1.0,
    };
    let cfg = IntegratorConfig::new(1e-3, 0.5, config("example54_n8_alpha1e-2").seed);
    let r = check_gradient_estimate(&m, &cfg, &vec![0.0; 8], &unit(8, 0, 0.5), &f, 10_000).unwrap();
    verdict(
        exact_ok && r.all_pass(),
        format!(
            "OU grid: max |diff|/sup bound {worst_sup:.3}, max |diff|/lip bound {worst_lip:.3}, oracle mismatch \
             {mismatch:.1e}; example model: |diff| {:.3e} ± {:.1e} vs bounds {:.3} / {:.3}",
            r.difference.abs(),
            r.se,
            r.bound,
            r.lipschitz_bound.unwrap_or(f64::NAN)
        ),
    )
}

// ---------------------------------------------------------------- 7

fn ultrabound_suite() -> Verdict {
    let grid: Vec<f64> = (1..=200).map(|i| 0.1 * i as f64).collect();
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut oracle_gap = 0.0f64;
    let mut case1 = 0;
    for m in [2.0, 3.0, 4.0] {
        for a in [0.5, 1.0, 5.0] {
            let spec = UltraboundSpec {
                phi: PhiSpec::Power { m },
                c: 0.0,
                a,
            };
            let level = (4.0 * a).powf(1.0 / m);
            for y0 in [0.0, level, 10.0 * level] {
                let r = check_contraction_bound(&spec, y0, &grid).unwrap();
                pass &= r.bound_holds;
                worst = worst.max(r.max_excess);
                if y0 <= level {
                    case1 += 1;
                    pass &= r.case1 && r.case1_holds;
                }
                for pt in &r.points {
                    let bound = ((m - 1.0) * pt.t / 4.0).powf(-1.0 / (m - 1.0)) + level;
                    oracle_gap = oracle_gap.max((pt.bound - bound).abs() / bound);
                    if m == 2.0 {
                        // y' = (k² - y²)/2 with k = √(2a)
                        let k = (2.0 * a).sqrt();
                        let th = (k * pt.t / 2.0).tanh();
                        let y = k * (y0 + k * th) / (k + y0 * th);
                        oracle_gap = oracle_gap.max((pt.y - y).abs() / (1.0 + y));
                    }
                }
            }
        }
    }
    pass &= oracle_gap <= 1e-8;
    verdict(
        pass,
        format!(
            "27 (m, a, y0) runs: max y - bound {worst:.3e} (slack 1e-6), case-1 runs {case1} invariant, \
             oracle gap {oracle_gap:.1e}"
        ),
    )
}

// ---------------------------------------------------------------- 8

fn invariant_suite() -> Verdict {
    let m = model("ou_8mode");
    let mut fs: Vec<Functional> = (1..=8).map(|k| Functional::Mode { k, power: 2 }).collect();
    fs.push(Functional::Theta);
    let cfg = IntegratorConfig::new(1e-2, 1000.0, config("ou_8mode").seed);
    let est = estimate_invariant(&m, &cfg, &[0.0; 8], 10.0, 1000.0, &fs, 0).unwrap();
    let mut pass = true;
    let mut zs = Vec::new();
    let mut theta_exact = 0.0;
    for k in 1..=8 {
        let kf = k as f64;
        let var = 1.0 / (2.0 * PI * PI * kf * kf);
        let e = est.moments[&Functional::Mode { k, power: 2 }.name()];
        let z = (e.mean - var) / e.se;
        pass &= z.abs() <= 3.0;
        zs.push(format!("{z:.2}"));
        // λ_k = 1 + ω - a_k, q_k = 0.5 k^{3/2}
        let lambda = 1.0 - PI * PI + PI * PI * kf * kf;
        theta_exact += lambda / (0.5 * kf.powf(1.5)) * var;
    }
    let th = est.moments["theta"];
    let zt = (th.mean - theta_exact) / th.se;
    pass &= zt.abs() <= 3.0;

    let spec = model_spec("example54_n8_alpha1e-2");
    let seed = config("example54_n8_alpha1e-2").seed;
    let gs = [Functional::AbsMoment { m: 1.0 }, Functional::AbsMoment { m: 2.0 }];
    let mut levels = Vec::new();
    for a in [1e-1, 1e-2, 1e-3] {
        let ma = SpectralModel::from_spec(&regularize(&spec, Some(a), None).unwrap()).unwrap();
        let c = IntegratorConfig::new(1e-3f64.min(a / 4.0), 1000.0, seed);
        let e = estimate_invariant(&ma, &c, &[0.0; 8], 10.0, 1000.0, &gs, 0).unwrap();
        levels.push((a, gs.iter().map(|g| e.moments[&g.name()]).collect::<Vec<_>>()));
    }
    let mut worst = 0.0f64;
    for gi in 0..gs.len() {
        for i in 0..levels.len() {
            for j in i + 1..levels.len() {
                let (x, y) = (levels[i].1[gi], levels[j].1[gi]);
                worst = worst.max((x.mean - y.mean).abs() / x.se.hypot(y.se));
            }
        }
    }
    pass &= worst <= 4.0;
    let sweep: Vec<String> = levels
        .iter()
        .map(|(a, e)| format!("a={a:e}: {:.5}/{:.5}", e[0].mean, e[1].mean))
        .collect();
    verdict(
        pass,
        format!(
            "mode variance z [{}], theta z {zt:.2}; alpha sweep first/second moments {} max pair diff {worst:.2} SE",
            zs.join(" "),
            sweep.join(", ")
        ),
    )
}

// ---------------------------------------------------------------- 9

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn reproducibility(battery_start: Instant) -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    let mut jobs: Vec<(&str, Experiment)> = BUNDLED.iter().map(|b| (b.name, b.experiment)).collect();
    jobs.push(("example54_n8_alpha1e-2", Experiment::YosidaTable));
    for (name, exp) in jobs {
        let cfg = config(name);
        let base = tmp.path().join(format!("{name}-{exp}"));
        let (a, b, c) = (base.join("a"), base.join("b"), base.join("c"));
        let ra = run(exp, &cfg, &a, Some(1)).unwrap();
        run(exp, &cfg, &b, Some(3)).unwrap();
        replay(&a.join("manifest.toml"), &c, None).unwrap();
        let (fa, fb, fc) = (read_dir_bytes(&a), read_dir_bytes(&b), read_dir_bytes(&c));
        let same = fa == fb && fa == fc;
        pass &= same && ra.report.pass;
        notes.push(format!(
            "{name}/{exp}: {} files {}, report pass {}",
            fa.len(),
            if same { "identical" } else { "DIFFER" },
            ra.report.pass
        ));
    }
    let total = battery_start.elapsed().as_secs_f64();
    pass &= total < 3600.0;
    notes.push(format!("battery {total:.0} s"));
    verdict(pass, notes.join("; "))
}

fn main() {
    let start = Instant::now();
    type Criterion = (&'static str, &'static str, f64, Box<dyn Fn() -> Verdict>);
    let criteria: Vec<Criterion> = vec![
        ("1", "Yosida suite", 10.0, Box::new(yosida_suite)),
        ("2", "integrator order and OU moment", 60.0, Box::new(integrator_order)),
        ("3", "coupling suite", 300.0, Box::new(coupling_suite)),
        ("4", "Girsanov normalization and moments", 600.0, Box::new(girsanov_suite)),
        ("5a", "Harnack, exact OU grid", 900.0, Box::new(harnack_exact_grid)),
        ("5b", "Harnack, 20 randomized Monte Carlo configs", 900.0, Box::new(harnack_randomized)),
        ("6", "gradient estimate", 300.0, Box::new(gradient_suite)),
        ("7", "ultrabound comparison ODE", 30.0, Box::new(ultrabound_suite)),
        ("8", "invariant measure", 1200.0, Box::new(invariant_suite)),
        ("9", "reproducibility", 3600.0, Box::new(move || reproducibility(start))),
    ];
    let mut failed = 0;
    for (id, title, limit, f) in &criteria {
        let t0 = Instant::now();
        let v = panic::catch_unwind(AssertUnwindSafe(|| f())).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        let in_time = secs < *limit;
        let pass = v.pass && in_time;
        failed += !pass as usize;
        println!(
            "[{}] criterion {id} {title}: {} ({secs:.1} s, limit {limit:.0} s{})",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            if in_time { "" } else { ", over time" }
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.0} s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
