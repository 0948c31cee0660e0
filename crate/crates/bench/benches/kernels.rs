use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use dissipde::coupling::simulate_coupled;
use dissipde::sde::simulate;
use dissipde::YosidaParams;
use dissipde_bench::{coupling, e1, integrator, model, sign_map};

const EXAMPLE: &str = "example54_n8_alpha1e-2";

fn resolvent(c: &mut Criterion) {
    let f = sign_map();
    let p = YosidaParams::new(1e-2).unwrap();
    let rs: Vec<f64> = (0..1000).map(|i| -2.0 + 4e-3 * i as f64).collect();
    c.bench_function("resolvent_neg_sign_1000", |b| {
        b.iter(|| rs.iter().map(|&r| f.resolvent(&p, black_box(r)).unwrap()).sum::<f64>())
    });
    c.bench_function("resolvent_bisection_neg_sign_1000", |b| {
        b.iter(|| rs.iter().map(|&r| f.resolvent_by_bisection(&p, black_box(r)).unwrap()).sum::<f64>())
    });
}

fn lift_drift(c: &mut Criterion) {
    let m = model(EXAMPLE);
    let x: Vec<f64> = (0..m.dim()).map(|k| 0.3 / (k + 1) as f64).collect();
    c.bench_function("lift_drift_n8", |b| b.iter(|| m.drift(black_box(&x)).unwrap()));
}

fn paths(c: &mut Criterion) {
    let ou = model("ou_8mode");
    let ex = model(EXAMPLE);
    let cfg = integrator(1e-3, 1.0);
    let mut g = c.benchmark_group("paths");
    g.sample_size(10);
    g.bench_function("simulate_ou8_1000_steps", |b| b.iter(|| simulate(&ou, &cfg, &e1(8, 1.0)).unwrap()));
    g.bench_function("simulate_example_1000_steps", |b| b.iter(|| simulate(&ex, &cfg, &e1(8, 1.0)).unwrap()));
    let cc = coupling(1.0);
    g.bench_function("coupled_path_example", |b| {
        b.iter(|| simulate_coupled(&ex, &cc, &vec![0.0; 8], &e1(8, 0.5)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, resolvent, lift_drift, paths);
criterion_main!(benches);
