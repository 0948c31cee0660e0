//! Fixtures shared by the benches: the bundled models, built once.

use dissipde::coupling::CouplingConfig;
use dissipde::sde::IntegratorConfig;
use dissipde::{MultivaluedScalarMap, ScalarMapSpec, SpectralModel};
use dissipde_cli::config::{bundled, parse};

pub fn model(name: &str) -> SpectralModel {
    let b = bundled(name).expect("bundled config");
    let cfg = parse(b.text, &[], None).expect("bundled config parses");
    SpectralModel::from_spec(cfg.model.as_ref().expect("model section")).expect("model builds")
}

/// The discontinuous drift of the bundled example model, before regularization.
pub fn sign_map() -> MultivaluedScalarMap {
    ScalarMapSpec::neg_sign().build().expect("valid map")
}

pub fn integrator(dt: f64, t_end: f64) -> IntegratorConfig {
    IntegratorConfig::new(dt, t_end, 7)
}

pub fn coupling(t_end: f64) -> CouplingConfig {
    CouplingConfig::new(integrator(1e-3, t_end), 2.0, 1e-4)
}

/// `s e_1` in dimension `n`.
pub fn e1(n: usize, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = s;
    v
}
