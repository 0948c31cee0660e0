use dissipde::analysis::harnack_constant;
use dissipde::analysis::ultrabound::{psi, psi_inverse, psi_inverse_by_bisection, PhiSpec, UltraboundSpec};
use dissipde::monotone::ScalarMapSpec;
use dissipde::rng::NoiseStream;
use dissipde::spectral::{DriftSpec, ModelSpec, OperatorSpec, QSpec, SelectionSpec, SigmaSpec, SmoothingSpec};
use dissipde::SpectralModel;
use proptest::prelude::*;

fn scalar_spec() -> impl Strategy<Value = ScalarMapSpec> {
    prop_oneof![
        Just(ScalarMapSpec::neg_sign()),
        Just(ScalarMapSpec::neg_cubic()),
        Just(ScalarMapSpec::staircase()),
        (-3.0f64..0.0).prop_map(ScalarMapSpec::linear),
    ]
}

fn model_spec() -> impl Strategy<Value = ModelSpec> {
    (1usize..9, any::<bool>(), scalar_spec(), 1e-3f64..1.0, 0.2f64..3.0, any::<bool>(), any::<bool>()).prop_map(
        |(n, dirichlet, scalar, alpha, s, smooth, with_q)| {
            let operator = if dirichlet {
                OperatorSpec::Dirichlet
            } else {
                OperatorSpec::Diagonal {
                    eigenvalues: (1..=n).map(|k| -(k as f64)).collect(),
                    omega: None,
                }
            };
            let selection = SelectionSpec::yosida(alpha);
            let drift = if dirichlet {
                DriftSpec::Nemytskii {
                    scalar,
                    selection,
                    smoothing: smooth.then(|| SmoothingSpec {
                        beta: 0.1,
                        node_count: 4,
                        node_seed: 9,
                        b_coeffs: None,
                    }),
                }
            } else {
                DriftSpec::Coordinatewise { scalar, selection, smoothing: None }
            };
            ModelSpec {
                dimension: n,
                oversampling: 8,
                sigma_inv_norm: None,
                operator,
                drift,
                sigma: if smooth {
                    SigmaSpec::Scalar { value: s }
                } else {
                    SigmaSpec::Diagonal {
                        values: (0..n).map(|k| s + k as f64).collect(),
                    }
                },
                theta: with_q.then_some(QSpec::Power {
                    scale: 0.5,
                    exponent: 1.5,
                }),
            }
        },
    )
}

fn vec_in(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_spec_toml_round_trip(spec in model_spec()) {
        let text = spec.to_toml().unwrap();
        let back = ModelSpec::from_toml(&text).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn assembled_drift_is_dissipative(spec in model_spec(), seed in 0u64..1000) {
        let model = SpectralModel::from_spec(&spec).unwrap();
        let n = model.dim();
        let pairs = dissipde::spectral::sample_pairs(n, 8, seed);
        for (x, y) in pairs {
            let fx = model.drift(&x).unwrap();
            let fy = model.drift(&y).unwrap();
            let ip: f64 = (0..n).map(|i| (fx[i] - fy[i]) * (x[i] - y[i])).sum();
            let d2: f64 = (0..n).map(|i| (x[i] - y[i]).powi(2)).sum();
            prop_assert!(ip <= 1e-9 * (1.0 + d2), "⟨F(x)-F(y), x-y⟩ = {ip}");
        }
    }

    #[test]
    fn harnack_constant_decreases_in_p(p in 1.01f64..20.0, dp in 0.01f64..20.0, omega in -10.0f64..3.0, t in 0.05f64..5.0, d in 0.0f64..2.0) {
        let lo = harnack_constant(1.0, p, omega, t, d);
        let hi = harnack_constant(1.0, p + dp, omega, t, d);
        prop_assert!(hi <= lo * (1.0 + 1e-14));
        prop_assert!(hi >= 1.0);
    }

    #[test]
    fn noise_random_access(seed in any::<u64>(), stream in 0u64..1000, width in 1usize..12, step in 0u64..50) {
        let mut seq = NoiseStream::new(seed, stream, width);
        let mut buf = vec![0.0; width];
        for _ in 0..=step {
            seq.fill_next(&mut buf);
        }
        let mut direct = vec![0.0; width];
        NoiseStream::new(seed, stream, width).normals_at(step, &mut direct);
        prop_assert_eq!(buf, direct);
    }

    #[test]
    fn linear_dirichlet_drift_is_diagonal(n in 1usize..10, x in vec_in(10)) {
        let spec = ModelSpec {
            dimension: n,
            oversampling: 8,
            sigma_inv_norm: None,
            operator: OperatorSpec::Dirichlet,
            drift: DriftSpec::Nemytskii {
                scalar: ScalarMapSpec::linear(-2.0),
                selection: SelectionSpec::Minimal,
                smoothing: None,
            },
            sigma: SigmaSpec::Scalar { value: 1.0 },
            theta: None,
        };
        let model = SpectralModel::from_spec(&spec).unwrap();
        let f = model.drift(&x[..n]).unwrap();
        for k in 0..n {
            prop_assert!((f[k] + 2.0 * x[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn psi_round_trip_on_log_grid() {
    for m in [2.0, 3.0, 4.0] {
        let spec = UltraboundSpec {
            phi: PhiSpec::Power { m },
            c: 0.0,
            a: 1.0,
        };
        for i in -20..=20 {
            let s = 10f64.powf(i as f64 / 5.0);
            let v = psi(&spec, s).unwrap();
            let back = psi_inverse(&spec, v).unwrap();
            assert!((back - s).abs() <= 1e-8 * (1.0 + s), "m = {m}, s = {s}: {back}");
            let slow = psi_inverse_by_bisection(&spec, v).unwrap();
            assert!((slow - s).abs() <= 1e-8 * (1.0 + s), "m = {m}, s = {s}: {slow}");
        }
    }
}
