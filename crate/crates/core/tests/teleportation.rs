//! Six-photon teleportation runs: ideal pipeline, noise channels and the
//! calibrated preset.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinorbit::optical::QubitPairState;
use spinorbit::protocol::*;
use spinorbit::sources::InputStateId;
use spinorbit::{Error, Exec};

const TOL: f64 = 1e-9;

fn fidelities(noise: &NoiseParams) -> Vec<f64> {
    error_budget_eval(noise).unwrap().iter().map(|r| r.fidelity).collect()
}

#[test]
fn ideal_runs_are_perfect_and_flat() {
    for r in error_budget_eval(&NoiseParams::ideal()).unwrap() {
        assert!((r.fidelity - 1.0).abs() < TOL, "{:?}", r.input_id);
        assert!((r.success_probability - 1.0 / 32.0).abs() < TOL);
        assert!(r.density.check());
        for o in &r.outcomes {
            assert!((o.probability - 1.0 / 64.0).abs() < TOL);
            assert!((o.fidelity - 1.0).abs() < TOL);
        }
    }
}

#[test]
fn ideal_e_has_bell_correlations() {
    let r = run_teleportation(InputStateId::E, &NoiseParams::ideal()).unwrap();
    let (xx, yy, zz) = r.pauli_expectations.unwrap();
    assert!((xx - 1.0).abs() < TOL && (yy + 1.0).abs() < TOL && (zz - 1.0).abs() < TOL);
}

#[test]
fn success_probability_is_input_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let q = QubitPairState::random(&mut rng);
        let r = run_teleportation_state(&q, &NoiseParams::ideal(), Exec::default()).unwrap();
        assert!((r.success_probability - 1.0 / 32.0).abs() < TOL);
        assert!((r.fidelity - 1.0).abs() < TOL);
    }
}

#[test]
fn background_follows_the_mixing_law() {
    let base = NoiseParams {
        overlap_bs2: 0.8,
        pair45_fidelity: 0.93,
        ..NoiseParams::ideal()
    };
    let f0 = fidelities(&base);
    for b in [0.0, 0.15, 1.0] {
        let f = fidelities(&NoiseParams { background: b, ..base });
        for (fi, f0i) in f.iter().zip(&f0) {
            assert!((fi - ((1.0 - b) * f0i + b / 4.0)).abs() < TOL);
        }
    }
    let a = run_teleportation(InputStateId::A, &NoiseParams { background: 0.15, ..NoiseParams::ideal() }).unwrap();
    assert!((a.fidelity - 0.8875).abs() < TOL);
}

#[test]
fn product_states_in_the_pbs_basis_are_immune_to_pbs_overlap() {
    for x in [0.9, 0.5] {
        let f = fidelities(&NoiseParams { overlap_pbs: x, ..NoiseParams::ideal() });
        assert!((f[0] - 1.0).abs() < TOL && (f[1] - 1.0).abs() < TOL, "{f:?}");
        assert!(f[2] < 1.0 - 1e-6 && f[3] < 1.0 - 1e-6 && f[4] < 1.0 - 1e-6, "{f:?}");
    }
    let cal = NoiseParams::calibrated();
    let worse = fidelities(&NoiseParams { overlap_pbs: 0.6, ..cal });
    let f = fidelities(&cal);
    assert!((f[0] - worse[0]).abs() < TOL && (f[1] - worse[1]).abs() < TOL);
    assert!(worse[2] < f[2] && worse[3] < f[3] && worse[4] < f[4]);
}

#[test]
fn preparation_infidelity_only_affects_e() {
    let f = fidelities(&NoiseParams { input_state_fidelity: 0.92, ..NoiseParams::ideal() });
    for fi in &f[..4] {
        assert!((fi - 1.0).abs() < TOL);
    }
    assert!((f[4] - 0.92).abs() < TOL);
}

#[test]
fn fidelity_is_monotone_in_each_parameter() {
    type Set = fn(&mut NoiseParams, f64);
    let knobs: [(&str, Set); 8] = [
        ("overlap_pbs", |n, v| n.overlap_pbs = v),
        ("overlap_bs1", |n, v| n.overlap_bs1 = v),
        ("overlap_bs2", |n, v| n.overlap_bs2 = v),
        ("pair23", |n, v| n.pair23_fidelity = v),
        ("pair45", |n, v| n.pair45_fidelity = v),
        ("input", |n, v| n.input_state_fidelity = v),
        ("leakage", |n, v| n.oam_leakage = 1.0 - v),
        ("background", |n, v| n.background = 1.0 - v),
    ];
    for (name, set) in knobs {
        let mut prev: Option<Vec<f64>> = None;
        for v in [1.0, 0.9, 0.7] {
            let mut n = NoiseParams::ideal();
            set(&mut n, v);
            let f = fidelities(&n);
            if let Some(p) = &prev {
                for (a, b) in f.iter().zip(p) {
                    assert!(*a <= b + TOL, "{name} at {v}: {f:?} vs {p:?}");
                }
            }
            prev = Some(f);
        }
    }
}

#[test]
fn calibrated_preset_brackets_the_measurements() {
    let f = fidelities(&NoiseParams::calibrated());
    for fi in &f {
        assert!((0.5..=0.8).contains(fi), "{f:?}");
    }
    assert!(f[4] > 0.5);
    assert!(f[0] >= f[2] && f[1] >= f[3]);
}

#[test]
fn sequential_and_parallel_agree() {
    let n = NoiseParams::calibrated();
    let a = run_teleportation_with(InputStateId::E, &n, Exec::Sequential).unwrap();
    let b = run_teleportation_with(InputStateId::E, &n, Exec::Parallel).unwrap();
    assert!((a.fidelity - b.fidelity).abs() < 1e-12);
    assert!((a.success_probability - b.success_probability).abs() < 1e-15);
}

#[test]
fn missing_ancilla_is_a_zero_state() {
    let sc = Scenario {
        input: InputStateId::A,
        noise: NoiseParams::ideal(),
        ancilla: false,
    };
    assert!(matches!(run_scenario(&sc, Exec::default()), Err(Error::ZeroState)));
}

#[test]
fn invalid_parameters_are_rejected() {
    let n = NoiseParams { overlap_bs1: 1.2, ..NoiseParams::ideal() };
    assert!(matches!(run_teleportation(InputStateId::A, &n), Err(Error::InvalidParameter { .. })));
    let n = NoiseParams { mu_per_source: [0.1, -0.1, 0.0], ..NoiseParams::ideal() };
    assert!(matches!(n.validate(), Err(Error::InvalidParameter { .. })));
}

#[test]
fn double_pair_background_grows_with_mu() {
    let mut prev = 0.0;
    for mu in [0.001, 0.01, 0.1] {
        let r = double_pair_check(InputStateId::C, mu).unwrap();
        assert!(r.background_fraction > prev);
        assert!(r.background_fraction < mu);
        prev = r.background_fraction;
    }
    assert!(matches!(double_pair_check(InputStateId::C, 0.0), Err(Error::ZeroState)));
}
