//! Hyper-Bell decomposition of the three-photon state against a dense
//! 64-dimensional state-vector oracle.

use nalgebra::{DVector, Vector4};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use spinorbit::measurement::{correction_for_outcome, hyper_bell_decompose};
use spinorbit::optical::QubitPairState;
use spinorbit::sources::{Bell, HyperBellLabel};

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Two-qubit Bell vector over `|ab>`, index `2a + b`.
fn bell(b: Bell) -> [C; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match b {
        Bell::PhiPlus => [c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)],
        Bell::PhiMinus => [c(h, 0.), c(0., 0.), c(0., 0.), c(-h, 0.)],
        Bell::PsiPlus => [c(0., 0.), c(h, 0.), c(h, 0.), c(0., 0.)],
        Bell::PsiMinus => [c(0., 0.), c(h, 0.), c(-h, 0.), c(0., 0.)],
    }
}

/// Photon index `2s + o`; two-photon amplitude from one Bell state per DoF.
fn hyper(sam: Bell, oam: Bell) -> [[C; 4]; 4] {
    let (bs, bo) = (bell(sam), bell(oam));
    let mut m = [[c(0., 0.); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = bs[2 * (i / 2) + j / 2] * bo[2 * (i % 2) + j % 2];
        }
    }
    m
}

fn haar(rng: &mut ChaCha8Rng) -> Vector4<C> {
    let v = Vector4::from_fn(|_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    v / c(v.norm(), 0.)
}

/// `phi_1 (x) xi_23`, with `xi = (|HH> - |VV>)(|rr> + |ll>)/2`.
fn three_photon(phi: &Vector4<C>) -> DVector<C> {
    let xi = hyper(Bell::PhiMinus, Bell::PhiPlus);
    DVector::from_fn(64, |k, _| phi[k / 16] * xi[(k / 4) % 4][k % 4])
}

/// Unnormalized photon-3 state after projecting photons 1, 2 on `label`.
fn residual(psi: &DVector<C>, label: HyperBellLabel) -> Vector4<C> {
    let b = hyper(label.sam, label.oam);
    Vector4::from_fn(|i3, _| {
        let mut acc = c(0., 0.);
        for i1 in 0..4 {
            for i2 in 0..4 {
                acc += b[i1][i2].conj() * psi[16 * i1 + 4 * i2 + i3];
            }
        }
        acc
    })
}

fn labels() -> Vec<HyperBellLabel> {
    Bell::ALL
        .iter()
        .flat_map(|&s| Bell::ALL.iter().map(move |&o| HyperBellLabel::new(s, o)))
        .collect()
}

#[test]
fn oracle_flatness_and_corrections_over_haar_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let phi = haar(&mut rng);
        let psi = three_photon(&phi);
        for label in labels() {
            let r = residual(&psi, label);
            let p = r.norm_squared();
            assert!((p - 1.0 / 16.0).abs() < 1e-12, "{label}: {p}");
            let fixed = correction_for_outcome(label).matrix() * (r / c(p.sqrt(), 0.));
            let f = fixed.dotc(&phi).norm();
            assert!((f - 1.0).abs() < 1e-9, "{label}: {f}");
        }
    }
}

#[test]
fn fock_engine_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = std::time::Instant::now();
    for _ in 0..100 {
        let phi = haar(&mut rng);
        let psi = three_photon(&phi);
        let entries = hyper_bell_decompose(&QubitPairState(phi));
        assert_eq!(entries.len(), 16);
        for e in entries {
            let p = residual(&psi, e.label).norm_squared();
            assert!((e.probability - p).abs() < 1e-9, "{}: {} vs {p}", e.label, e.probability);
            assert!((e.corrected_fidelity - 1.0).abs() < 1e-9, "{}", e.label);
        }
    }
    assert!(t.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn correction_examples() {
    use spinorbit::optical::Pauli;
    let e = correction_for_outcome(HyperBellLabel::new(Bell::PhiMinus, Bell::PhiPlus));
    assert_eq!((e.sam_op.axis, e.oam_op.axis), (Pauli::I, Pauli::I));
    let e = correction_for_outcome(HyperBellLabel::new(Bell::PhiPlus, Bell::PhiMinus));
    assert_eq!((e.sam_op.axis, e.oam_op.axis), (Pauli::Z, Pauli::Z));
    let e = correction_for_outcome(HyperBellLabel::new(Bell::PhiMinus, Bell::PsiPlus));
    assert_eq!((e.sam_op.axis, e.oam_op.axis), (Pauli::I, Pauli::X));
}
