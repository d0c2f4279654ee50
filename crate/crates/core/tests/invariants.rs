//! Property tests for the Fock engine, detection and density matrices.

use num_complex::Complex64;
use proptest::prelude::*;
use spinorbit::elements::{
    beam_splitter, cnot_oam_to_sam, cnot_sam_to_oam, dove_prism, hwp, oam_sagnac_sorter, polarizing_beam_splitter,
    qwp,
};
use spinorbit::optical::{
    probability, DetectionPattern, ModeLabel, ModeTransform, Pol, PureState, QubitPairDensity, QubitPairState, OAM_L,
    OAM_R,
};
use spinorbit::protocol::{hom_visibility, Interferometer};
use spinorbit::sources::two_photon_state;

fn amp() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn two_photon() -> impl Strategy<Value = PureState> {
    proptest::collection::vec(amp(), 16)
        .prop_filter("nonzero", |v| v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (k, a) in v.into_iter().enumerate() {
                c[k / 4][k % 4] = a;
            }
            two_photon_state(&c, 1, 2).normalize().unwrap()
        })
}

fn qubit_pair() -> impl Strategy<Value = QubitPairState> {
    (amp(), amp(), amp(), amp())
        .prop_filter_map("nonzero", |(a, b, c, d)| QubitPairState::new(a, b, c, d).normalized().ok())
}

fn element(k: usize, angle: f64) -> ModeTransform {
    match k % 8 {
        0 => beam_splitter(1, 2, 1, 2),
        1 => polarizing_beam_splitter(1, 2, 1, 2),
        2 => hwp(1, angle),
        3 => qwp(2, angle),
        4 => dove_prism(1, angle, k % 2 == 0),
        5 => oam_sagnac_sorter(2, 2),
        6 => cnot_oam_to_sam(1, 1),
        _ => cnot_sam_to_oam(2, 2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_elements_preserve_norm(s in two_photon(), ks in proptest::collection::vec((0usize..8, -3.2..3.2f64), 1..6)) {
        let mut out = s;
        for (k, a) in ks {
            out = out.apply(&element(k, a)).unwrap();
        }
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn count_patterns_are_exhaustive(s in two_photon()) {
        let out = s.apply(&beam_splitter(1, 2, 11, 12)).unwrap();
        let total: f64 = [(2, 0), (1, 1), (0, 2)]
            .iter()
            .map(|&(a, b)| probability(&out, &DetectionPattern::counts(&[(11, a), (12, b)]).unwrap()))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn creation_order_is_irrelevant(ms in proptest::collection::vec((1u16..4, any::<bool>(), any::<bool>()), 1..5)) {
        let modes: Vec<ModeLabel> = ms
            .iter()
            .map(|&(p, v, l)| ModeLabel::new(p, if v { Pol::V } else { Pol::H }, if l { OAM_L } else { OAM_R }))
            .collect();
        let forward = modes.iter().fold(PureState::vacuum(), |s, &m| s.create(m));
        let backward = modes.iter().rev().fold(PureState::vacuum(), |s, &m| s.create(m));
        prop_assert_eq!(forward.terms().count(), 1);
        prop_assert!((forward.inner(&backward) - forward.inner(&forward)).norm() < 1e-12);
    }

    #[test]
    fn density_invariants(a in qubit_pair(), b in qubit_pair(), w in 0.0..1.0f64, bg in 0.0..1.0f64) {
        let rho = QubitPairDensity::from_state(&a)
            .mixed_with(&QubitPairDensity::from_state(&b), w)
            .depolarized(bg);
        prop_assert!(rho.check());
        prop_assert!((rho.trace() - 1.0).abs() < 1e-9);
        prop_assert!((rho.rho - rho.rho.adjoint()).norm() < 1e-12);
        prop_assert!(rho.eigenvalues().iter().all(|&e| e > -1e-12));
        let f = rho.fidelity(&a);
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&f));
    }

    #[test]
    fn phi_e_fidelity_from_correlations(a in qubit_pair(), b in qubit_pair(), w in 0.0..1.0f64) {
        let rho = QubitPairDensity::from_state(&a).mixed_with(&QubitPairDensity::from_state(&b), w);
        let (xx, yy, zz) = rho.correlations();
        let direct = rho.fidelity(&QubitPairState::phi_e());
        prop_assert!((0.25 * (1.0 + xx - yy + zz) - direct).abs() < 1e-9);
        prop_assert!((rho.fidelity_e_from_correlations() - direct).abs() < 1e-9);
    }

    #[test]
    fn hom_visibility_monotone(x in 0.0..1.0f64, dx in 0.0..0.5f64) {
        for kind in [Interferometer::Pbs, Interferometer::Bs1] {
            let y = (x + dx).min(1.0);
            prop_assert!(hom_visibility(kind, y).unwrap() >= hom_visibility(kind, x).unwrap() - 1e-12);
        }
    }
}

#[test]
fn bosonic_exchange_symmetry() {
    let a = ModeLabel::new(1, Pol::H, OAM_R);
    let b = ModeLabel::new(2, Pol::V, OAM_L);
    let ab = PureState::vacuum().create(a).create(b);
    let ba = PureState::vacuum().create(b).create(a);
    assert!((ab.inner(&ba).re - 1.0).abs() < 1e-12);
    let aa = PureState::vacuum().create(a).create(a);
    assert!((aa.norm_sqr() - 2.0).abs() < 1e-12);
}

#[test]
fn identical_photons_bunch_on_non_flipping_splitter() {
    use spinorbit::elements::beam_splitter_with;
    let m = |p| ModeLabel::new(p, Pol::H, OAM_R);
    let s = PureState::vacuum().create(m(1)).create(m(2));
    let out = s.apply(&beam_splitter_with(1, 2, 11, 12, false)).unwrap();
    assert!(probability(&out, &DetectionPattern::one_each(&[11, 12]).unwrap()) < 1e-12);
}

#[test]
fn orthogonal_oam_dips_on_flipping_splitter() {
    let s = PureState::vacuum()
        .create(ModeLabel::new(1, Pol::H, OAM_R))
        .create(ModeLabel::new(2, Pol::H, OAM_L));
    let out = s.apply(&beam_splitter(1, 2, 11, 12)).unwrap();
    assert!(probability(&out, &DetectionPattern::one_each(&[11, 12]).unwrap()) < 1e-12);
    let same = PureState::vacuum()
        .create(ModeLabel::new(1, Pol::H, OAM_R))
        .create(ModeLabel::new(2, Pol::H, OAM_R));
    let out = same.apply(&beam_splitter(1, 2, 11, 12)).unwrap();
    assert!((probability(&out, &DetectionPattern::one_each(&[11, 12]).unwrap()) - 0.5).abs() < 1e-12);
}
