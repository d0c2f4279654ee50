//! Detection signatures, the three-stage hyper-Bell measurement with
//! teleportation-based QND, and the Pauli correction table.
//!
//! Detection happens once at the end of the circuit (post-selection); the
//! stage functions below evaluate each stage on its own for diagnostics.

use std::collections::BTreeSet;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::elements::{
    beam_splitter, dual_channel_readout, hwp, polarizer, polarizing_beam_splitter, READOUT_EFFICIENCY,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::optical::{
    extract_qubit_pair_density, filter, pauli_pair, probability_any, project_any, DetectionPattern, MixedState,
    ModeTransform, PathConstraint, PathId, Pauli, PauliOp, PureState, QubitPairDensity, QubitPairState,
};
use crate::sources::{hyper_bell_state, hyper_entangled_pair, oam_entangled_pair, Bell, HyperBellLabel};

/// Path assignment of the teleportation circuit.
pub mod layout {
    use crate::optical::PathId;

    pub const INPUT: PathId = 1;
    pub const PAIR_IN: PathId = 2;
    pub const OUTPUT: PathId = 3;
    pub const ANCILLA_IN: PathId = 4;
    pub const ANCILLA_OUT: PathId = 5;
    pub const PBS_OUT: (PathId, PathId) = (11, 12);
    pub const BS1_OUT: (PathId, PathId) = (21, 22);
    pub const BS2_OUT: (PathId, PathId) = (31, 32);

    /// Detector channel of a readout on `path`: `l = +1` or `l = -1`.
    pub const fn channel(path: PathId, plus: bool) -> PathId {
        1000 + 2 * path + if plus { 0 } else { 1 }
    }
}

use layout::*;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

/// Operators to apply to the teleported photon for a given outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectionEntry {
    pub outcome: HyperBellLabel,
    pub sam_op: PauliOp,
    pub oam_op: PauliOp,
    /// With `|phi>1 |xi>23 = sum_L |L>12 (phase_L / 4) (sam (x) oam) |phi>3`.
    #[serde(skip)]
    pub phase: Complex64,
}

impl CorrectionEntry {
    /// `sam (x) oam`, the operator that undoes the outcome (Paulis are involutions).
    pub fn matrix(&self) -> Matrix4<Complex64> {
        pauli_pair(self.sam_op.axis, self.oam_op.axis)
    }
}

/// Correction read off the expansion of `|phi>1 |xi>23` in the hyper-Bell
/// basis of photons 1 and 2.
pub fn correction_for_outcome(outcome: HyperBellLabel) -> CorrectionEntry {
    use Bell::*;
    let (sam, phase_sam) = match outcome.sam {
        PhiPlus => (Pauli::Z, ONE),
        PhiMinus => (Pauli::I, ONE),
        PsiPlus => (Pauli::Y, IM),
        PsiMinus => (Pauli::X, -ONE),
    };
    let (oam, phase_oam) = match outcome.oam {
        PhiPlus => (Pauli::I, ONE),
        PhiMinus => (Pauli::Z, ONE),
        PsiPlus => (Pauli::X, ONE),
        PsiMinus => (Pauli::Y, -IM),
    };
    CorrectionEntry {
        outcome,
        sam_op: PauliOp::sam(sam),
        oam_op: PauliOp::oam(oam),
        phase: phase_sam * phase_oam,
    }
}

/// One entry of the hyper-Bell decomposition of a teleportation input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionEntry {
    pub label: HyperBellLabel,
    pub probability: f64,
    /// Fidelity of the corrected photon 3 with the input.
    pub corrected_fidelity: f64,
}

/// Projects `|phi>1 |xi>23` onto each hyper-Bell state of photons 1 and 2.
pub fn hyper_bell_decompose(input: &QubitPairState) -> Vec<DecompositionEntry> {
    let full = input.to_pure(INPUT).tensor(&hyper_entangled_pair(PAIR_IN, OUTPUT));
    let measured: BTreeSet<PathId> = [INPUT, PAIR_IN].into_iter().collect();
    HyperBellLabel::all()
        .into_iter()
        .map(|label| {
            let bra = hyper_bell_state(label, INPUT, PAIR_IN);
            let residual = full.partial_overlap(&bra, &measured);
            let probability = residual.norm_sqr();
            let corrected_fidelity = residual
                .normalize()
                .ok()
                .and_then(|r| QubitPairState::from_pure(&r, OUTPUT).ok())
                .map(|q| {
                    let fixed = q.transformed(&correction_for_outcome(label).matrix());
                    fixed.inner(input).norm_sqr()
                })
                .unwrap_or(0.0);
            DecompositionEntry {
                label,
                probability,
                corrected_fidelity,
            }
        })
        .collect()
}

/// Probability and non-destructive conditional state of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub probability: f64,
    pub conditional: Option<PureState>,
}

/// PBS, 45 deg polarizers and HWPs at 22.5 deg on both outputs.
/// The HWPs rotate the passed D photons to H for the OAM stages.
pub fn sam_stage_circuit(p1: PathId, p2: PathId) -> Vec<ModeTransform> {
    let (o1, o2) = PBS_OUT;
    vec![
        polarizing_beam_splitter(p1, p2, o1, o2),
        polarizer(o1, std::f64::consts::FRAC_PI_4),
        polarizer(o2, std::f64::consts::FRAC_PI_4),
        hwp(o1, std::f64::consts::PI / 8.0),
        hwp(o2, std::f64::consts::PI / 8.0),
    ]
}

/// SAM stage: PBS then diagonal polarizers, keeping one photon in each output.
pub fn sam_bsm_stage(state: &PureState, p1: PathId, p2: PathId) -> Result<StageResult> {
    let out = state.apply_all(&sam_stage_circuit(p1, p2))?;
    let (probability, conditional) = filter(&out, &DetectionPattern::one_each(&[PBS_OUT.0, PBS_OUT.1])?);
    Ok(StageResult {
        probability,
        conditional,
    })
}

/// Outcome of an OAM Bell measurement on a BS with dual-channel readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OamOutcome {
    /// One photon in each BS output.
    OmegaMinus,
    /// Two photons with orthogonal OAM in the same BS output.
    OmegaPlus,
}

impl OamOutcome {
    pub const ALL: [OamOutcome; 2] = [OamOutcome::OmegaMinus, OamOutcome::OmegaPlus];

    pub fn bell(self) -> Bell {
        match self {
            OamOutcome::OmegaMinus => Bell::PhiMinus,
            OamOutcome::OmegaPlus => Bell::PhiPlus,
        }
    }
}

/// Channel occupations `[out1 plus, out1 minus, out2 plus, out2 minus]`.
fn channel_patterns(outcome: OamOutcome) -> Vec<[usize; 4]> {
    match outcome {
        OamOutcome::OmegaMinus => vec![[1, 0, 1, 0], [1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1]],
        OamOutcome::OmegaPlus => vec![[1, 1, 0, 0], [0, 0, 1, 1]],
    }
}

fn channels(outs: (PathId, PathId)) -> [PathId; 4] {
    [
        channel(outs.0, true),
        channel(outs.0, false),
        channel(outs.1, true),
        channel(outs.1, false),
    ]
}

/// Detection constraints for `outcome` of a BS whose outputs are `outs`.
pub fn oam_signature(outs: (PathId, PathId), outcome: OamOutcome) -> Vec<Vec<PathConstraint>> {
    let ch = channels(outs);
    channel_patterns(outcome)
        .into_iter()
        .map(|counts| {
            ch.iter()
                .zip(counts)
                .map(|(&p, n)| PathConstraint::exactly(p, n))
                .collect()
        })
        .collect()
}

fn patterns(parts: &[Vec<Vec<PathConstraint>>]) -> Result<Vec<DetectionPattern>> {
    let mut acc: Vec<Vec<PathConstraint>> = vec![Vec::new()];
    for options in parts {
        let mut next = Vec::new();
        for base in &acc {
            for opt in options {
                let mut v = base.clone();
                v.extend(opt.iter().copied());
                next.push(v);
            }
        }
        acc = next;
    }
    acc.into_iter().map(DetectionPattern::new).collect()
}

/// BS plus dual-channel readouts on both outputs.
pub fn oam_bsm_circuit(p_a: PathId, p_b: PathId, outs: (PathId, PathId), ideal: bool) -> Result<Vec<ModeTransform>> {
    let eff = if ideal { 1.0 } else { READOUT_EFFICIENCY };
    Ok(vec![
        beam_splitter(p_a, p_b, outs.0, outs.1),
        dual_channel_readout(outs.0, channel(outs.0, true), channel(outs.0, false), eff)?,
        dual_channel_readout(outs.1, channel(outs.1, true), channel(outs.1, false), eff)?,
    ])
}

/// Result of a standalone OAM Bell measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct OamBsmResult {
    /// `(outcome, probability, conditional state of the undetected photons)`.
    pub outcomes: Vec<(OamOutcome, f64, Option<MixedState>)>,
}

impl OamBsmResult {
    pub fn probability(&self, o: OamOutcome) -> f64 {
        self.outcomes
            .iter()
            .find(|(k, _, _)| *k == o)
            .map(|(_, p, _)| *p)
            .unwrap_or(0.0)
    }

    /// The only outcome with nonzero probability, if exactly one fires.
    pub fn outcome(&self) -> Option<OamOutcome> {
        let firing: Vec<OamOutcome> = self
            .outcomes
            .iter()
            .filter(|(_, p, _)| *p > 1e-12)
            .map(|(o, _, _)| *o)
            .collect();
        (firing.len() == 1).then(|| firing[0])
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p, _)| p).sum()
    }
}

/// OAM Bell measurement of the photons on `p_a`, `p_b` (both H polarized).
pub fn oam_bsm_stage(state: &PureState, p_a: PathId, p_b: PathId) -> Result<OamBsmResult> {
    oam_bsm_on(state, p_a, p_b, BS2_OUT)
}

fn oam_bsm_on(state: &PureState, p_a: PathId, p_b: PathId, outs: (PathId, PathId)) -> Result<OamBsmResult> {
    let out = state.apply_all(&oam_bsm_circuit(p_a, p_b, outs, true)?)?;
    let mut outcomes = Vec::new();
    for o in OamOutcome::ALL {
        let pats = patterns(&[oam_signature(outs, o)])?;
        let proj = project_any(&out, &pats);
        outcomes.push((o, proj.probability, proj.conditional));
    }
    Ok(OamBsmResult { outcomes })
}

/// Teleportation-based QND of the OAM qubit on `in_path`.
#[derive(Debug, Clone, PartialEq)]
pub struct QndResult {
    pub herald_probability: f64,
    /// Per BS outcome: probability, the OAM correction it implies, and the
    /// conditional state (photon on `out_path`).
    pub outcomes: Vec<(OamOutcome, f64, Pauli, Option<MixedState>)>,
}

/// OAM Pauli that undoes the teleportation byproduct of a QND outcome.
pub fn qnd_correction(o: OamOutcome) -> Pauli {
    match o {
        OamOutcome::OmegaPlus => Pauli::I,
        OamOutcome::OmegaMinus => Pauli::Z,
    }
}

/// Teleports the OAM qubit of the (H polarized) photon on `in_path` onto
/// `ancilla.1` using `|omega+>` on `ancilla` and a BS Bell measurement of
/// `in_path` with `ancilla.0`. Any coincidence pattern heralds the photon.
pub fn qnd_teleport(state: &PureState, in_path: PathId, ancilla: (PathId, PathId)) -> Result<QndResult> {
    let full = state.tensor(&oam_entangled_pair(ancilla.0, ancilla.1));
    let bsm = oam_bsm_on(&full, in_path, ancilla.0, BS1_OUT)?;
    let outcomes: Vec<_> = bsm
        .outcomes
        .into_iter()
        .map(|(o, p, c)| (o, p, qnd_correction(o), c))
        .collect();
    Ok(QndResult {
        herald_probability: outcomes.iter().map(|(_, p, _, _)| p).sum(),
        outcomes,
    })
}

/// Labels the full measurement identifies.
pub const IDENTIFIED: [HyperBellLabel; 2] = [
    HyperBellLabel::new(Bell::PhiMinus, Bell::PhiPlus),
    HyperBellLabel::new(Bell::PhiPlus, Bell::PhiMinus),
];

/// QND and final OAM outcomes whose joint occurrence signals `label`.
pub fn signature_outcomes(label: HyperBellLabel) -> Option<[(OamOutcome, OamOutcome); 2]> {
    use OamOutcome::*;
    if label == IDENTIFIED[0] {
        Some([(OmegaMinus, OmegaMinus), (OmegaPlus, OmegaPlus)])
    } else if label == IDENTIFIED[1] {
        Some([(OmegaMinus, OmegaPlus), (OmegaPlus, OmegaMinus)])
    } else {
        None
    }
}

/// Detection patterns of the full measurement that identify `label`.
pub fn hbsm_signature(label: HyperBellLabel) -> Result<Vec<DetectionPattern>> {
    let Some(pairs) = signature_outcomes(label) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for (qnd, fin) in pairs {
        out.extend(patterns(&[oam_signature(BS1_OUT, qnd), oam_signature(BS2_OUT, fin)])?);
    }
    Ok(out)
}

/// The complete measurement circuit acting on photons 1, 2 and the ancilla
/// pair 4, 5. Photon 5 leaves through the QND onto BS2.
pub fn hbsm_circuit(ideal: bool) -> Result<Vec<ModeTransform>> {
    let mut c = sam_stage_circuit(INPUT, PAIR_IN);
    c.extend(oam_bsm_circuit(PBS_OUT.0, ANCILLA_IN, BS1_OUT, ideal)?);
    c.extend(oam_bsm_circuit(ANCILLA_OUT, PBS_OUT.1, BS2_OUT, ideal)?);
    Ok(c)
}

/// Result of the full measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct HbsmResult {
    /// The label whose signature fired, if exactly one did.
    pub identified: Option<HyperBellLabel>,
    /// Total probability that any signature fired.
    pub success_probability: f64,
    /// Per identifiable label, probability of its signature.
    pub signature_probabilities: Vec<(HyperBellLabel, f64)>,
    /// Conditional state of undetected photons for the identified label.
    pub conditional_state: Option<MixedState>,
}

/// Runs the full measurement on photons 1, 2 of `state` (ancilla added here).
pub fn full_hbsm(state: &PureState) -> Result<HbsmResult> {
    let full = state.tensor(&oam_entangled_pair(ANCILLA_IN, ANCILLA_OUT));
    let out = full.apply_all(&hbsm_circuit(true)?)?;
    let mut signature_probabilities = Vec::new();
    let mut firing = Vec::new();
    for label in IDENTIFIED {
        let proj = project_any(&out, &hbsm_signature(label)?);
        if proj.probability > 1e-12 {
            firing.push((label, proj.conditional));
        }
        signature_probabilities.push((label, proj.probability));
    }
    let success_probability = signature_probabilities.iter().map(|(_, p)| p).sum();
    let (identified, conditional_state) = if firing.len() == 1 {
        let (l, c) = firing.pop().expect("one entry");
        (Some(l), c)
    } else {
        (None, None)
    };
    Ok(HbsmResult {
        identified,
        success_probability,
        signature_probabilities,
        conditional_state,
    })
}

/// Runs [`full_hbsm`] on every hyper-Bell input.
pub fn hbsm_table(exec: Exec) -> Result<Vec<(HyperBellLabel, HbsmResult)>> {
    let labels = HyperBellLabel::all();
    exec.map(&labels, |&l| full_hbsm(&hyper_bell_state(l, INPUT, PAIR_IN)).map(|r| (l, r)))
        .into_iter()
        .collect()
}

/// Efficiency with every hyper-Bell input equally likely, as happens in
/// teleportation.
pub fn hbsm_uniform_efficiency(table: &[(HyperBellLabel, HbsmResult)]) -> f64 {
    table.iter().map(|(_, r)| r.success_probability).sum::<f64>() / table.len() as f64
}

/// Probabilities of the two channels of a dual-channel readout on `path`.
pub fn readout_probabilities(state: &PureState, path: PathId, ideal: bool) -> Result<(f64, f64)> {
    let eff = if ideal { 1.0 } else { READOUT_EFFICIENCY };
    let (plus, minus) = (channel(path, true), channel(path, false));
    let out = state.apply(&dual_channel_readout(path, plus, minus, eff)?)?;
    let p = |ch: PathId| probability_any(&out, &[DetectionPattern::counts(&[(ch, 1)]).expect("single path")]);
    Ok((p(plus), p(minus)))
}

/// Corrected density of photon 3 for a conditional state of the circuit.
pub fn corrected_output(conditional: &MixedState, outcome: HyperBellLabel) -> Result<QubitPairDensity> {
    let rho = extract_qubit_pair_density(conditional, OUTPUT)?;
    Ok(rho.conjugated(&correction_for_outcome(outcome).matrix()))
}

/// Probability weight of a result, or [`Error::ZeroState`] when nothing fired.
pub fn require_firing(p: f64) -> Result<f64> {
    if p > 0.0 {
        Ok(p)
    } else {
        Err(Error::ZeroState)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correction_examples() {
        let e = correction_for_outcome(HyperBellLabel::new(Bell::PhiMinus, Bell::PhiPlus));
        assert_eq!((e.sam_op.axis, e.oam_op.axis), (Pauli::I, Pauli::I));
        let e = correction_for_outcome(HyperBellLabel::new(Bell::PhiMinus, Bell::PsiPlus));
        assert_eq!((e.sam_op.axis, e.oam_op.axis), (Pauli::I, Pauli::X));
        let e = correction_for_outcome(HyperBellLabel::new(Bell::PsiPlus, Bell::PsiMinus));
        assert_eq!((e.sam_op.axis, e.oam_op.axis), (Pauli::Y, Pauli::Y));
    }

    #[test]
    fn decomposition_of_basis_state_is_flat() {
        for e in hyper_bell_decompose(&QubitPairState::basis(0)) {
            assert!((e.probability - 1.0 / 16.0).abs() < 1e-12, "{}", e.label);
            assert!((e.corrected_fidelity - 1.0).abs() < 1e-12, "{}", e.label);
        }
    }

    #[test]
    fn readout_channels() {
        let s = QubitPairState::basis(0).to_pure(7);
        let (p, m) = readout_probabilities(&s, 7, true).unwrap();
        assert!((p - 1.0).abs() < 1e-12 && m.abs() < 1e-12);
        let s = QubitPairState::basis(1).to_pure(7);
        let (p, m) = readout_probabilities(&s, 7, true).unwrap();
        assert!(p.abs() < 1e-12 && (m - 1.0).abs() < 1e-12);
    }
}
