//! Source states: hyper-Bell states, entangled pairs, the five test inputs
//! (state E built through its Sagnac preparation circuit) and truncated SPDC.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::{mirror, polarizing_beam_splitter, scratch, spiral_phase_plate, Direction};
use crate::error::{check_unit, Error, Result};
use crate::optical::{Configuration, MixedState, ModeLabel, ModeTransform, PathId, Pol, PureState, QubitPairState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Two-qubit Bell state label, shared by every two-level degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    /// Amplitude of `|x>|y>`.
    pub fn amplitude(self, x: usize, y: usize) -> Complex64 {
        let h = FRAC_1_SQRT_2;
        match (self, x, y) {
            (Bell::PhiPlus, 0, 0) | (Bell::PhiPlus, 1, 1) => re(h),
            (Bell::PhiMinus, 0, 0) => re(h),
            (Bell::PhiMinus, 1, 1) => re(-h),
            (Bell::PsiPlus, 0, 1) | (Bell::PsiPlus, 1, 0) => re(h),
            (Bell::PsiMinus, 0, 1) => re(h),
            (Bell::PsiMinus, 1, 0) => re(-h),
            _ => ZERO,
        }
    }

    /// Antisymmetric under exchange of the two qubits.
    pub fn is_antisymmetric(self) -> bool {
        self == Bell::PsiMinus
    }

    /// Name as a polarization Bell state.
    pub fn sam_name(self) -> &'static str {
        match self {
            Bell::PhiPlus => "φ+",
            Bell::PhiMinus => "φ-",
            Bell::PsiPlus => "ψ+",
            Bell::PsiMinus => "ψ-",
        }
    }

    /// Name as an OAM Bell state.
    pub fn oam_name(self) -> &'static str {
        match self {
            Bell::PhiPlus => "ω+",
            Bell::PhiMinus => "ω-",
            Bell::PsiPlus => "χ+",
            Bell::PsiMinus => "χ-",
        }
    }

    /// ASCII names: `phi+` or `omega+` style.
    pub fn ascii(self, oam: bool) -> &'static str {
        match (self, oam) {
            (Bell::PhiPlus, false) => "phi+",
            (Bell::PhiMinus, false) => "phi-",
            (Bell::PsiPlus, false) => "psi+",
            (Bell::PsiMinus, false) => "psi-",
            (Bell::PhiPlus, true) => "omega+",
            (Bell::PhiMinus, true) => "omega-",
            (Bell::PsiPlus, true) => "chi+",
            (Bell::PsiMinus, true) => "chi-",
        }
    }

    fn parse(s: &str) -> Option<Bell> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.replace('−', "-");
        Some(match t.as_str() {
            "phi+" | "φ+" | "omega+" | "ω+" => Bell::PhiPlus,
            "phi-" | "φ-" | "omega-" | "ω-" => Bell::PhiMinus,
            "psi+" | "ψ+" | "chi+" | "χ+" => Bell::PsiPlus,
            "psi-" | "ψ-" | "chi-" | "χ-" => Bell::PsiMinus,
            _ => return None,
        })
    }
}

impl fmt::Display for Bell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.sam_name())
    }
}

/// Label of one of the 16 hyper-entangled Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HyperBellLabel {
    pub sam: Bell,
    pub oam: Bell,
}

impl HyperBellLabel {
    pub const fn new(sam: Bell, oam: Bell) -> Self {
        HyperBellLabel { sam, oam }
    }

    /// All 16 labels, SAM-major.
    pub fn all() -> Vec<HyperBellLabel> {
        Bell::ALL
            .iter()
            .flat_map(|&s| Bell::ALL.iter().map(move |&o| HyperBellLabel::new(s, o)))
            .collect()
    }

    /// ASCII form, e.g. `phi-/omega+`.
    pub fn ascii(&self) -> String {
        format!("{}/{}", self.sam.ascii(false), self.oam.ascii(true))
    }
}

impl fmt::Display for HyperBellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sam.sam_name(), self.oam.oam_name())
    }
}

impl FromStr for HyperBellLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['/', ','])
            .ok_or_else(|| format!("expected `sam/oam` label, got `{s}`"))?;
        let sam = Bell::parse(a).ok_or_else(|| format!("unknown Bell label `{a}`"))?;
        let oam = Bell::parse(b).ok_or_else(|| format!("unknown Bell label `{b}`"))?;
        Ok(HyperBellLabel::new(sam, oam))
    }
}

/// Two photons on `p1`, `p2` with qubit-pair amplitudes `coef[i][j]`, where
/// `i`, `j` index `2 * sam + oam` of each photon.
pub fn two_photon_state(coef: &[[Complex64; 4]; 4], p1: PathId, p2: PathId) -> PureState {
    let mut out = PureState::zero();
    for (i, row) in coef.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let m1 = ModeLabel::qubit(p1, i / 2, i % 2);
            let m2 = ModeLabel::qubit(p2, j / 2, j % 2);
            out = out.plus(&PureState::vacuum().create(m1).create(m2).scaled(a));
        }
    }
    out
}

/// Qubit-pair amplitudes of a hyper-Bell state.
pub fn hyper_bell_coefficients(label: HyperBellLabel) -> [[Complex64; 4]; 4] {
    let mut c = [[ZERO; 4]; 4];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = label.sam.amplitude(i / 2, j / 2) * label.oam.amplitude(i % 2, j % 2);
        }
    }
    c
}

/// Hyper-entangled Bell state of two photons on `p1`, `p2`.
pub fn hyper_bell_state(label: HyperBellLabel, p1: PathId, p2: PathId) -> PureState {
    two_photon_state(&hyper_bell_coefficients(label), p1, p2)
}

/// `(|00>s - |11>s)(|00>o + |11>o)/2`, the teleportation resource.
pub fn hyper_entangled_pair(p2: PathId, p3: PathId) -> PureState {
    hyper_bell_state(HyperBellLabel::new(Bell::PhiMinus, Bell::PhiPlus), p2, p3)
}

/// OAM Bell state `label` on `p4`, `p5`, both photons horizontally polarized.
pub fn oam_bell_state(label: Bell, p4: PathId, p5: PathId) -> PureState {
    let mut c = [[ZERO; 4]; 4];
    for x in 0..2 {
        for y in 0..2 {
            c[x][y] = label.amplitude(x, y);
        }
    }
    two_photon_state(&c, p4, p5)
}

/// `(|00>o + |11>o)/sqrt2` on `p4`, `p5`, SAM fixed to H.
pub fn oam_entangled_pair(p4: PathId, p5: PathId) -> PureState {
    oam_bell_state(Bell::PhiPlus, p4, p5)
}

/// The five published test inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InputStateId {
    A,
    B,
    C,
    D,
    E,
}

impl InputStateId {
    pub const ALL: [InputStateId; 5] = [
        InputStateId::A,
        InputStateId::B,
        InputStateId::C,
        InputStateId::D,
        InputStateId::E,
    ];

    /// Target qubit-pair state.
    pub fn qubits(self) -> QubitPairState {
        let h = re(0.5);
        let i = Complex64::new(0.0, 0.5);
        match self {
            InputStateId::A => QubitPairState::basis(0),
            InputStateId::B => QubitPairState::basis(3),
            InputStateId::C => QubitPairState::new(h, h, h, h),
            // (|0> + i|1>)s (|0> + i|1>)o / 2
            InputStateId::D => QubitPairState::new(h, i, i, re(-0.5)),
            InputStateId::E => QubitPairState::phi_e(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InputStateId::A => "A",
            InputStateId::B => "B",
            InputStateId::C => "C",
            InputStateId::D => "D",
            InputStateId::E => "E",
        }
    }
}

impl fmt::Display for InputStateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputStateId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(InputStateId::A),
            "B" => Ok(InputStateId::B),
            "C" => Ok(InputStateId::C),
            "D" => Ok(InputStateId::D),
            "E" => Ok(InputStateId::E),
            _ => Err(format!("unknown input state `{s}` (expected A-E)")),
        }
    }
}

/// Builds the input photon on `path`. A-D are written down directly; E is
/// produced by simulating its Sagnac preparation circuit.
pub fn prepare_input_state(id: InputStateId, path: PathId) -> PureState {
    match id {
        InputStateId::E => sagnac_spin_orbit_state(path)
            .expect("Sagnac preparation uses only unitary elements"),
        _ => id.qubits().to_pure(path),
    }
}

/// Spin-orbit entangling Sagnac loop.
///
/// A zero-order photon in `(H - V)/sqrt2` is split by a PBS; the transmitted
/// H travels clockwise (one mirror, the SPP forward, two mirrors), the
/// reflected V counter-clockwise (two mirrors, the SPP backward, one mirror).
/// The beams recombine on the same PBS, where the second reflection of V
/// cancels the input minus sign.
pub fn sagnac_spin_orbit_state(path: PathId) -> Result<PureState> {
    let src = scratch(path, 0);
    let unused = scratch(path, 1);
    let cw: [PathId; 4] = [scratch(path, 2), scratch(path, 3), scratch(path, 4), scratch(path, 5)];
    let ccw: [PathId; 4] = [scratch(path, 6), scratch(path, 7), scratch(path + 1, 0), scratch(path + 1, 1)];
    let input = PureState::from_terms([
        (Configuration::from_modes([ModeLabel::new(src, Pol::H, 0)]), re(FRAC_1_SQRT_2)),
        (Configuration::from_modes([ModeLabel::new(src, Pol::V, 0)]), re(-FRAC_1_SQRT_2)),
    ]);
    let circuit: Vec<ModeTransform> = vec![
        polarizing_beam_splitter(src, unused, cw[0], ccw[0]),
        // clockwise arm
        mirror(cw[0], cw[1]),
        spiral_phase_plate(cw[1], 1, Direction::Forward, 1.0)?,
        mirror(cw[1], cw[2]),
        mirror(cw[2], cw[3]),
        // counter-clockwise arm
        mirror(ccw[0], ccw[1]),
        mirror(ccw[1], ccw[2]),
        spiral_phase_plate(ccw[2], 1, Direction::Backward, 1.0)?,
        mirror(ccw[2], ccw[3]),
        polarizing_beam_splitter(cw[3], ccw[3], path, unused),
    ];
    input.apply_all(&circuit)
}

/// Which pair-creation operator an SPDC source applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Both photons H, zero-order OAM (trigger plus input photon).
    ZeroOrder,
    /// Hyper-entangled pair `(phi-, omega+)`.
    Hyper,
    /// OAM pair `omega+` with H polarization.
    OamEntangled,
}

impl SourceKind {
    /// Schmidt components `(coefficient, mode a, mode b)` of the pair creator.
    fn schmidt(self, pa: PathId, pb: PathId) -> Vec<(Complex64, ModeLabel, ModeLabel)> {
        match self {
            SourceKind::ZeroOrder => vec![(ONE, ModeLabel::new(pa, Pol::H, 0), ModeLabel::new(pb, Pol::H, 0))],
            SourceKind::Hyper => {
                let c = hyper_bell_coefficients(HyperBellLabel::new(Bell::PhiMinus, Bell::PhiPlus));
                let mut out = Vec::new();
                for (i, row) in c.iter().enumerate() {
                    for (j, &a) in row.iter().enumerate() {
                        if a != ZERO {
                            out.push((a, ModeLabel::qubit(pa, i / 2, i % 2), ModeLabel::qubit(pb, j / 2, j % 2)));
                        }
                    }
                }
                out
            }
            SourceKind::OamEntangled => (0..2)
                .map(|k| (re(FRAC_1_SQRT_2), ModeLabel::qubit(pa, 0, k), ModeLabel::qubit(pb, 0, k)))
                .collect(),
        }
    }

    /// Number of Schmidt modes.
    pub fn schmidt_rank(self) -> usize {
        self.schmidt(0, 1).len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// Mean number of pairs per pulse.
    pub mu: f64,
    /// Highest pair number kept (1 or 2).
    pub truncation_order: usize,
    /// Fidelity of the emitted pair with its target state, if imperfect.
    pub fidelity_inject: Option<f64>,
}

impl Default for SourceParams {
    fn default() -> Self {
        SourceParams {
            mu: 0.0,
            truncation_order: 2,
            fidelity_inject: None,
        }
    }
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: self.mu,
                reason: "must be non-negative",
            });
        }
        if self.truncation_order > 2 {
            return Err(Error::TruncationTooHigh(self.truncation_order));
        }
        if self.truncation_order == 0 {
            return Err(Error::InvalidParameter {
                name: "truncation_order",
                value: 0.0,
                reason: "must be 1 or 2",
            });
        }
        if let Some(f) = self.fidelity_inject {
            check_unit("fidelity_inject", f)?;
        }
        Ok(())
    }
}

/// Truncated SPDC output and the weight lost to the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdcState {
    /// Normalized photon-number superposition.
    pub state: PureState,
    /// Probability of the emitted pair numbers above the truncation order.
    pub truncation_weight: f64,
}

/// Truncated two-mode-squeezing expansion
/// `sum_n (sqrt(mu))^n (P^dag)^n / n! |vac>`, normalized, with `P^dag` the
/// unit-norm pair creator of `kind`. One pair has probability `mu` relative to
/// vacuum; for a pair creator with `d` Schmidt modes two pairs have relative
/// probability `mu^2 (d + 1) / (2 d)`.
pub fn spdc_source(pa: PathId, pb: PathId, kind: SourceKind, params: &SourceParams) -> Result<SpdcState> {
    params.validate()?;
    let terms = kind.schmidt(pa, pb);
    let d = terms.len() as f64;
    let create_pair = |s: &PureState| -> PureState {
        let mut out = PureState::zero();
        for (c, a, b) in &terms {
            out = out.plus(&s.create(*a).create(*b).scaled(*c));
        }
        out
    };
    let mut total = PureState::vacuum();
    let mut power = PureState::vacuum();
    let sqrt_mu = params.mu.sqrt();
    let mut factor = 1.0;
    for n in 1..=params.truncation_order {
        power = create_pair(&power);
        factor *= sqrt_mu / n as f64;
        total = total.plus(&power.scaled(re(factor)));
    }
    let kept = total.norm_sqr();
    // Untruncated norm of the multimode squeezed state: (1 - mu/d)^(-d).
    let truncation_weight = if params.mu == 0.0 {
        0.0
    } else if params.mu >= d {
        1.0
    } else {
        (1.0 - kept * (1.0 - params.mu / d).powf(d)).max(0.0)
    };
    Ok(SpdcState {
        state: total.normalize()?,
        truncation_weight,
    })
}

/// Orthonormal product basis of `photons` single-photon qubit pairs on
/// `paths`, restricted to the listed per-photon basis indices.
fn product_basis(paths: &[PathId], indices: &[usize]) -> Vec<PureState> {
    let mut out = vec![PureState::vacuum()];
    for &p in paths {
        let mut next = Vec::new();
        for s in &out {
            for &k in indices {
                next.push(s.create(ModeLabel::qubit(p, k / 2, k % 2)));
            }
        }
        out = next;
    }
    out
}

/// `F |target><target| + ...` as isotropic noise: `p |t><t| + (1 - p) I/d`
/// with `p = (d F - 1)/(d - 1)` so that the fidelity with `target` is `F`.
/// `identity_basis` spans the `d`-dimensional support.
pub fn isotropic_mixture(target: &PureState, identity_basis: &[PureState], fidelity: f64) -> Result<MixedState> {
    check_unit("fidelity", fidelity)?;
    let d = identity_basis.len() as f64;
    let p = (d * fidelity - 1.0) / (d - 1.0);
    if p < 0.0 {
        return Err(Error::InvalidParameter {
            name: "fidelity",
            value: fidelity,
            reason: "below the maximally mixed value 1/d",
        });
    }
    let mut branches = vec![(p, target.clone())];
    branches.extend(identity_basis.iter().map(|b| ((1.0 - p) / d, b.clone())));
    MixedState::from_branches(branches)
}

/// Hyper-entangled pair with white noise over the 16-dim two-photon space.
pub fn noisy_hyper_pair(p2: PathId, p3: PathId, fidelity: f64) -> Result<MixedState> {
    isotropic_mixture(&hyper_entangled_pair(p2, p3), &product_basis(&[p2, p3], &[0, 1, 2, 3]), fidelity)
}

/// OAM pair with white noise over the 4-dim OAM space (SAM stays H).
pub fn noisy_oam_pair(p4: PathId, p5: PathId, fidelity: f64) -> Result<MixedState> {
    isotropic_mixture(&oam_entangled_pair(p4, p5), &product_basis(&[p4, p5], &[0, 1]), fidelity)
}

/// Input photon with white noise over its 4-dim qubit-pair space.
pub fn noisy_input_state(id: InputStateId, path: PathId, fidelity: f64) -> Result<MixedState> {
    isotropic_mixture(&prepare_input_state(id, path), &product_basis(&[path], &[0, 1, 2, 3]), fidelity)
}
