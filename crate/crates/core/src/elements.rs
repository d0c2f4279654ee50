//! Linear-optical elements as mode transforms.
//!
//! Phase conventions: every reflection (BS or PBS) multiplies by `i` and
//! mirrors the OAM, `l -> -l`; transmission leaves the mode untouched. With
//! these conventions the two-photon PBS and BS tables of the hyper-Bell
//! states hold up to global phase (see [`crate::conformance`]).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::optical::{ModeTransform, PathId, Pauli, Pol};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

/// SPP conversion efficiency of a 16-level plate.
pub const SPP_EFFICIENCY: f64 = 0.97;
/// BPP plus single-mode-fibre conversion efficiency of a 2-level plate.
pub const BPP_EFFICIENCY: f64 = 0.80;
/// Per-channel efficiency of the dual-channel OAM readout.
pub const READOUT_EFFICIENCY: f64 = 0.97;

/// First path id reserved for internal arms of composite elements.
pub const SCRATCH_BASE: PathId = 0xC000;

/// Internal path `k` (0..8) belonging to the composite element anchored at `path`.
pub fn scratch(path: PathId, k: u16) -> PathId {
    SCRATCH_BASE + (path % 0x0800) * 8 + (k % 8)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 50:50 beam splitter. Reflection flips the OAM sign.
pub fn beam_splitter(in1: PathId, in2: PathId, out1: PathId, out2: PathId) -> ModeTransform {
    beam_splitter_with(in1, in2, out1, out2, true)
}

/// 50:50 beam splitter with optional OAM flip on reflection. The
/// non-flipping variant treats every label as a generic two-level DoF.
pub fn beam_splitter_with(
    in1: PathId,
    in2: PathId,
    out1: PathId,
    out2: PathId,
    flip_oam: bool,
) -> ModeTransform {
    let t = c(FRAC_1_SQRT_2, 0.0);
    let r = c(0.0, FRAC_1_SQRT_2);
    ModeTransform::new(format!("BS({in1},{in2}->{out1},{out2})"), [in1, in2], move |m| {
        let (same, other) = if m.path == in1 { (out1, out2) } else { (out2, out1) };
        let refl = if flip_oam { m.flipped_oam() } else { m };
        vec![(m.with_path(same), t), (refl.with_path(other), r)]
    })
}

/// Polarizing beam splitter: H transmitted, V reflected with factor `i` and
/// `l -> -l`.
pub fn polarizing_beam_splitter(in1: PathId, in2: PathId, out1: PathId, out2: PathId) -> ModeTransform {
    ModeTransform::new(format!("PBS({in1},{in2}->{out1},{out2})"), [in1, in2], move |m| {
        let (same, other) = if m.path == in1 { (out1, out2) } else { (out2, out1) };
        match m.pol {
            Pol::H => vec![(m.with_path(same), ONE)],
            Pol::V => vec![(m.flipped_oam().with_path(other), IM)],
        }
    })
}

/// Linear polarizer transmitting `cos(angle) H + sin(angle) V`.
pub fn polarizer(path: PathId, angle: f64) -> ModeTransform {
    let (s, co) = angle.sin_cos();
    let proj = [[c(co * co, 0.0), c(co * s, 0.0)], [c(s * co, 0.0), c(s * s, 0.0)]];
    ModeTransform::polarization(format!("POL({path},{:.4})", angle), path, proj).lossy()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlateKind {
    Hwp,
    Qwp,
}

/// Jones matrix of a retarder with fast axis at `angle` and retardance `gamma`,
/// as `[out][in]`.
pub fn retarder_matrix(angle: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = angle.sin_cos();
    let e = Complex64::from_polar(1.0, gamma);
    // R(-angle) diag(1, e) R(angle) with R(t) = [[cos, sin], [-sin, cos]].
    [
        [c(co * co, 0.0) + e * s * s, c(co * s, 0.0) - e * s * co],
        [c(s * co, 0.0) - e * co * s, c(s * s, 0.0) + e * co * co],
    ]
}

/// Half-wave matrix in the real convention `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`.
pub fn hwp_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (2.0 * angle).sin_cos();
    [[c(co, 0.0), c(s, 0.0)], [c(s, 0.0), c(-co, 0.0)]]
}

pub fn wave_plate(path: PathId, kind: PlateKind, angle: f64) -> ModeTransform {
    let (name, m) = match kind {
        PlateKind::Hwp => ("HWP", hwp_matrix(angle)),
        PlateKind::Qwp => ("QWP", retarder_matrix(angle, FRAC_PI_2)),
    };
    ModeTransform::polarization(format!("{name}({path},{:.4})", angle), path, m)
}

pub fn hwp(path: PathId, angle: f64) -> ModeTransform {
    wave_plate(path, PlateKind::Hwp, angle)
}

pub fn qwp(path: PathId, angle: f64) -> ModeTransform {
    wave_plate(path, PlateKind::Qwp, angle)
}

/// Polarization Pauli applied by an electro-optic modulator.
pub fn sam_pauli(path: PathId, p: Pauli) -> ModeTransform {
    let m = p.matrix();
    let arr = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
    ModeTransform::polarization(format!("EOM({path},{p})"), path, arr)
}

/// Uniform phase on every mode of `path`.
pub fn phase_shift(path: PathId, phi: f64) -> ModeTransform {
    let e = Complex64::from_polar(1.0, phi);
    ModeTransform::new(format!("PHASE({path},{phi:.4})"), [path], move |m| vec![(m, e)])
}

/// Uniform amplitude loss `sqrt(efficiency)`.
pub fn attenuator(path: PathId, efficiency: f64) -> Result<ModeTransform> {
    check_unit("efficiency", efficiency)?;
    let a = c(efficiency.sqrt(), 0.0);
    Ok(ModeTransform::new(format!("LOSS({path},{efficiency})"), [path], move |m| vec![(m, a)]).lossy())
}

/// Mirror: reflection mirrors the OAM. Optionally relabels the path.
pub fn mirror(from: PathId, to: PathId) -> ModeTransform {
    ModeTransform::new(format!("M({from}->{to})"), [from], move |m| {
        vec![(m.flipped_oam().with_path(to), ONE)]
    })
}

/// Moves every mode of `from` to `to` unchanged.
pub fn relabel(from: PathId, to: PathId) -> ModeTransform {
    ModeTransform::new(format!("{from}->{to}"), [from], move |m| vec![(m.with_path(to), ONE)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Spiral phase plate of charge `l`: forward adds `l`, backward subtracts it.
/// `efficiency` below one makes the plate lossy.
pub fn spiral_phase_plate(path: PathId, l: i16, direction: Direction, efficiency: f64) -> Result<ModeTransform> {
    if l < 1 {
        return Err(Error::InvalidParameter {
            name: "spp charge",
            value: l as f64,
            reason: "must be at least 1",
        });
    }
    check_unit("efficiency", efficiency)?;
    let dl = match direction {
        Direction::Forward => l,
        Direction::Backward => -l,
    };
    let a = c(efficiency.sqrt(), 0.0);
    let t = ModeTransform::new(format!("SPP({path},{dl:+})"), [path], move |m| {
        vec![(m.with_oam(m.oam + dl), a)]
    });
    Ok(if efficiency < 1.0 { t.lossy() } else { t })
}

/// OAM superposition a binary phase plate converts to the zero-order mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BppTarget {
    /// `(|0>o + |1>o)/sqrt2`
    Plus,
    /// `(|0>o - |1>o)/sqrt2`
    Minus,
    /// `(|0>o + i|1>o)/sqrt2`
    PlusI,
    /// `(|0>o - i|1>o)/sqrt2`
    MinusI,
}

impl BppTarget {
    /// Amplitudes on `(l = +1, l = -1)`.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            BppTarget::Plus => [c(h, 0.0), c(h, 0.0)],
            BppTarget::Minus => [c(h, 0.0), c(-h, 0.0)],
            BppTarget::PlusI => [c(h, 0.0), c(0.0, h)],
            BppTarget::MinusI => [c(h, 0.0), c(0.0, -h)],
        }
    }
}

/// Binary phase plate followed by a single-mode filter: projects the first
/// order OAM qubit onto `target` and emits the survivor at `l = 0`.
pub fn binary_phase_plate(path: PathId, target: BppTarget, efficiency: f64) -> Result<ModeTransform> {
    check_unit("efficiency", efficiency)?;
    let t = target.amplitudes();
    let a = efficiency.sqrt();
    Ok(ModeTransform::new(format!("BPP({path},{target:?})"), [path], move |m| {
        match crate::optical::oam_bit(m.oam) {
            Some(b) => vec![(m.with_oam(0), t[b].conj() * a)],
            None => Vec::new(),
        }
    })
    .lossy())
}

/// Dove prism rotated by `angle`: phase `exp(-2 i l angle)`. An inverting
/// prism additionally mirrors the OAM.
pub fn dove_prism(path: PathId, angle: f64, inverting: bool) -> ModeTransform {
    ModeTransform::new(format!("DOVE({path},{angle:.4})"), [path], move |m| {
        let ph = Complex64::from_polar(1.0, -2.0 * m.oam as f64 * angle);
        let out = if inverting { m.flipped_oam() } else { m };
        vec![(out, ph)]
    })
}

/// Polarization Sagnac loop with a Dove prism at `angle` in the common path
/// and a compensating prism at `-angle` on the output. Net action: H picks up
/// nothing, V picks up `-exp(4 i l angle)`.
pub fn dove_sagnac_loop(in_path: PathId, out_path: PathId, angle: f64) -> ModeTransform {
    let arm_h = scratch(in_path, 0);
    let arm_v = scratch(in_path, 1);
    let unused_in = scratch(in_path, 2);
    let unused_out = scratch(in_path, 3);
    ModeTransform::chain(
        &format!("SAGNAC({in_path}->{out_path})"),
        &[
            polarizing_beam_splitter(in_path, unused_in, arm_h, arm_v),
            dove_prism(arm_h, angle, false),
            dove_prism(arm_v, angle, false),
            polarizing_beam_splitter(arm_h, arm_v, out_path, unused_out),
            dove_prism(out_path, -angle, false),
        ],
    )
    .with_inputs([in_path])
}

/// Sorter angle of the Dove prism inside the Sagnac loop.
pub const SORTER_DOVE_ANGLE: f64 = -FRAC_PI_8;

/// HWP at 22.5 deg, Dove-prism Sagnac loop, QWP at 45 deg: a CNOT from the
/// OAM qubit onto the SAM qubit, up to the output phases
/// `diag(e^{i pi/4}, e^{-i pi/4})` on the SAM.
pub fn oam_sagnac_sorter(in_path: PathId, out_path: PathId) -> ModeTransform {
    ModeTransform::chain(
        &format!("SORTER({in_path}->{out_path})"),
        &[
            hwp(in_path, PI / 8.0),
            dove_sagnac_loop(in_path, out_path, SORTER_DOVE_ANGLE),
            qwp(out_path, FRAC_PI_4),
        ],
    )
    .with_inputs([in_path])
}

/// Clean CNOT with OAM control and SAM target: the sorter followed by a QWP
/// at 0 that removes its SAM phases (global phase `e^{i pi/4}` remains).
pub fn cnot_oam_to_sam(in_path: PathId, out_path: PathId) -> ModeTransform {
    ModeTransform::chain(
        &format!("CNOT_o->s({in_path}->{out_path})"),
        &[oam_sagnac_sorter(in_path, out_path), qwp(out_path, 0.0)],
    )
    .with_inputs([in_path])
}

/// CNOT with SAM control and OAM target: PBS, inverting Dove prism on the
/// reflected arm, PBS, and a HWP at 0 that removes the `-1` on V.
pub fn cnot_sam_to_oam(in_path: PathId, out_path: PathId) -> ModeTransform {
    let arm_h = scratch(in_path, 4);
    let arm_v = scratch(in_path, 5);
    let unused_in = scratch(in_path, 6);
    let unused_out = scratch(in_path, 7);
    ModeTransform::chain(
        &format!("CNOT_s->o({in_path}->{out_path})"),
        &[
            polarizing_beam_splitter(in_path, unused_in, arm_h, arm_v),
            dove_prism(arm_v, 0.0, true),
            polarizing_beam_splitter(arm_h, arm_v, out_path, unused_out),
            hwp(out_path, 0.0),
        ],
    )
    .with_inputs([in_path])
}

/// Dual-channel OAM readout: sorter then PBS. `l = +1` exits on `plus`,
/// `l = -1` on `minus`. The input SAM must be H.
pub fn dual_channel_readout(path: PathId, plus: PathId, minus: PathId, efficiency: f64) -> Result<ModeTransform> {
    let mid = scratch(path, 4);
    let unused = scratch(path, 5);
    let mut parts = vec![
        oam_sagnac_sorter(path, mid),
        polarizing_beam_splitter(mid, unused, plus, minus),
    ];
    if efficiency < 1.0 {
        parts.push(attenuator(plus, efficiency)?);
        parts.push(attenuator(minus, efficiency)?);
    }
    let t = ModeTransform::chain(&format!("READOUT({path}->{plus},{minus})"), &parts).with_inputs([path]);
    Ok(if efficiency < 1.0 { t.lossy() } else { t })
}

/// Serializable element description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementSpec {
    Bs {
        in_paths: [PathId; 2],
        out_paths: [PathId; 2],
    },
    Pbs {
        in_paths: [PathId; 2],
        out_paths: [PathId; 2],
    },
    Polarizer {
        path: PathId,
        angle: f64,
    },
    WavePlate {
        path: PathId,
        plate: PlateKind,
        angle: f64,
    },
    Spp {
        path: PathId,
        charge: i16,
        direction: Direction,
    },
    Bpp {
        path: PathId,
        target: BppTarget,
    },
    DovePrism {
        path: PathId,
        angle: f64,
        #[serde(default)]
        inverting: bool,
    },
    PhaseShift {
        path: PathId,
        phi: f64,
    },
    OamSagnacSorter {
        in_path: PathId,
        out_path: PathId,
    },
    Modulator {
        path: PathId,
        pauli: Pauli,
    },
}

impl ElementSpec {
    /// Builds the transform. `ideal = false` applies the SPP/BPP efficiencies.
    pub fn to_transform(&self, ideal: bool) -> Result<ModeTransform> {
        Ok(match *self {
            ElementSpec::Bs { in_paths, out_paths } => {
                beam_splitter(in_paths[0], in_paths[1], out_paths[0], out_paths[1])
            }
            ElementSpec::Pbs { in_paths, out_paths } => {
                polarizing_beam_splitter(in_paths[0], in_paths[1], out_paths[0], out_paths[1])
            }
            ElementSpec::Polarizer { path, angle } => polarizer(path, angle),
            ElementSpec::WavePlate { path, plate, angle } => wave_plate(path, plate, angle),
            ElementSpec::Spp { path, charge, direction } => {
                let eff = if ideal { 1.0 } else { SPP_EFFICIENCY };
                spiral_phase_plate(path, charge, direction, eff)?
            }
            ElementSpec::Bpp { path, target } => {
                let eff = if ideal { 1.0 } else { BPP_EFFICIENCY };
                binary_phase_plate(path, target, eff)?
            }
            ElementSpec::DovePrism { path, angle, inverting } => dove_prism(path, angle, inverting),
            ElementSpec::PhaseShift { path, phi } => phase_shift(path, phi),
            ElementSpec::OamSagnacSorter { in_path, out_path } => oam_sagnac_sorter(in_path, out_path),
            ElementSpec::Modulator { path, pauli } => sam_pauli(path, pauli),
        })
    }

    /// Whether the element is declared lossy in ideal mode.
    pub fn is_lossy(&self) -> bool {
        matches!(self, ElementSpec::Polarizer { .. } | ElementSpec::Bpp { .. })
    }
}
