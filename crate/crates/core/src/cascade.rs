//! Symbolic N-DoF hyper-Bell cascade.
//!
//! A two-photon state carrying N two-level DoFs is labelled by N Bell states.
//! A beam splitter post-selects exchange-antisymmetric vectors; a per-DoF
//! filter keeps `psi±` in that DoF and a bit flip removes it from the parity.
//! Alternating the two isolates a single label vector.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::elements::{beam_splitter_with, hwp};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::optical::{filter, DetectionPattern, PathConstraint, PathId, Pol, PureState};
use crate::sources::{hyper_bell_state, two_photon_state, Bell, HyperBellLabel};

pub const MAX_DOFS: usize = 8;

/// One Bell label per DoF.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BellLabelVector(pub Vec<Bell>);

impl BellLabelVector {
    /// All `4^n` vectors in lexicographic order of `Bell::ALL`.
    pub fn enumerate(n: usize) -> Vec<BellLabelVector> {
        (0..4usize.pow(n as u32))
            .map(|mut k| {
                let mut v = vec![Bell::PhiPlus; n];
                for slot in v.iter_mut().rev() {
                    *slot = Bell::ALL[k % 4];
                    k /= 4;
                }
                BellLabelVector(v)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BellLabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", b.sam_name())?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

/// Exchange parity over all DoFs.
pub fn exchange_parity(v: &BellLabelVector) -> Parity {
    exchange_parity_masked(v, &vec![false; v.len()])
}

/// Exchange parity ignoring erased DoFs.
pub fn exchange_parity_masked(v: &BellLabelVector, erased: &[bool]) -> Parity {
    let odd = v
        .0
        .iter()
        .zip(erased)
        .filter(|(b, &e)| !e && **b == Bell::PsiMinus)
        .count()
        % 2
        == 1;
    if odd {
        Parity::Antisymmetric
    } else {
        Parity::Symmetric
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageKind {
    BsFilter,
    DofFilter { dof: usize },
    BitFlip { dof: usize },
    /// Marker for a teleportation-based QND on the listed DoFs.
    Qnd { preserved: Vec<usize> },
}

impl StageKind {
    pub fn filters(&self) -> bool {
        matches!(self, StageKind::BsFilter | StageKind::DofFilter { .. })
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageKind::BsFilter => write!(f, "BS"),
            StageKind::DofFilter { dof } => write!(f, "filter[{dof}]"),
            StageKind::BitFlip { dof } => write!(f, "flip[{dof}]"),
            StageKind::Qnd { preserved } => write!(f, "QND{preserved:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CascadeStage {
    pub kind: StageKind,
    pub survivors_in: Vec<BellLabelVector>,
    pub survivors_out: Vec<BellLabelVector>,
    /// DoFs removed from the exchange parity after this stage.
    pub erased: Vec<bool>,
}

/// Keeps the antisymmetric vectors.
pub fn bs_filter(survivors: &[BellLabelVector], erased: &[bool], exec: Exec) -> Vec<BellLabelVector> {
    let keep = exec.map(survivors, |v| exchange_parity_masked(v, erased) == Parity::Antisymmetric);
    survivors
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(v, _)| v.clone())
        .collect()
}

/// Keeps vectors with `psi±` in `dof`, then erases `dof` from the parity.
pub fn dof_filter_and_flip(survivors: &[BellLabelVector], erased: &mut [bool], dof: usize) -> Vec<BellLabelVector> {
    let out = survivors
        .iter()
        .filter(|v| matches!(v.0[dof], Bell::PsiPlus | Bell::PsiMinus))
        .cloned()
        .collect();
    erased[dof] = true;
    out
}

/// Full cascade plan for `n` DoFs.
pub fn run_cascade(n: usize) -> Result<Vec<CascadeStage>> {
    run_cascade_with(n, Exec::default())
}

pub fn run_cascade_with(n: usize, exec: Exec) -> Result<Vec<CascadeStage>> {
    if !(1..=MAX_DOFS).contains(&n) {
        return Err(Error::CascadeTooLarge(n));
    }
    let mut erased = vec![false; n];
    let mut current = BellLabelVector::enumerate(n);
    let mut stages = Vec::new();
    let mut push = |kind, input: &[BellLabelVector], out: Vec<BellLabelVector>, erased: &[bool]| {
        stages.push(CascadeStage {
            kind,
            survivors_in: input.to_vec(),
            survivors_out: out.clone(),
            erased: erased.to_vec(),
        });
        out
    };
    for dof in 0..n {
        if dof > 0 {
            let kept = current.clone();
            current = push(StageKind::Qnd { preserved: (dof..n).collect() }, &current, kept, &erased);
        }
        let out = bs_filter(&current, &erased, exec);
        current = push(StageKind::BsFilter, &current, out, &erased);
        if dof + 1 < n {
            let out = dof_filter_and_flip(&current, &mut erased, dof);
            let before = erased.iter().enumerate().map(|(i, &e)| e && i != dof).collect::<Vec<_>>();
            current = push(StageKind::DofFilter { dof }, &current, out, &before);
            let kept = current.clone();
            current = push(StageKind::BitFlip { dof }, &current, kept, &erased);
        }
    }
    Ok(stages)
}

/// Survivor counts: the full set followed by every filtering stage.
pub fn stage_counts(stages: &[CascadeStage]) -> Vec<usize> {
    let mut out = Vec::new();
    if let Some(first) = stages.first() {
        out.push(first.survivors_in.len());
    }
    out.extend(stages.iter().filter(|s| s.kind.filters()).map(|s| s.survivors_out.len()));
    out
}

pub fn final_survivor(stages: &[CascadeStage]) -> Option<&BellLabelVector> {
    match stages.last().map(|s| s.survivors_out.as_slice()) {
        Some([one]) => Some(one),
        _ => None,
    }
}

/// Number of antisymmetric vectors among `4^n`.
pub fn antisymmetric_count(n: usize) -> usize {
    (4usize.pow(n as u32) - 2usize.pow(n as u32)) / 2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeCheck {
    pub n: usize,
    /// Surviving vectors per filtering stage, from amplitudes.
    pub survivors: Vec<Vec<BellLabelVector>>,
    /// Overlap of the final conditional state with the predicted one.
    pub final_overlap: f64,
}

const A_IN: (PathId, PathId) = (1, 2);
const A_MID: (PathId, PathId) = (11, 12);
const A_OUT: (PathId, PathId) = (21, 22);
const NONZERO: f64 = 1e-12;

/// Two photons on `paths` in the given label vector. The first DoF is the
/// polarization and the second the OAM; with one DoF the OAM is fixed.
fn label_state(v: &BellLabelVector, paths: (PathId, PathId)) -> PureState {
    match v.0.as_slice() {
        [x] => {
            let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (i, row) in c.iter_mut().enumerate().step_by(2) {
                for (j, a) in row.iter_mut().enumerate().step_by(2) {
                    *a = x.amplitude(i / 2, j / 2);
                }
            }
            two_photon_state(&c, paths.0, paths.1)
        }
        [x, y] => hyper_bell_state(HyperBellLabel::new(*x, *y), paths.0, paths.1),
        _ => unreachable!("amplitude check supports one or two DoFs"),
    }
}

fn coincidence(state: &PureState, paths: (PathId, PathId)) -> Result<(f64, Option<PureState>)> {
    Ok(filter(state, &DetectionPattern::one_each(&[paths.0, paths.1])?))
}

/// Polarization `psi±` filter: orthogonal polarizations in the two outputs.
fn orthogonal_pol(state: &PureState, paths: (PathId, PathId)) -> Result<(f64, Option<PureState>)> {
    let mut p = 0.0;
    let mut kept = PureState::zero();
    for (a, b) in [(Pol::H, Pol::V), (Pol::V, Pol::H)] {
        let pat = DetectionPattern::new([
            PathConstraint::exactly(paths.0, 1).with_pol(a),
            PathConstraint::exactly(paths.1, 1).with_pol(b),
        ])?;
        let (q, s) = filter(state, &pat);
        if let Some(s) = s {
            p += q;
            kept = kept.plus(&s.scaled(Complex64::new(q.sqrt(), 0.0)));
        }
    }
    Ok((p, kept.normalize().ok()))
}

/// Re-runs the cascade for `n <= 2` with photons and optical elements and
/// compares the surviving label vectors stage by stage.
pub fn amplitude_check(n: usize) -> Result<AmplitudeCheck> {
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "amplitude check supports N = 1 or 2",
        });
    }
    let stages = run_cascade(n)?;
    let symbolic: Vec<&Vec<BellLabelVector>> =
        stages.iter().filter(|s| s.kind.filters()).map(|s| &s.survivors_out).collect();

    let bs1 = beam_splitter_with(A_IN.0, A_IN.1, A_MID.0, A_MID.1, false);
    let bs2 = beam_splitter_with(A_MID.0, A_MID.1, A_OUT.0, A_OUT.1, false);
    let flip = hwp(A_MID.1, std::f64::consts::FRAC_PI_4);

    let mut survivors = vec![Vec::new(); symbolic.len()];
    let mut final_state = None;
    for v in BellLabelVector::enumerate(n) {
        let mut state = Some(label_state(&v, A_IN).apply(&bs1)?);
        let mut outcome = |k: usize, r: (f64, Option<PureState>)| -> Option<PureState> {
            if r.0 > NONZERO {
                survivors[k].push(v.clone());
                r.1
            } else {
                None
            }
        };
        state = match state {
            Some(s) => outcome(0, coincidence(&s, A_MID)?),
            None => None,
        };
        if n == 2 {
            state = match state {
                Some(s) => outcome(1, orthogonal_pol(&s, A_MID)?),
                None => None,
            };
            state = match state {
                Some(s) => outcome(2, coincidence(&s.apply(&flip)?.apply(&bs2)?, A_OUT)?),
                None => None,
            };
        }
        if let Some(s) = state {
            final_state = Some((v, s));
        }
    }

    for (k, (amp, sym)) in survivors.iter().zip(&symbolic).enumerate() {
        if amp != *sym {
            let label = amp
                .iter()
                .chain(sym.iter())
                .find(|v| amp.contains(v) != sym.contains(v))
                .map(|v| v.to_string())
                .unwrap_or_default();
            return Err(Error::Mismatch { label, stage: k });
        }
    }

    let final_overlap = match (final_state, final_survivor(&stages)) {
        (Some((v, s)), Some(expected)) if &v == expected => {
            let predicted = match n {
                1 => label_state(expected, A_MID),
                // The flip maps psi+ in the erased DoF to phi+.
                _ => {
                    let mut flipped = expected.clone();
                    flipped.0[0] = Bell::PhiPlus;
                    label_state(&flipped, A_OUT)
                }
            };
            predicted.overlap_modulus(&s)
        }
        (got, _) => {
            return Err(Error::Mismatch {
                label: got.map(|(v, _)| v.to_string()).unwrap_or_else(|| "none".into()),
                stage: symbolic.len(),
            })
        }
    };
    Ok(AmplitudeCheck {
        n,
        survivors,
        final_overlap,
    })
}
