use num_complex::Complex64;

use super::pure::PureState;
use super::transform::ModeTransform;
use crate::error::{Error, Result};

/// Weighted ensemble of pure states.
///
/// Each branch holds a normalized state; weights are non-negative and sum to
/// one after [`MixedState::normalized`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MixedState {
    branches: Vec<(f64, PureState)>,
}

impl From<PureState> for MixedState {
    fn from(s: PureState) -> Self {
        MixedState::from_pure(s)
    }
}

impl MixedState {
    /// Wraps a pure state. The state's squared norm becomes the branch weight.
    pub fn from_pure(s: PureState) -> Self {
        MixedState::from_unnormalized([s])
    }

    /// Builds an ensemble of unnormalized states `sum_k |s_k><s_k|`.
    pub fn from_unnormalized<I: IntoIterator<Item = PureState>>(states: I) -> Self {
        let branches = states
            .into_iter()
            .filter_map(|s| {
                let w = s.norm_sqr();
                s.normalize().ok().map(|n| (w, n))
            })
            .collect();
        MixedState { branches }
    }

    /// Builds an ensemble from explicit weights; states are normalized.
    pub fn from_branches<I: IntoIterator<Item = (f64, PureState)>>(branches: I) -> Result<Self> {
        let mut out = Vec::new();
        for (w, s) in branches {
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "branch weight",
                    value: w,
                    reason: "must be non-negative",
                });
            }
            if w == 0.0 {
                continue;
            }
            out.push((w, s.normalize()?));
        }
        Ok(MixedState { branches: out })
    }

    pub fn branches(&self) -> &[(f64, PureState)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|(w, _)| w).sum()
    }

    /// Rescales weights to sum to one.
    pub fn normalized(&self) -> Result<MixedState> {
        let t = self.total_weight();
        if self.branches.is_empty() || t <= 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(MixedState {
            branches: self.branches.iter().map(|(w, s)| (w / t, s.clone())).collect(),
        })
    }

    /// `a * self + b * other` as an ensemble (no renormalization).
    pub fn mix(&self, a: f64, other: &MixedState, b: f64) -> MixedState {
        let mut branches: Vec<(f64, PureState)> =
            self.branches.iter().map(|(w, s)| (w * a, s.clone())).collect();
        branches.extend(other.branches.iter().map(|(w, s)| (w * b, s.clone())));
        branches.retain(|(w, _)| *w > 0.0);
        MixedState { branches }
    }

    pub fn scaled(&self, factor: f64) -> MixedState {
        MixedState {
            branches: self
                .branches
                .iter()
                .map(|(w, s)| (w * factor, s.clone()))
                .filter(|(w, _)| *w > 0.0)
                .collect(),
        }
    }

    /// Applies `t` to every branch. Lossy transforms move the lost weight out
    /// of the ensemble, so the total weight becomes the survival probability.
    pub fn apply(&self, t: &ModeTransform) -> Result<MixedState> {
        let mut out = Vec::with_capacity(self.branches.len());
        for (w, s) in &self.branches {
            let next = s.apply(t)?;
            let n = next.norm_sqr();
            if let Ok(ns) = next.normalize() {
                out.push((w * n, ns));
            }
        }
        Ok(MixedState { branches: out })
    }

    pub fn apply_all<'a, I: IntoIterator<Item = &'a ModeTransform>>(&self, ts: I) -> Result<MixedState> {
        let mut s = self.clone();
        for t in ts {
            s = s.apply(t)?;
        }
        Ok(s)
    }

    /// Expectation `sum_k w_k |<target|s_k>|^2` for a normalized target.
    pub fn overlap_probability(&self, target: &PureState) -> f64 {
        self.branches
            .iter()
            .map(|(w, s)| w * s.inner(target).norm_sqr())
            .sum()
    }

    /// `<a|rho|b>`.
    pub fn matrix_element(&self, a: &PureState, b: &PureState) -> Complex64 {
        self.branches
            .iter()
            .map(|(w, s)| a.inner(s) * s.inner(b) * *w)
            .sum()
    }

    /// Tensor product with a pure state on disjoint modes.
    pub fn tensor_pure(&self, other: &PureState) -> MixedState {
        MixedState::from_unnormalized(
            self.branches
                .iter()
                .map(|(w, s)| s.tensor(other).scaled(Complex64::new(w.sqrt(), 0.0))),
        )
    }

    /// Tensor product of two ensembles.
    pub fn tensor(&self, other: &MixedState) -> MixedState {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (w1, s1) in &self.branches {
            for (w2, s2) in &other.branches {
                out.push((w1 * w2, s1.tensor(s2)));
            }
        }
        MixedState { branches: out }
    }
}
