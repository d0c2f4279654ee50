//! Detection patterns and post-selection.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mixed::MixedState;
use super::mode::{Configuration, ModeLabel, PathId, Pol};
use super::pure::PureState;
use crate::error::{Error, Result};

/// Photon-number requirement on one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Count {
    Exactly(usize),
    AtLeast(usize),
}

impl Count {
    fn admits(self, n: usize) -> bool {
        match self {
            Count::Exactly(k) => n == k,
            Count::AtLeast(k) => n >= k,
        }
    }
}

/// Constraint on the photons seen by the detector on `path`.
///
/// With a polarization or OAM filter set, only photons passing the filter are
/// detected and counted; the rest stay in the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathConstraint {
    pub path: PathId,
    pub count: Count,
    pub pol: Option<Pol>,
    pub oam: Option<i16>,
}

impl PathConstraint {
    pub fn exactly(path: PathId, n: usize) -> Self {
        PathConstraint {
            path,
            count: Count::Exactly(n),
            pol: None,
            oam: None,
        }
    }

    pub fn at_least(path: PathId, n: usize) -> Self {
        PathConstraint {
            count: Count::AtLeast(n),
            ..PathConstraint::exactly(path, 0)
        }
    }

    pub fn with_pol(mut self, pol: Pol) -> Self {
        self.pol = Some(pol);
        self
    }

    pub fn with_oam(mut self, oam: i16) -> Self {
        self.oam = Some(oam);
        self
    }

    fn sees(&self, m: &ModeLabel) -> bool {
        m.path == self.path
            && self.pol.is_none_or(|p| p == m.pol)
            && self.oam.is_none_or(|l| l == m.oam)
    }
}

/// A set of per-path constraints, evaluated jointly.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DetectionPattern {
    constraints: Vec<PathConstraint>,
}

impl DetectionPattern {
    pub fn new<I: IntoIterator<Item = PathConstraint>>(constraints: I) -> Result<Self> {
        let constraints: Vec<PathConstraint> = constraints.into_iter().collect();
        let mut seen = BTreeSet::new();
        for c in &constraints {
            if !seen.insert(c.path) {
                return Err(Error::DuplicatePath(c.path));
            }
        }
        Ok(DetectionPattern { constraints })
    }

    /// One photon on each listed path.
    pub fn one_each(paths: &[PathId]) -> Result<Self> {
        DetectionPattern::new(paths.iter().map(|&p| PathConstraint::exactly(p, 1)))
    }

    /// Exact photon numbers per path.
    pub fn counts(counts: &[(PathId, usize)]) -> Result<Self> {
        DetectionPattern::new(counts.iter().map(|&(p, n)| PathConstraint::exactly(p, n)))
    }

    /// Threshold-detector version: every click requirement becomes "at least one".
    pub fn bucket(&self) -> Self {
        let constraints = self
            .constraints
            .iter()
            .map(|c| match c.count {
                Count::Exactly(n) | Count::AtLeast(n) if n > 0 => PathConstraint {
                    count: Count::AtLeast(1),
                    ..*c
                },
                _ => *c,
            })
            .collect();
        DetectionPattern { constraints }
    }

    pub fn constraints(&self) -> &[PathConstraint] {
        &self.constraints
    }

    pub fn paths(&self) -> BTreeSet<PathId> {
        self.constraints.iter().map(|c| c.path).collect()
    }

    pub fn matches(&self, cfg: &Configuration) -> bool {
        self.constraints.iter().all(|c| {
            let n = cfg.modes().iter().filter(|m| c.sees(m)).count();
            c.count.admits(n)
        })
    }

    fn detected(&self, m: &ModeLabel) -> bool {
        self.constraints.iter().any(|c| c.sees(m))
    }

    /// Splits a configuration into detected photons and the remainder.
    pub fn split(&self, cfg: &Configuration) -> (Configuration, Configuration) {
        cfg.split(|m| self.detected(m))
    }
}

/// Outcome of a post-selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Normalized post-measurement state of the undetected photons, `None`
    /// when the pattern has probability zero.
    pub conditional: Option<MixedState>,
}

impl Projection {
    fn empty() -> Self {
        Projection {
            probability: 0.0,
            conditional: None,
        }
    }

    /// Conditional state, or [`Error::ZeroState`] if the pattern never fires.
    pub fn state(self) -> Result<MixedState> {
        self.conditional.ok_or(Error::ZeroState)
    }
}

/// Destructive post-selection of a pure state.
///
/// Detected photons are removed; their internal degrees of freedom are traced
/// out, which is why the conditional state is in general mixed.
pub fn project(state: &PureState, pattern: &DetectionPattern) -> Projection {
    project_any(state, std::slice::from_ref(pattern))
}

/// Post-selection on the union of mutually exclusive patterns.
/// Each configuration is credited to the first pattern it matches.
pub fn project_any(state: &PureState, patterns: &[DetectionPattern]) -> Projection {
    let groups = grouped(state, patterns);
    finish(groups.into_values().map(|s| (1.0, s)))
}

/// Destructive post-selection of an ensemble.
pub fn project_mixed(state: &MixedState, pattern: &DetectionPattern) -> Projection {
    project_mixed_any(state, std::slice::from_ref(pattern))
}

pub fn project_mixed_any(state: &MixedState, patterns: &[DetectionPattern]) -> Projection {
    let mut parts = Vec::new();
    for (w, s) in state.branches() {
        for (_, residual) in grouped(s, patterns) {
            parts.push((*w, residual));
        }
    }
    finish(parts)
}

/// Probability that `pattern` fires, without building the conditional state.
pub fn probability(state: &PureState, pattern: &DetectionPattern) -> f64 {
    probability_any(state, std::slice::from_ref(pattern))
}

pub fn probability_any(state: &PureState, patterns: &[DetectionPattern]) -> f64 {
    state
        .terms()
        .filter(|(c, _)| patterns.iter().any(|p| p.matches(c)))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

pub fn probability_mixed(state: &MixedState, pattern: &DetectionPattern) -> f64 {
    state
        .branches()
        .iter()
        .map(|(w, s)| w * probability(s, pattern))
        .sum()
}

/// Non-destructive filter: keeps the matching component with all photons in
/// place and returns it normalized together with its probability.
pub fn filter(state: &PureState, pattern: &DetectionPattern) -> (f64, Option<PureState>) {
    let kept = state.filter_terms(|c| pattern.matches(c));
    let p = kept.norm_sqr();
    (p, kept.normalize().ok())
}

fn grouped(state: &PureState, patterns: &[DetectionPattern]) -> BTreeMap<Configuration, PureState> {
    let mut groups: BTreeMap<Configuration, Vec<(Configuration, Complex64)>> = BTreeMap::new();
    for (cfg, a) in state.terms() {
        let Some(p) = patterns.iter().find(|p| p.matches(cfg)) else {
            continue;
        };
        let (detected, rest) = p.split(cfg);
        groups.entry(detected).or_default().push((rest, *a));
    }
    groups
        .into_iter()
        .map(|(k, v)| (k, PureState::from_terms(v).with_prune_eps(state.prune_eps())))
        .collect()
}

fn finish<I: IntoIterator<Item = (f64, PureState)>>(parts: I) -> Projection {
    let mut branches = Vec::new();
    let mut total = 0.0;
    for (w, s) in parts {
        let n = w * s.norm_sqr();
        if n <= 0.0 {
            continue;
        }
        total += n;
        if let Ok(ns) = s.normalize() {
            branches.push((n, ns));
        }
    }
    if branches.is_empty() {
        return Projection::empty();
    }
    let cond = MixedState::from_branches(branches)
        .and_then(|m| m.normalized())
        .ok();
    Projection {
        probability: total,
        conditional: cond,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optical::mode::{OAM_L, OAM_R};

    #[test]
    fn duplicate_paths_rejected() {
        let r = DetectionPattern::new([PathConstraint::exactly(1, 1), PathConstraint::exactly(1, 0)]);
        assert_eq!(r, Err(Error::DuplicatePath(1)));
    }

    #[test]
    fn vacuum_pattern_on_single_photon_never_fires() {
        let s = PureState::single(ModeLabel::new(1, Pol::H, OAM_R));
        let p = project(&s, &DetectionPattern::counts(&[(1, 0)]).unwrap());
        assert_eq!(p.probability, 0.0);
        assert!(p.conditional.is_none());
    }

    #[test]
    fn tracing_detected_photon_leaves_mixture() {
        // (|H>1|R>2 + |V>1|L>2)/sqrt2, detect path 1 without resolving pol.
        let h = ModeLabel::new(1, Pol::H, 0);
        let v = ModeLabel::new(1, Pol::V, 0);
        let r = ModeLabel::new(2, Pol::H, OAM_R);
        let l = ModeLabel::new(2, Pol::H, OAM_L);
        let s = PureState::from_terms([
            (Configuration::from_modes([h, r]), Complex64::new(1.0, 0.0)),
            (Configuration::from_modes([v, l]), Complex64::new(1.0, 0.0)),
        ])
        .normalize()
        .unwrap();
        let p = project(&s, &DetectionPattern::one_each(&[1]).unwrap());
        assert!((p.probability - 1.0).abs() < 1e-12);
        assert_eq!(p.conditional.unwrap().len(), 2);
    }
}
