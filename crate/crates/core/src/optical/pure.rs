use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_complex::Complex64;

use super::mode::{Configuration, ModeLabel, PathId};
use super::transform::ModeTransform;
use crate::error::{Error, Result};

/// Amplitudes below this modulus are dropped.
pub const PRUNE_EPS: f64 = 1e-12;
/// Tolerance for state comparisons.
pub const COMPARE_TOL: f64 = 1e-9;

/// Sparse superposition over occupation-number configurations.
///
/// Each configuration key stands for the normalized Fock state
/// `prod_k (a_k^dag)^{n_k} / sqrt(n_k!) |vac>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    terms: BTreeMap<Configuration, Complex64>,
    prune_eps: f64,
}

impl Default for PureState {
    fn default() -> Self {
        PureState::zero()
    }
}

impl PureState {
    /// The empty superposition (no amplitude anywhere).
    pub fn zero() -> Self {
        PureState {
            terms: BTreeMap::new(),
            prune_eps: PRUNE_EPS,
        }
    }

    pub fn vacuum() -> Self {
        PureState::from_terms([(Configuration::vacuum(), Complex64::new(1.0, 0.0))])
    }

    pub fn single(mode: ModeLabel) -> Self {
        PureState::vacuum().create(mode)
    }

    /// Builds a state from raw terms; duplicate configurations are summed.
    pub fn from_terms<I: IntoIterator<Item = (Configuration, Complex64)>>(terms: I) -> Self {
        let mut s = PureState::zero();
        for (c, a) in terms {
            *s.terms.entry(c).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        s.prune();
        s
    }

    /// Evaluates a creation polynomial on the vacuum.
    ///
    /// Each monomial is `(coefficient, [factor, ...])` where every factor is a
    /// linear combination of modes standing for one creation operator.
    pub fn from_creations(monomials: &[(Complex64, Vec<Vec<(ModeLabel, Complex64)>>)]) -> Self {
        let mut out = PureState::zero();
        for (coef, factors) in monomials {
            let mut s = PureState::vacuum().scaled(*coef);
            for f in factors {
                s = s.create_combination(f);
            }
            out = out.plus(&s);
        }
        out
    }

    pub fn with_prune_eps(mut self, eps: f64) -> Self {
        self.prune_eps = eps;
        self.prune();
        self
    }

    pub fn prune_eps(&self) -> f64 {
        self.prune_eps
    }

    fn prune(&mut self) {
        let eps = self.prune_eps;
        self.terms.retain(|_, a| a.norm() >= eps);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Configuration, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, config: &Configuration) -> Complex64 {
        self.terms
            .get(config)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Amplitude of the configuration holding exactly `modes`.
    pub fn amplitude_of(&self, modes: &[ModeLabel]) -> Complex64 {
        self.amplitude(&Configuration::from_modes(modes.iter().copied()))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<PureState> {
        let n = self.norm_sqr().sqrt();
        if self.terms.is_empty() || n < self.prune_eps {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> PureState {
        let mut s = self.clone();
        for a in s.terms.values_mut() {
            *a *= c;
        }
        s.prune();
        s
    }

    pub fn plus(&self, other: &PureState) -> PureState {
        let mut s = self.clone();
        for (c, a) in &other.terms {
            *s.terms.entry(c.clone()).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        s.prune();
        s
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, a) in &small.terms {
            if let Some(b) = large.terms.get(c) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    /// `|<a|b>| / (|a| |b|)`: overlap modulus, insensitive to global phase.
    pub fn overlap_modulus(&self, other: &PureState) -> f64 {
        let d = (self.norm_sqr() * other.norm_sqr()).sqrt();
        if d == 0.0 {
            return 0.0;
        }
        self.inner(other).norm() / d
    }

    /// Equality up to global phase and normalization.
    pub fn equals_up_to_phase(&self, other: &PureState) -> bool {
        (self.overlap_modulus(other) - 1.0).abs() <= COMPARE_TOL
    }

    /// Applies one creation operator `a_m^dag`.
    pub fn create(&self, mode: ModeLabel) -> PureState {
        self.create_combination(&[(mode, Complex64::new(1.0, 0.0))])
    }

    /// Applies `sum_k c_k a_k^dag`.
    pub fn create_combination(&self, combo: &[(ModeLabel, Complex64)]) -> PureState {
        let mut out: HashMap<Configuration, Complex64> = HashMap::new();
        for (cfg, a) in &self.terms {
            for (m, c) in combo {
                let n = cfg.occupation(m) as f64;
                *out.entry(cfg.with(*m)).or_insert(Complex64::new(0.0, 0.0)) +=
                    a * c * (n + 1.0).sqrt();
            }
        }
        let mut s = PureState {
            terms: out.into_iter().collect(),
            prune_eps: self.prune_eps,
        };
        s.prune();
        s
    }

    /// Photon number shared by every term, or `None` for a number superposition.
    pub fn photon_count(&self) -> Option<usize> {
        let mut counts = self.terms.keys().map(|c| c.photon_count());
        let first = counts.next()?;
        counts.all(|n| n == first).then_some(first)
    }

    pub fn is_number_superposition(&self) -> bool {
        self.photon_count().is_none() && !self.terms.is_empty()
    }

    pub fn paths(&self) -> BTreeSet<PathId> {
        self.terms
            .keys()
            .flat_map(|c| c.modes().iter().map(|m| m.path))
            .collect()
    }

    /// Distinct occupied modes across all terms.
    pub fn occupied_modes(&self) -> BTreeSet<ModeLabel> {
        self.terms
            .keys()
            .flat_map(|c| c.modes().iter().copied())
            .collect()
    }

    /// Product state on disjoint mode sets.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut out = BTreeMap::new();
        for (c1, a1) in &self.terms {
            for (c2, a2) in &other.terms {
                let mut norm = (c1.factorial_weight() * c2.factorial_weight()).sqrt();
                let joint = c1.union(c2);
                norm /= joint.factorial_weight().sqrt();
                *out.entry(joint).or_insert(Complex64::new(0.0, 0.0)) += a1 * a2 / norm;
            }
        }
        let mut s = PureState {
            terms: out,
            prune_eps: self.prune_eps,
        };
        s.prune();
        s
    }

    /// Contracts `bra`, a state living on `paths`, against this state and
    /// returns the (unnormalized) residual on the remaining paths.
    pub fn partial_overlap(&self, bra: &PureState, paths: &BTreeSet<PathId>) -> PureState {
        let mut out: BTreeMap<Configuration, Complex64> = BTreeMap::new();
        for (cfg, a) in &self.terms {
            let (on, off) = cfg.split(|m| paths.contains(&m.path));
            let b = bra.amplitude(&on);
            if b.norm() > 0.0 {
                *out.entry(off).or_insert(Complex64::new(0.0, 0.0)) += b.conj() * a;
            }
        }
        let mut s = PureState {
            terms: out,
            prune_eps: self.prune_eps,
        };
        s.prune();
        s
    }

    /// Substitutes every creation operator with its image under `t`.
    ///
    /// Fails with [`Error::NonUnitaryTransform`] when `t` is not declared lossy
    /// and is not an isometry on the modes this state occupies.
    pub fn apply(&self, t: &ModeTransform) -> Result<PureState> {
        if !t.is_lossy() {
            let occupied: Vec<ModeLabel> = self.occupied_modes().into_iter().collect();
            t.check_isometry(&occupied)?;
        }
        Ok(self.apply_unchecked(t))
    }

    pub fn apply_all<'a, I: IntoIterator<Item = &'a ModeTransform>>(&self, ts: I) -> Result<PureState> {
        let mut s = self.clone();
        for t in ts {
            s = s.apply(t)?;
        }
        Ok(s)
    }

    pub(crate) fn apply_unchecked(&self, t: &ModeTransform) -> PureState {
        let mut images: HashMap<ModeLabel, Vec<(ModeLabel, Complex64)>> = HashMap::new();
        let mut out: HashMap<Configuration, Complex64> = HashMap::new();
        for (cfg, a) in &self.terms {
            // Untouched photons are carried over as a fixed prefix.
            let (moved, fixed) = cfg.split(|m| t.acts_on(m));
            if moved.photon_count() == 0 {
                *out.entry(cfg.clone()).or_insert(Complex64::new(0.0, 0.0)) += a;
                continue;
            }
            let start = a / moved.factorial_weight().sqrt();
            let mut partial: HashMap<Configuration, Complex64> = HashMap::new();
            partial.insert(Configuration::vacuum(), start);
            for m in moved.modes() {
                let img = images.entry(*m).or_insert_with(|| t.image(*m));
                let mut next: HashMap<Configuration, Complex64> = HashMap::with_capacity(partial.len() * img.len());
                for (c, amp) in &partial {
                    for (o, coef) in img.iter() {
                        let n = c.occupation(o) as f64;
                        *next.entry(c.with(*o)).or_insert(Complex64::new(0.0, 0.0)) +=
                            amp * coef * (n + 1.0).sqrt();
                    }
                }
                partial = next;
            }
            for (c, amp) in partial {
                if amp.norm() == 0.0 {
                    continue;
                }
                // Merge with the untouched photons; renormalize for shared modes.
                let joint = c.union(&fixed);
                let w = (c.factorial_weight() * fixed.factorial_weight() / joint.factorial_weight()).sqrt();
                *out.entry(joint).or_insert(Complex64::new(0.0, 0.0)) += amp * w;
            }
        }
        let mut s = PureState {
            terms: out.into_iter().collect(),
            prune_eps: self.prune_eps,
        };
        s.prune();
        s
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn filter_terms<F: Fn(&Configuration) -> bool>(&self, keep: F) -> PureState {
        PureState {
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, a)| (c.clone(), *a))
                .collect(),
            prune_eps: self.prune_eps,
        }
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, c)?;
        }
        Ok(())
    }
}
