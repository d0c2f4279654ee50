//! Linear mode transforms: creation-operator substitution rules.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::mode::{ModeLabel, PathId, Pol};
use crate::error::{Error, Result};

/// Linear combination of output modes that replaces one input creation operator.
pub type Image = Vec<(ModeLabel, Complex64)>;

type Rule = dyn Fn(ModeLabel) -> Image + Send + Sync;

pub const ISOMETRY_TOL: f64 = 1e-9;

/// Substitution `a_m^dag -> sum_k c_k a_k^dag` for every mode `m` on the
/// domain paths. Modes on other paths pass through untouched.
#[derive(Clone)]
pub struct ModeTransform {
    name: String,
    domain_paths: BTreeSet<PathId>,
    lossy: bool,
    input_paths: Option<BTreeSet<PathId>>,
    rule: Arc<Rule>,
}

impl fmt::Debug for ModeTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModeTransform")
            .field("name", &self.name)
            .field("domain_paths", &self.domain_paths)
            .field("lossy", &self.lossy)
            .finish()
    }
}

impl ModeTransform {
    pub fn new<I, F>(name: impl Into<String>, paths: I, rule: F) -> Self
    where
        I: IntoIterator<Item = PathId>,
        F: Fn(ModeLabel) -> Image + Send + Sync + 'static,
    {
        ModeTransform {
            name: name.into(),
            domain_paths: paths.into_iter().collect(),
            lossy: false,
            input_paths: None,
            rule: Arc::new(rule),
        }
    }

    /// Declares the transform lossy: its images may have norm below one.
    pub fn lossy(mut self) -> Self {
        self.lossy = true;
        self
    }

    /// Declares which paths are external inputs. Composite elements route
    /// photons through internal and output paths that are assumed empty on
    /// entry; structural checks then probe only the inputs.
    pub fn with_inputs<I: IntoIterator<Item = PathId>>(mut self, paths: I) -> Self {
        self.input_paths = Some(paths.into_iter().collect());
        self
    }

    pub fn input_paths(&self) -> &BTreeSet<PathId> {
        self.input_paths.as_ref().unwrap_or(&self.domain_paths)
    }

    pub fn identity() -> Self {
        ModeTransform::new("identity", [], |m| vec![(m, Complex64::new(1.0, 0.0))])
    }

    /// Applies a 2x2 matrix to the polarization of every mode on `path`.
    /// `matrix[out][in]` with index 0 = H, 1 = V.
    pub fn polarization(name: impl Into<String>, path: PathId, matrix: [[Complex64; 2]; 2]) -> Self {
        ModeTransform::new(name, [path], move |m| {
            let col = m.pol.bit();
            [Pol::H, Pol::V]
                .into_iter()
                .map(|p| (m.with_pol(p), matrix[p.bit()][col]))
                .collect()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_paths(&self) -> &BTreeSet<PathId> {
        &self.domain_paths
    }

    pub fn is_lossy(&self) -> bool {
        self.lossy
    }

    pub fn acts_on(&self, mode: &ModeLabel) -> bool {
        self.domain_paths.contains(&mode.path)
    }

    /// Image of one creation operator.
    pub fn image(&self, mode: ModeLabel) -> Image {
        if self.acts_on(&mode) {
            prune((self.rule)(mode))
        } else {
            vec![(mode, Complex64::new(1.0, 0.0))]
        }
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn then(&self, next: &ModeTransform) -> ModeTransform {
        let first = self.clone();
        let second = next.clone();
        let paths: BTreeSet<PathId> = self
            .domain_paths
            .union(&next.domain_paths)
            .copied()
            .collect();
        let name = format!("{} -> {}", self.name, next.name);
        let lossy = self.lossy || next.lossy;
        let mut t = ModeTransform::new(name, paths, move |m| {
            let mut out: Image = Vec::new();
            for (mid, c) in first.image(m) {
                for (o, d) in second.image(mid) {
                    accumulate(&mut out, o, c * d);
                }
            }
            out
        });
        t.lossy = lossy;
        t
    }

    /// Composes a sequence of transforms left to right.
    pub fn chain<'a, I: IntoIterator<Item = &'a ModeTransform>>(name: &str, parts: I) -> Self {
        let mut acc = ModeTransform::identity();
        for p in parts {
            acc = acc.then(p);
        }
        acc.name = name.to_string();
        acc
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Gram matrix of the images of `modes`: `G_ij = <image_i | image_j>`.
    pub fn gram(&self, modes: &[ModeLabel]) -> DMatrix<Complex64> {
        let images: Vec<Image> = modes.iter().map(|m| self.image(*m)).collect();
        DMatrix::from_fn(modes.len(), modes.len(), |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (mi, ci) in &images[i] {
                for (mj, cj) in &images[j] {
                    if mi == mj {
                        acc += ci.conj() * cj;
                    }
                }
            }
            acc
        })
    }

    /// Checks the isometry (or, when lossy, contraction) property on `modes`.
    /// Returns the largest deviation found.
    pub fn check_isometry(&self, modes: &[ModeLabel]) -> Result<f64> {
        let mut modes: Vec<ModeLabel> = modes.iter().copied().filter(|m| self.acts_on(m)).collect();
        modes.sort_unstable();
        modes.dedup();
        if modes.is_empty() {
            return Ok(0.0);
        }
        let g = self.gram(&modes);
        let deviation = if self.lossy {
            let eig = g.clone().symmetric_eigenvalues();
            eig.iter().fold(0.0_f64, |acc, &e| acc.max(e - 1.0))
        } else {
            let n = modes.len();
            let mut worst = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
                }
            }
            worst
        };
        if deviation > ISOMETRY_TOL {
            Err(Error::NonUnitaryTransform {
                name: self.name.clone(),
                deviation,
            })
        } else {
            Ok(deviation)
        }
    }

    /// Probe set used for structural checks: every input path with both
    /// polarizations, `l` in -2..=2 and two wavepackets.
    pub fn probe_modes(&self) -> Vec<ModeLabel> {
        let mut out = Vec::new();
        for &path in self.input_paths() {
            for pol in [Pol::H, Pol::V] {
                for oam in -2..=2 {
                    for wp in 0..2 {
                        out.push(ModeLabel::new(path, pol, oam).with_wavepacket(wp));
                    }
                }
            }
        }
        out
    }

    /// Singular values of the image matrix restricted to the probe set.
    pub fn probe_singular_values(&self) -> Vec<f64> {
        let g = self.gram(&self.probe_modes());
        g.symmetric_eigenvalues()
            .iter()
            .map(|e| e.max(0.0).sqrt())
            .collect()
    }
}

pub(crate) fn accumulate(out: &mut Image, mode: ModeLabel, c: Complex64) {
    match out.iter_mut().find(|(m, _)| *m == mode) {
        Some((_, acc)) => *acc += c,
        None => out.push((mode, c)),
    }
}

fn prune(image: Image) -> Image {
    let mut out: Image = Vec::with_capacity(image.len());
    for (m, c) in image {
        accumulate(&mut out, m, c);
    }
    out.retain(|(_, c)| c.norm() >= 1e-14);
    out
}
