use std::fmt;

use serde::{Deserialize, Serialize};

/// Path identifier of a spatial mode.
pub type PathId = u16;

/// OAM value of the qubit state `|0>o` (right-handed, +hbar).
pub const OAM_R: i16 = 1;
/// OAM value of the qubit state `|1>o` (left-handed, -hbar).
pub const OAM_L: i16 = -1;

/// Polarization. `H` is the SAM qubit state `|0>s`, `V` is `|1>s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub fn bit(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Pol::H
        } else {
            Pol::V
        }
    }
}

/// Maps an OAM value to its qubit bit, if it lies in the first-order subspace.
pub fn oam_bit(oam: i16) -> Option<usize> {
    match oam {
        OAM_R => Some(0),
        OAM_L => Some(1),
        _ => None,
    }
}

pub fn oam_from_bit(bit: usize) -> i16 {
    if bit == 0 {
        OAM_R
    } else {
        OAM_L
    }
}

/// One bosonic mode. Ordering is lexicographic on (path, pol, oam, wavepacket).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub path: PathId,
    pub pol: Pol,
    pub oam: i16,
    /// Temporal mode; 0 is the reference wavepacket.
    pub wavepacket: u16,
}

impl ModeLabel {
    pub const fn new(path: PathId, pol: Pol, oam: i16) -> Self {
        ModeLabel {
            path,
            pol,
            oam,
            wavepacket: 0,
        }
    }

    /// Mode of the SAM/OAM qubit basis state `|s>s |o>o` on `path`.
    pub fn qubit(path: PathId, sam: usize, oam: usize) -> Self {
        ModeLabel::new(path, Pol::from_bit(sam), oam_from_bit(oam))
    }

    pub fn with_path(self, path: PathId) -> Self {
        ModeLabel { path, ..self }
    }

    pub fn with_pol(self, pol: Pol) -> Self {
        ModeLabel { pol, ..self }
    }

    pub fn with_oam(self, oam: i16) -> Self {
        ModeLabel { oam, ..self }
    }

    pub fn with_wavepacket(self, wavepacket: u16) -> Self {
        ModeLabel { wavepacket, ..self }
    }

    pub fn flipped_oam(self) -> Self {
        ModeLabel {
            oam: -self.oam,
            ..self
        }
    }

    /// Index into the `{|0s0o>, |0s1o>, |1s0o>, |1s1o>}` basis.
    pub fn qubit_index(&self) -> Option<usize> {
        oam_bit(self.oam).map(|o| 2 * self.pol.bit() + o)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}:{:+}", self.path, self.pol, self.oam)?;
        if self.wavepacket != 0 {
            write!(f, "~{}", self.wavepacket)?;
        }
        Ok(())
    }
}

/// Occupation-number basis state: a sorted multiset of modes.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration(Vec<ModeLabel>);

impl Configuration {
    pub fn vacuum() -> Self {
        Configuration(Vec::new())
    }

    pub fn from_modes<I: IntoIterator<Item = ModeLabel>>(modes: I) -> Self {
        let mut v: Vec<ModeLabel> = modes.into_iter().collect();
        v.sort_unstable();
        Configuration(v)
    }

    pub fn photon_count(&self) -> usize {
        self.0.len()
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.0
    }

    /// Occupation of a single mode.
    pub fn occupation(&self, mode: &ModeLabel) -> usize {
        let lo = self.0.partition_point(|m| m < mode);
        let hi = self.0.partition_point(|m| m <= mode);
        hi - lo
    }

    /// Distinct modes with their occupation numbers, in canonical order.
    pub fn occupations(&self) -> Vec<(ModeLabel, usize)> {
        let mut out: Vec<(ModeLabel, usize)> = Vec::new();
        for m in &self.0 {
            match out.last_mut() {
                Some((last, n)) if last == m => *n += 1,
                _ => out.push((*m, 1)),
            }
        }
        out
    }

    pub fn count_on_path(&self, path: PathId) -> usize {
        self.0.iter().filter(|m| m.path == path).count()
    }

    /// `prod_k n_k!` over distinct modes.
    pub fn factorial_weight(&self) -> f64 {
        self.occupations()
            .iter()
            .map(|&(_, n)| (1..=n).map(|k| k as f64).product::<f64>())
            .product()
    }

    /// Adds one photon in `mode`, returning the new configuration.
    pub fn with(&self, mode: ModeLabel) -> Self {
        let mut v = self.0.clone();
        let at = v.partition_point(|m| *m <= mode);
        v.insert(at, mode);
        Configuration(v)
    }

    /// Splits photons into those satisfying `pred` and the rest.
    pub fn split<F: Fn(&ModeLabel) -> bool>(&self, pred: F) -> (Configuration, Configuration) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|m| pred(m));
        (Configuration(a), Configuration(b))
    }

    /// Multiset union.
    pub fn union(&self, other: &Configuration) -> Self {
        Configuration::from_modes(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "|vac>");
        }
        write!(f, "|")?;
        for (i, (m, n)) in self.occupations().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if *n > 1 {
                write!(f, "{n}x")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ">")
    }
}
