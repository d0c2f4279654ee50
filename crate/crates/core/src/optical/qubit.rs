//! Single-photon SAM x OAM qubit pairs: states, Pauli algebra, densities.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mixed::MixedState;
use super::mode::{oam_bit, Configuration, ModeLabel, PathId};
use super::pure::PureState;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

/// Leakage weights below this are treated as numerical noise.
pub const LEAKAGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2<Complex64> {
        match self {
            Pauli::I => Matrix2::new(ONE, ZERO, ZERO, ONE),
            Pauli::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Y => Matrix2::new(ZERO, -IM, IM, ZERO),
            Pauli::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

/// Pauli product with its phase: `a * b = phase * c`.
impl Mul for Pauli {
    type Output = (Complex64, Pauli);

    fn mul(self, rhs: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (ONE, p),
            (X, X) | (Y, Y) | (Z, Z) => (ONE, I),
            (X, Y) => (IM, Z),
            (Y, X) => (-IM, Z),
            (Y, Z) => (IM, X),
            (Z, Y) => (-IM, X),
            (Z, X) => (IM, Y),
            (X, Z) => (-IM, Y),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dof {
    Sam,
    Oam,
}

/// A Pauli operator acting on one degree of freedom of a photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOp {
    pub dof: Dof,
    pub axis: Pauli,
}

impl PauliOp {
    pub fn sam(axis: Pauli) -> Self {
        PauliOp { dof: Dof::Sam, axis }
    }

    pub fn oam(axis: Pauli) -> Self {
        PauliOp { dof: Dof::Oam, axis }
    }

    /// The operator embedded in the 4-dim SAM x OAM space.
    pub fn embedded(self) -> Matrix4<Complex64> {
        match self.dof {
            Dof::Sam => kron(&self.axis.matrix(), &Matrix2::identity()),
            Dof::Oam => kron(&Matrix2::identity(), &self.axis.matrix()),
        }
    }

    /// Product of two operators on the same DoF. Returns `None` across DoFs.
    pub fn compose(self, rhs: PauliOp) -> Option<(Complex64, PauliOp)> {
        (self.dof == rhs.dof).then(|| {
            let (ph, axis) = self.axis * rhs.axis;
            (ph, PauliOp { dof: self.dof, axis })
        })
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.dof {
            Dof::Sam => "s",
            Dof::Oam => "o",
        };
        write!(f, "{}{}", self.axis, d)
    }
}

/// Kronecker product of two 2x2 matrices, first factor on the high bit.
pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `sam (x) oam` as a 4x4 matrix.
pub fn pauli_pair(sam: Pauli, oam: Pauli) -> Matrix4<Complex64> {
    kron(&sam.matrix(), &oam.matrix())
}

/// Pure state of one photon's SAM x OAM qubits, amplitudes in the
/// `{|0s0o>, |0s1o>, |1s0o>, |1s1o>}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPairState(pub Vector4<Complex64>);

impl QubitPairState {
    pub fn new(a00: Complex64, a01: Complex64, a10: Complex64, a11: Complex64) -> Self {
        QubitPairState(Vector4::new(a00, a01, a10, a11))
    }

    pub fn basis(index: usize) -> Self {
        let mut v = Vector4::zeros();
        v[index] = ONE;
        QubitPairState(v)
    }

    /// `(|0s0o> + |1s1o>)/sqrt2`.
    pub fn phi_e() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        QubitPairState::new(h, ZERO, ZERO, h)
    }

    /// Haar-random state from normalized complex Gaussians.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v = Vector4::from_fn(|_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        QubitPairState(v.normalize())
    }

    pub fn amplitudes(&self) -> &Vector4<Complex64> {
        &self.0
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.0.norm();
        if n < 1e-12 {
            return Err(Error::ZeroState);
        }
        Ok(QubitPairState(self.0.unscale(n)))
    }

    pub fn inner(&self, other: &QubitPairState) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn overlap_modulus(&self, other: &QubitPairState) -> f64 {
        self.inner(other).norm()
    }

    pub fn transformed(&self, u: &Matrix4<Complex64>) -> QubitPairState {
        QubitPairState(u * self.0)
    }

    /// Single photon on `path` carrying this qubit pair.
    pub fn to_pure(&self, path: PathId) -> PureState {
        PureState::from_terms((0..4).map(|k| {
            (
                Configuration::from_modes([ModeLabel::qubit(path, k / 2, k % 2)]),
                self.0[k],
            )
        }))
    }

    /// Reads back a single-photon state on `path`.
    /// Qubit pair of the photon on `path`. The global phase is kept when that
    /// photon is alone in `state`.
    pub fn from_pure(state: &PureState, path: PathId) -> Result<Self> {
        if state.photon_count() == Some(1) && state.paths().iter().eq([&path]) {
            let v = Vector4::from_fn(|k, _| state.amplitude_of(&[ModeLabel::qubit(path, k / 2, k % 2)]));
            let n = v.norm();
            if (n * n - state.norm_sqr()).abs() < LEAKAGE_TOL && n > 0.0 {
                return Ok(QubitPairState(v / Complex64::new(n, 0.0)));
            }
        }
        let rho = extract_qubit_pair_density(&MixedState::from_pure(state.clone()), path)?;
        let (v, purity) = rho.principal_vector();
        if (purity - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter {
                name: "purity",
                value: purity,
                reason: "state on path is not pure",
            });
        }
        Ok(v)
    }
}

/// 4x4 density matrix of one photon's SAM x OAM qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPairDensity {
    pub rho: Matrix4<Complex64>,
}

impl QubitPairDensity {
    pub fn from_state(s: &QubitPairState) -> Self {
        QubitPairDensity {
            rho: s.0 * s.0.adjoint(),
        }
    }

    pub fn maximally_mixed() -> Self {
        QubitPairDensity {
            rho: Matrix4::identity().scale(0.25).map(|x: Complex64| x),
        }
    }

    /// `(1 - w) * self + w * other`.
    pub fn mixed_with(&self, other: &QubitPairDensity, w: f64) -> Self {
        QubitPairDensity {
            rho: self.rho * Complex64::new(1.0 - w, 0.0) + other.rho * Complex64::new(w, 0.0),
        }
    }

    /// `(1 - w) * self + w * I/4`.
    pub fn depolarized(&self, w: f64) -> Self {
        self.mixed_with(&QubitPairDensity::maximally_mixed(), w)
    }

    pub fn conjugated(&self, u: &Matrix4<Complex64>) -> Self {
        QubitPairDensity {
            rho: u * self.rho * u.adjoint(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn eigenvalues(&self) -> Vector4<f64> {
        self.rho.symmetric_eigenvalues()
    }

    /// Largest-eigenvalue eigenvector and its eigenvalue.
    pub fn principal_vector(&self) -> (QubitPairState, f64) {
        let e = self.rho.symmetric_eigen();
        let k = e.eigenvalues.imax();
        let v: Vector4<Complex64> = e.eigenvectors.column(k).into();
        (QubitPairState(v), e.eigenvalues[k])
    }

    /// Checks Hermiticity, unit trace and positivity to 1e-9.
    pub fn check(&self) -> bool {
        let herm = (self.rho - self.rho.adjoint()).iter().all(|x| x.norm() <= 1e-9);
        let tr = (self.rho.trace() - ONE).norm() <= 1e-9;
        herm && tr && self.eigenvalues().iter().all(|&e| e >= -1e-9)
    }

    /// `<phi|rho|phi>` for a normalized target.
    pub fn fidelity(&self, target: &QubitPairState) -> f64 {
        target.0.dotc(&(self.rho * target.0)).re
    }

    /// `Tr(rho (a (x) b))` for a SAM operator `a` and an OAM operator `b`.
    pub fn pauli_expectation(&self, a: Pauli, b: Pauli) -> f64 {
        (self.rho * pauli_pair(a, b)).trace().re
    }

    /// `(<XX>, <YY>, <ZZ>)`.
    pub fn correlations(&self) -> (f64, f64, f64) {
        (
            self.pauli_expectation(Pauli::X, Pauli::X),
            self.pauli_expectation(Pauli::Y, Pauli::Y),
            self.pauli_expectation(Pauli::Z, Pauli::Z),
        )
    }

    /// Fidelity with `(|0s0o> + |1s1o>)/sqrt2` from Pauli correlations.
    pub fn fidelity_e_from_correlations(&self) -> f64 {
        let (xx, yy, zz) = self.correlations();
        0.25 * (1.0 + xx - yy + zz)
    }
}

/// Reduced density of the photon on `path`, tracing every other photon.
///
/// Fails if any branch has more or fewer than one photon on `path`, or if the
/// photon has weight above [`LEAKAGE_TOL`] outside `l = +1/-1`.
pub fn extract_qubit_pair_density(state: &MixedState, path: PathId) -> Result<QubitPairDensity> {
    let (rho, leak) = extract_with_leakage(state, path)?;
    if leak > LEAKAGE_TOL {
        return Err(Error::LeakageOutsideQubitSpace { path, weight: leak });
    }
    Ok(rho)
}

/// Like [`extract_qubit_pair_density`] but tolerates leakage: the qubit block
/// is renormalized and the leaked weight is returned alongside.
pub fn extract_with_leakage(state: &MixedState, path: PathId) -> Result<(QubitPairDensity, f64)> {
    let mut rho = Matrix4::<Complex64>::zeros();
    let mut leaked = 0.0;
    let mut total = 0.0;
    for (w, s) in state.branches() {
        // Environment key -> amplitudes over the four qubit basis states.
        let mut env: BTreeMap<(Configuration, u16), Vector4<Complex64>> = BTreeMap::new();
        for (cfg, a) in s.terms() {
            let (on, rest) = cfg.split(|m| m.path == path);
            if on.photon_count() != 1 {
                return Err(Error::PhotonCountMismatch {
                    path,
                    found: on.photon_count(),
                });
            }
            let m = on.modes()[0];
            total += w * a.norm_sqr();
            match oam_bit(m.oam) {
                Some(o) => {
                    let k = 2 * m.pol.bit() + o;
                    env.entry((rest, m.wavepacket)).or_insert_with(Vector4::zeros)[k] += a;
                }
                None => leaked += w * a.norm_sqr(),
            }
        }
        for v in env.values() {
            rho += v * v.adjoint() * Complex64::new(*w, 0.0);
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroState);
    }
    let kept = total - leaked;
    if kept <= 1e-15 {
        return Err(Error::LeakageOutsideQubitSpace {
            path,
            weight: leaked / total,
        });
    }
    rho /= Complex64::new(kept, 0.0);
    Ok((QubitPairDensity { rho }, leaked / total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optical::mode::{Pol, OAM_R};

    #[test]
    fn pauli_algebra() {
        assert_eq!(Pauli::X * Pauli::Y, (IM, Pauli::Z));
        assert_eq!(Pauli::Y * Pauli::X, (-IM, Pauli::Z));
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let (ph, c) = a * b;
                let lhs = a.matrix() * b.matrix();
                let rhs = c.matrix() * ph;
                assert!((lhs - rhs).norm() < 1e-15, "{a}{b}");
            }
        }
    }

    #[test]
    fn phi_e_correlations() {
        let rho = QubitPairDensity::from_state(&QubitPairState::phi_e());
        let (xx, yy, zz) = rho.correlations();
        assert!((xx - 1.0).abs() < 1e-12 && (yy + 1.0).abs() < 1e-12 && (zz - 1.0).abs() < 1e-12);
        assert!((rho.fidelity(&QubitPairState::phi_e()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn background_mixing_fidelity() {
        let rho = QubitPairDensity::from_state(&QubitPairState::phi_e()).depolarized(0.15);
        assert!((rho.fidelity(&QubitPairState::phi_e()) - 0.8875).abs() < 1e-12);
        let mm = QubitPairDensity::maximally_mixed();
        assert!((mm.fidelity(&QubitPairState::basis(2)) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn extraction_basics() {
        let s = QubitPairState::basis(0).to_pure(3);
        let rho = extract_qubit_pair_density(&s.clone().into(), 3).unwrap();
        assert!((rho.rho[(0, 0)] - ONE).norm() < 1e-12);
        assert!(rho.check());

        let leaky = PureState::single(ModeLabel::new(3, Pol::H, 0));
        assert!(matches!(
            extract_qubit_pair_density(&leaky.into(), 3),
            Err(Error::LeakageOutsideQubitSpace { .. })
        ));

        let two = PureState::single(ModeLabel::new(3, Pol::H, OAM_R)).create(ModeLabel::new(3, Pol::V, OAM_R));
        assert!(matches!(
            extract_qubit_pair_density(&two.into(), 3),
            Err(Error::PhotonCountMismatch { found: 2, .. })
        ));
    }

    #[test]
    fn equal_mixture_is_diagonal() {
        let m = MixedState::from_branches([
            (0.5, QubitPairState::basis(0).to_pure(3)),
            (0.5, QubitPairState::basis(3).to_pure(3)),
        ])
        .unwrap();
        let rho = extract_qubit_pair_density(&m, 3).unwrap();
        assert!((rho.rho[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((rho.rho[(3, 3)].re - 0.5).abs() < 1e-12);
        assert!(rho.rho[(0, 3)].norm() < 1e-12);
    }
}
