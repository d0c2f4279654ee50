//! Exact second-quantized states over labeled bosonic modes.

pub mod detect;
pub mod mixed;
pub mod mode;
pub mod pure;
pub mod qubit;
pub mod transform;

pub use detect::{
    filter, probability, probability_any, probability_mixed, project, project_any, project_mixed,
    project_mixed_any, Count, DetectionPattern, PathConstraint, Projection,
};
pub use mixed::MixedState;
pub use mode::{oam_bit, oam_from_bit, Configuration, ModeLabel, PathId, Pol, OAM_L, OAM_R};
pub use pure::{PureState, COMPARE_TOL, PRUNE_EPS};
pub use qubit::{
    extract_qubit_pair_density, extract_with_leakage, kron, pauli_pair, Dof, Pauli, PauliOp,
    QubitPairDensity, QubitPairState,
};
pub use transform::{Image, ModeTransform, ISOMETRY_TOL};
