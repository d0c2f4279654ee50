use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Every amplitude vanished, usually because a post-selection rejected the whole state.
    #[error("state has zero norm")]
    ZeroState,

    #[error("transform `{name}` is not an isometry on the occupied modes (deviation {deviation:.3e})")]
    NonUnitaryTransform { name: String, deviation: f64 },

    #[error("path {path} carries weight {weight:.3e} outside the l = +1/-1 qubit subspace")]
    LeakageOutsideQubitSpace { path: u16, weight: f64 },

    #[error("expected exactly one photon on path {path}, found {found}")]
    PhotonCountMismatch { path: u16, found: usize },

    #[error("SPDC truncation order {0} is not supported (maximum 2)")]
    TruncationTooHigh(usize),

    #[error("duplicate path {0} in detection pattern")]
    DuplicatePath(u16),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("symbolic and amplitude-level cascades disagree on {label} at stage {stage}")]
    Mismatch { label: String, stage: usize },

    #[error("cascade too large: N = {0} (supported range 1..=8)")]
    CascadeTooLarge(usize),
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
