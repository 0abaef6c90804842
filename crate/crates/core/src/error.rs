use thiserror::Error;

/// Errors raised by the physics and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ladder index r = {r} exceeds atom number N = {n_atoms}")]
    LadderOutOfRange { r: usize, n_atoms: usize },

    #[error("detuning must be nonzero for adiabatic elimination")]
    ResonantDetuning,

    #[error("states belong to different sectors (n_exc {left} vs {right})")]
    SectorMismatch { left: usize, right: usize },

    #[error("occupation ({n1}, {n2}, {r}) is not a member of sector n_exc = {n_exc}")]
    NotInSector {
        n1: usize,
        n2: usize,
        r: usize,
        n_exc: usize,
    },

    #[error("nonlinear phase undefined: probe {probe} has amplitude modulus {modulus:e}")]
    PhaseUndefined { probe: String, modulus: f64 },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid occupation: {0}")]
    InvalidOccupation(String),

    #[error("beam splitter block has spectral norm {norm} > 1")]
    UnphysicalBeamSplitter { norm: f64 },

    #[error("{photons} photons requested; linear-optics evolution supports at most {max}")]
    UnsupportedScale { photons: usize, max: usize },

    #[error("distinguishability {0} outside [0, 1]")]
    InvalidDistinguishability(f64),

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("no feasible point found; least infeasible has loss excess {excess:e}")]
    Infeasible {
        excess: f64,
        least_infeasible: Box<crate::dynamics::PulseSequence>,
    },

    #[error("no feasible interferometer found; best NS infidelity {infidelity:e}")]
    NoFeasibleUnitary { infidelity: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
