use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The Gram-matrix norm of a superposition is too small to normalize.
    #[error("degenerate superposition: Gram norm {gram:e} is below 1e-12")]
    DegenerateState { gram: f64 },

    #[error("amplitude parameter too small for {kind}: |alpha|^2 = {alpha2:e} < 1e-6")]
    AmplitudeTooSmall { kind: &'static str, alpha2: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty term list")]
    EmptyState,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A pair-sum probability came out below -1e-10. Indicates a bug, not a physical state.
    #[error("negative probability {value:e} for n = {n}")]
    NegativeProbability { n: usize, value: f64 },

    #[error("total input mean photon number {0:e} is below 1e-12")]
    ZeroEnergy(f64),

    #[error("curve has no interior extremum")]
    NoPeak,

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("Fock cutoff {cutoff} too small: truncated norm {tail:e} exceeds 1e-10")]
    CutoffTooSmall { cutoff: usize, tail: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
