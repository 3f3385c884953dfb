use thiserror::Error;

/// Errors raised by the potential, analysis and eigensolver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("field singularity at {0}")]
    Singularity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no interior minimum found in the search box")]
    NoTrap,

    #[error("not a minimum: {0}")]
    NotAMinimum(String),

    #[error("no tunneling barrier between the minimum and the surface")]
    ImmediateLoss,

    #[error("scattering rate is only defined for evanescent-wave mirrors")]
    UnsupportedMirror,

    #[error("wavefunction leaks to the grid boundary (relative amplitude {amplitude:.3e}); enlarge the grid to at least {suggested}")]
    GridLeak { amplitude: f64, suggested: String },

    #[error("numerical failure: {0}")]
    Numerics(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
