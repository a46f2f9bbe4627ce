use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are grouped so front ends can map them onto distinct exit
/// codes: malformed input, infeasible instances, numerical trouble and
/// enumeration limits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("negative weight: {0}")]
    NegativeWeight(String),

    #[error("not a planar embedding: {0}")]
    NotPlanar(String),

    #[error("graph is disconnected ({0} components); orient components separately")]
    Disconnected(usize),

    #[error("symmetric part of kernel is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("conditioning outside support")]
    ConditioningOutsideSupport,

    #[error("empty support")]
    EmptySupport,

    #[error("state outside support")]
    OutsideSupport,

    #[error("reference set unreachable: conditional marginal of element {element} estimated as zero at level {level}")]
    ReferenceUnreachable { level: usize, element: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("too large to enumerate: {0}")]
    TooLarge(String),

    #[error("non-real spectrum: imaginary part {0:e}")]
    NonRealSpectrum(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
