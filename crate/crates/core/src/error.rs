use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported scaling family `{0}` (expected haar or db2..db8)")]
    UnsupportedFamily(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("scale J = {j} too small: need 2^J >= {min_len}")]
    ScaleTooSmall { j: u32, min_len: usize },

    #[error("sample frequency {xi} exceeds bandwidth {bandwidth}")]
    BandwidthExceeded { xi: f64, bandwidth: f64 },

    #[error("resolution R = {r} is coarser than scale J = {j}")]
    ResolutionTooCoarse { r: u32, j: u32 },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("dense matrix with {entries} entries exceeds the cap of {cap}")]
    CapExceeded { entries: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classes used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Format,
    Shape,
    Domain,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 2,
            ErrorClass::Format => 3,
            ErrorClass::Shape => 4,
            ErrorClass::Domain => 5,
            ErrorClass::Numerical => 6,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::UnsupportedFamily(_) | Error::Parameter(_) => ErrorClass::Usage,
            Error::Format(_) | Error::Io(_) => ErrorClass::Format,
            Error::Shape { .. } | Error::CapExceeded { .. } => ErrorClass::Shape,
            Error::Precondition(_)
            | Error::Domain(_)
            | Error::DegenerateInput(_)
            | Error::ScaleTooSmall { .. }
            | Error::BandwidthExceeded { .. }
            | Error::ResolutionTooCoarse { .. } => ErrorClass::Domain,
            Error::Numerical(_) => ErrorClass::Numerical,
        }
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Shape { expected, actual })
    }
}
