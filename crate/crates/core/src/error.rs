use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input violates a documented invariant or precondition.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("empty mesh")]
    EmptyMesh,

    #[error("mesh has no interior edges; no RWG unknowns can be built")]
    NoInteriorEdges,

    #[error("unsupported quadrature order {0} (expected 1, 3, 4, 6 or 7)")]
    UnsupportedQuadrature(usize),

    /// Factorization produced a (numerically) singular system.
    #[error("singular impedance matrix (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("evaluation point is {distance:.3e} from the surface (minimum {min:.3e})")]
    TooCloseToSurface { distance: f64, min: f64 },

    #[error("out of supported range: {0}")]
    OutOfRange(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("case {case_id}: {source}")]
    Case {
        case_id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Whether this error originates in the numerical solve (as opposed to input checks).
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::Singular { .. } | Error::TooCloseToSurface { .. } | Error::NoInteriorEdges => true,
            Error::Case { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
