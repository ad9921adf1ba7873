use std::path::PathBuf;

use thiserror::Error;

use crate::arith::Natural;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gcd(0, 0) is undefined")]
    BothZero,

    #[error("inputs must be positive, got ({0}, {1})")]
    ZeroInput(Natural, Natural),

    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(Natural),

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: Natural, m: Natural },

    #[error("theta({a}, {b}) is undefined: b / gcd(a, b) = 1")]
    ThetaUndefined { a: Natural, b: Natural },

    #[error("({a}, {b}) is not a coprime pair; reduce it first")]
    NotCoprime { a: Natural, b: Natural },

    /// Exactly one of the two equations must have exactly one nonnegative
    /// solution. Anything else means the classification premise is false.
    #[error("theorem violation at ({a}, {b}): found {found} solutions, expected exactly 1")]
    TheoremViolation {
        a: Natural,
        b: Natural,
        found: usize,
    },

    #[error(
        "no period dividing {bound} is consistent with the first {window} terms of Gamma({k}, n)"
    )]
    NoPeriod { k: u64, bound: u64, window: u64 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("index {index} is outside the explicit sequence of length {len}")]
    IndexOutOfRange { index: u64, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse {0:?} as a natural number")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
