//! Crate-wide error type. Hypothesis failures (a symmetry admitting no
//! invariant fields / no first integral) are distinguished from operational
//! errors so callers can surface them as meaningful negative results.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("input point or value is not finite")]
    NonFiniteInput,

    #[error("unsupported symmetry direction '{0}': supported are coordinate axes e1/e2/e3, nonzero integer vectors, and the fixed irrational direction (1,\u{221a}2,\u{221a}6)")]
    UnsupportedDirection(String),

    #[error("hypothesis failure: the symmetric divergence-free subspace is empty at truncation N={n}; no symmetry-obeying curl eigenfield exists in this band")]
    NoSymmetricFields { n: usize },

    #[error("hypothesis failure: the symmetry admits no nonconstant band-limited first integral at truncation N={n}")]
    NoFirstIntegral { n: usize },

    #[error("catalog entry '{0}' is not a constant-curl Killing field; the quadratic eigenvalue construction does not apply")]
    NotBeltramiKilling(String),

    #[error("scalar eigenfunction is constant; the construction degenerates")]
    DegenerateScalar,

    #[error("eigenvalue must be nonzero")]
    ZeroEigenvalue,

    #[error("field vanished along the trajectory near {location:?} (step underflow at t={t:.6})")]
    StalledAtZero { t: f64, location: [f64; 3] },

    #[error("spectral precondition violated: {0}")]
    SpectralPrecondition(String),

    #[error("grid resolution {m} per axis is below the {min} required for an exact band-limited round-trip")]
    GridTooCoarse { m: usize, min: usize },

    #[error("unknown catalog entry '{0}'")]
    UnknownCatalogEntry(String),

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for the mathematically meaningful negative results (the CLI maps
    /// these to exit code 2 rather than 1).
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(self, Error::NoSymmetricFields { .. } | Error::NoFirstIntegral { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
