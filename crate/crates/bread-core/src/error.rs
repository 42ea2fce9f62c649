//! Error type shared across the crate.
//!
//! The split that matters downstream is between *verdict-like* conditions
//! (a lemma check that fails is not an error — it is a result) and genuine
//! inability to compute: a sequence prefix that is too short, a window too
//! large to materialize, a defining sum that diverges.  Only the latter show
//! up here.

use thiserror::Error;

use crate::numeric::Rational;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("square root of a negative quantity: {0}")]
    NegativeSqrt(Rational),

    #[error("sequence too short: entry a_{needed} required, only {have} provided")]
    SequenceTooShort { needed: u64, have: usize },

    #[error("sequence entry a_{index} is not materialized as an exact integer")]
    NotMaterialized { index: u64 },

    #[error("sequence entry a_{index} does not fit in a machine word")]
    EntryTooLarge { index: u64 },

    #[error("invalid growth sequence: {0}")]
    InvalidSequence(String),

    #[error("stage {n} is degenerate: window dimension {d} leaves no usable functional")]
    DegenerateStage { n: usize, d: u64 },

    #[error("index {k} at stage {n} admits two distinct exponent decompositions")]
    AmbiguousIndex { n: usize, k: String },

    #[error("generator `{name}` has window radius ≥ 1 at stage {n}; the defining sum diverges")]
    Divergent { name: String, n: usize },

    #[error("gamma index {k} is outside the window basis (dimension {d}); use the extended evaluation")]
    GammaIndexOutOfRange { k: u64, d: u64 },

    #[error("matrix is singular; the linear system has no unique solution")]
    SingularMatrix,

    #[error("decomposition does not reproduce the element; certificate rejected")]
    CertificateMismatch,

    #[error("resource limit exceeded: {0}")]
    ResourceExceeded(String),

    #[error("contour passes through the eigenvalue {0}")]
    ContourOnSpectrum(Rational),

    #[error("{0} is an eigenvalue of the truncated model; the distance probe is vacuous")]
    ProbeAtEigenvalue(Rational),
}

pub type Result<T> = std::result::Result<T, Error>;
