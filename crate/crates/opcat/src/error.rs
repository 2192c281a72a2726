//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice axiom violated: {axiom} (witness: {witness})")]
    LatticeAxiom { axiom: String, witness: String },

    #[error("cannot parse {0:?} as a rational \"p/q\"")]
    BadRational(String),

    #[error("bad scalar literal for instance {instance}: {value}")]
    BadScalar { instance: String, value: String },

    #[error("unknown lattice element {0:?}")]
    UnknownLatticeElement(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("semiring instance mismatch: {0} vs {1}")]
    InstanceMismatch(String, String),

    #[error("expected an endomorphism, got {dom} -> {cod}")]
    NotEndomorphism { dom: String, cod: String },

    #[error("state invariant violated: {0}")]
    InvalidState(String),

    #[error("measurement invalid: {0}")]
    InvalidMeasurement(String),

    #[error("transformation is not a dagger-isomorphism")]
    NotDaggerIso,

    #[error("object mismatch: {0} vs {1}")]
    ObjectMismatch(String, String),

    #[error("disjoint cover violated: {0}")]
    CoverViolation(String),

    #[error("operation requires a lattice-like instance, got {0}")]
    NotLatticeInstance(String),

    #[error("base set mismatch: {0} vs {1}")]
    BaseMismatch(String, String),

    #[error("{0} must be nonempty")]
    EmptyInput(&'static str),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("empirical model has non-rational weights: {0}")]
    NonRationalTable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
