//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building groups, composing elements,
/// or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// Two values built from different group descriptors were combined.
    #[error("group mismatch: cannot combine elements of {left} and {right}")]
    GroupMismatch { left: String, right: String },

    /// A matrix failed the group membership test.
    #[error(
        "matrix is off the {group} manifold: constraint residual {residual:.3e} \
         exceeds the hard limit {limit:.3e}"
    )]
    OffManifold {
        group: String,
        residual: f64,
        limit: f64,
    },

    /// A matrix is not (close to) an element of the Lie algebra.
    #[error(
        "matrix is outside the {group} algebra: projection residual {residual:.3e} \
         exceeds {limit:.3e}"
    )]
    NotInAlgebra {
        group: String,
        residual: f64,
        limit: f64,
    },

    /// A coordinate vector has the wrong length for the algebra.
    #[error("expected {expected} algebra coordinates for {group}, got {got}")]
    CoordinateLength {
        group: String,
        expected: usize,
        got: usize,
    },

    /// Matrix inversion failed.
    #[error("matrix is singular and cannot be inverted")]
    Singular,

    /// A group descriptor failed validation.
    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),

    /// A scenario configuration failed validation.
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),

    /// The short name passed on the command line is not a known group and
    /// not a readable descriptor file.
    #[error("unknown group {0:?}: expected se2, so3, se3, or a path to a descriptor JSON file")]
    UnknownGroup(String),

    /// A state variable stopped being finite during integration.
    #[error("non-finite value at step {step} (t = {t:.6}); reduce dt or check the config")]
    NonFinite { step: usize, t: f64 },

    /// Integration drifted too far off the group manifold.
    #[error(
        "constraint residual {residual:.3e} exceeded the hard limit {limit:.3e} at step {step} \
         (t = {t:.6}); reduce dt or switch to the exp integrator"
    )]
    ConstraintBlowUp {
        step: usize,
        t: f64,
        residual: f64,
        limit: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
