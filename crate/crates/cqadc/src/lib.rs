//! Exact simulation of classical-message transmission over the qubit
//! amplitude damping channel.
//!
//! The crate evaluates block codes whose codewords are tensor products of
//! qubit states, sent through independent uses of the amplitude damping
//! channel and decoded either symbol-by-symbol (a classical maximum-likelihood
//! decoder acting on per-qubit measurement outcomes) or by a single collective
//! quantum measurement over the whole block. The collective optimum is found
//! numerically and certified against the Holevo–Yuen–Kennedy–Lax optimality
//! conditions, so every reported success probability carries an explicit
//! residual bound.
//!
//! Module map:
//!
//! * [`linalg`] — dense complex matrices, Kronecker products, Hermitian
//!   eigendecomposition, trace norm.
//! * [`channel`] — density operators, Kraus channels, the amplitude damping
//!   family, and Holevo information.
//! * [`codes`] — linear block codes over small finite fields and the named
//!   codes used throughout the test suites.
//! * [`measurement`] — POVMs, maximum-likelihood decoding, the pretty good
//!   measurement, and the certified optimal-discrimination solver.
//! * [`bounds`] — exact ML success probabilities on symmetric classical
//!   channels, finite-blocklength converse and random-coding bounds, and
//!   capacity comparisons.

pub mod bounds;
pub mod channel;
pub mod codes;
pub mod linalg;
pub mod measurement;

pub use bounds::{BoundKind, BoundResult, CapacityPair};
pub use channel::{DensityOperator, Ensemble, KrausChannel};
pub use codes::{Codeword, LinearCode};
pub use linalg::{ComplexMatrix, HermitianSpectrum};
pub use measurement::{DiscriminationResult, Dmc, Povm};

/// Errors shared across the crate.
///
/// The variants deliberately mirror how callers must react: validation and
/// size problems are caller bugs or configuration mistakes, convergence
/// failures report the best certificate achieved so the caller can decide
/// whether it is good enough, and structure failures flag that a symmetry
/// assumed by a downstream reduction does not actually hold.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Inputs violate a documented precondition (dimension mismatch,
    /// non-Hermitian input, invalid probabilities, malformed code, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// The requested problem exceeds a hard size guard and would exhaust
    /// memory or run effectively forever.
    #[error("problem too large: {0}")]
    TooLarge(String),

    /// The iterative measurement solver exhausted its iteration budget
    /// before the optimality certificate reached the requested tolerance.
    #[error(
        "measurement solver stalled at residual {best_residual:.3e} \
         (requested {tol:.3e}, {iterations} iterations)"
    )]
    Convergence {
        /// Requested certificate tolerance.
        tol: f64,
        /// Iterations performed before giving up.
        iterations: usize,
        /// Smallest optimality residual reached.
        best_residual: f64,
    },

    /// A structural symmetry required by a downstream reduction (for
    /// example the symmetric-channel form of an induced transition matrix)
    /// failed its numerical check.
    #[error("structure check failed: {0}")]
    Structure(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used throughout the crate for validation failures.
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
