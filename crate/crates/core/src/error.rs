//! Error types shared across the library.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes the library can report.
///
/// The variants are deliberately coarse: callers (the CLI in particular) map
/// them onto distinct process exit codes, so what matters is the *kind* of
/// failure, with the detail carried in the message.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument violated a precondition (negative squeeze magnitude,
    /// non-finite input, empty grid, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The Fock-space cutoff was exhausted before the tail of the photon
    /// distribution dropped below the requested tolerance.
    #[error(
        "truncation error: tail mass {tail_mass:.3e} at cutoff {cutoff} \
         still exceeds tail_eps {tail_eps:.3e}; raise max_cutoff"
    )]
    Truncation {
        /// Tail-mass estimate achieved at the final cutoff.
        tail_mass: f64,
        /// The cutoff at which the search gave up.
        cutoff: usize,
        /// The requested tail tolerance.
        tail_eps: f64,
    },

    /// A computed quantity left its mathematically valid range by more than
    /// the documented tolerance (eigenvalue below zero, kappa above one, ...).
    #[error("numeric-domain error: {0}")]
    NumericDomain(String),

    /// Two internal code paths that must agree did not.
    #[error("internal consistency error: {0}")]
    Inconsistency(String),
}

impl Error {
    /// Shorthand for a [`Error::Domain`] with a formatted message.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Shorthand for a [`Error::NumericDomain`] with a formatted message.
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericDomain(msg.into())
    }
}
