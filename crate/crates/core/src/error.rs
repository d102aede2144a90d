//! Crate-wide error type.
//!
//! Most operations are total on valid inputs; errors signal either misuse of
//! an interface (unknown item, bad position) or a detected violation of an
//! internal invariant that should never hold on a correct build. Invariant
//! errors are detection points, not recoverable conditions.

use std::error::Error as StdError;
use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An item was referenced that is not present in the list or universe.
    UnknownItem(String),
    /// An item occurs twice where items must be distinct.
    DuplicateItem(String),
    /// A list position outside `1..=len` was requested.
    PositionOutOfRange { position: usize, len: usize },
    /// Two lists that must hold the same item set do not.
    UniverseMismatch,
    /// A request sequence violates its own rules (bad label, re-insert,
    /// access to an absent item, ...). Step is 0-based into the event list;
    /// parse errors report the 1-based source line instead.
    InvalidSequence { at: usize, reason: String },
    /// A pair work function left the reachable set (gap outside -1..=1).
    CorruptWorkFunction { w_xy: u64, w_yx: u64 },
    /// Potential parameters failed a required inequality.
    ConstraintViolation(String),
    /// An internal invariant did not hold (forbidden pair state, transition
    /// outside the allowed tables, accounting identity broken).
    InvariantViolation(String),
    /// A replayed trace diverged from its expected values.
    TraceMismatch { step: usize, expected: String, actual: String },
    /// A state-space build exceeded its configured cap.
    StateSpaceExceeded { states: usize, cap: usize },
    /// Potential extraction found a vertex with no tight outgoing edge.
    NoTightEdge { vertex: usize },
    /// The requested combination of options is not supported.
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownItem(label) => write!(f, "unknown item `{label}`"),
            Error::DuplicateItem(label) => write!(f, "duplicate item `{label}`"),
            Error::PositionOutOfRange { position, len } => {
                write!(f, "position {position} out of range for list of length {len}")
            }
            Error::UniverseMismatch => write!(f, "lists do not hold the same item set"),
            Error::InvalidSequence { at, reason } => {
                write!(f, "invalid sequence at {at}: {reason}")
            }
            Error::CorruptWorkFunction { w_xy, w_yx } => {
                write!(f, "pair work function out of range: ({w_xy}, {w_yx})")
            }
            Error::ConstraintViolation(what) => write!(f, "parameter constraint failed: {what}"),
            Error::InvariantViolation(what) => write!(f, "invariant violation: {what}"),
            Error::TraceMismatch { step, expected, actual } => {
                write!(f, "trace mismatch at step {step}: expected {expected}, got {actual}")
            }
            Error::StateSpaceExceeded { states, cap } => {
                write!(f, "state space exceeded: {states} states over cap {cap}")
            }
            Error::NoTightEdge { vertex } => {
                write!(f, "no tight edge out of algorithm vertex {vertex}")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

impl StdError for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
