//! Dimension-bounded simplicial machinery for finite homotopy checks.
//!
//! Everything here is explicit and finite: simplicial sets are tables of
//! cells with face and degeneracy maps up to a fixed dimension bound,
//! groupoids are composition tables, and weak n-groupoids are multi-simplicial
//! sets whose axioms are checked exhaustively. All containers iterate in
//! sorted order, so every derived object and report is deterministic.

pub mod corpus;
pub mod edge_path;
pub mod fp;
pub mod groupoid;
pub mod monotone;
pub mod multi;
pub mod ngroupoid;
pub mod report;
pub mod sset;
pub mod verify;

use thiserror::Error;

/// Errors shared by all modules. Checker verdicts are not errors; an error
/// means an operation was asked for data that does not exist (a level above
/// the dimension bound, an unknown cell, mismatched shapes).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: map out of [{left}] composed with map out of [{right}]")]
    RankMismatch { left: usize, right: usize },
    #[error("operation needs {needed}-cells but the dimension bound is {bound}")]
    NeedsLevel { needed: usize, bound: usize },
    #[error("level {level} is not stored (dimension bound {bound})")]
    LevelOutOfBound { level: usize, bound: usize },
    #[error("axis {axis} out of range for arity {arity}")]
    AxisOutOfBound { axis: usize, arity: usize },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("dimension bounds of the two sides differ")]
    BoundsMismatch,
    #[error("the two maps do not share a target")]
    TargetMismatch,
    #[error("unknown cell `{id}` at {place}")]
    UnknownCell { id: String, place: String },
    #[error("unknown object `{id}`")]
    UnknownObject { id: String },
    #[error("ill-formed structure: {detail}")]
    BadStructure { detail: String },
    #[error("induced map is not well defined: {detail}")]
    NotWellDefined { detail: String },
    #[error("input rejected: {detail}")]
    InvalidInput { detail: String },
    #[error("homotopy degree {degree} out of range for an n-groupoid with n = {n}")]
    DegreeOutOfRange { degree: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
