use thiserror::Error;

use crate::sigma::PointId;

/// Errors produced while building or querying σ-spaces.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("table is not symmetric at ({i}, {j}): {a} != {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("diagonal entry ({i}, {i}) is {value}, expected 0")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("non-finite value {value} at ({i}, {j})")]
    NonFinite { i: usize, j: usize, value: f64 },
    #[error("coordinate row {row} has length {len}, expected dimension {dimension}")]
    DimensionMismatch {
        row: usize,
        len: usize,
        dimension: usize,
    },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("point {point} is outside the domain of {len} points")]
    PointOutOfRange { point: PointId, len: usize },
    #[error("point list is empty")]
    EmptyPointList,
    #[error("multivector order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("multivectors must share their origin: {left} vs {right}")]
    OriginMismatch { left: PointId, right: PointId },
    #[error("anchor {0} is not a point of the multivector")]
    AnchorNotInMultivector(PointId),
    #[error("multivector needs at least {required} points, got {got}")]
    TooFewPoints { required: usize, got: usize },
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("degenerate basis: F_{order} = {value} vanishes under tolerance")]
    DegenerateBasis { order: usize, value: f64 },
    #[error("indefinite world function: sigma({p}, {q}) = {value} < 0")]
    IndefiniteSigma { p: PointId, q: PointId, value: f64 },
    #[error("first-order tube undefined: S_+ vanishes")]
    UndefinedTube,
    #[error("point {0} is not a member of the tube")]
    NotATubeMember(PointId),
    #[error("points are collinear; the circle through them is undefined")]
    CollinearPoints,
    #[error("branch switch at tau = {tau} breaks curve continuity")]
    BranchSwitch { tau: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
