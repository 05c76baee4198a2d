//! Distance geometry driven entirely by a world function σ = ½ρ².
//!
//! The crate classifies finite point sets through the Gram-determinant series
//! `F_n`, evaluates scalar products of multivectors, builds tubes (the
//! σ-defined counterparts of lines and planes), tests whether a σ-space has
//! Euclidean structure and reconstructs the intrinsic metric of a sphere from
//! the Euclidean geometry of the ball.

// symmetric-matrix code reads best with explicit (i, j) indices
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod euclid;
pub mod gram;
pub mod io;
pub mod linalg;
pub mod sigma;
pub mod sphere;
pub mod subsets;
pub mod tolerance;
pub mod tube;

pub use error::{Error, Result};
pub use sigma::{
    extract_finite_subspace, make_world_function, DomainInput, FiniteSigmaSpace, GeneratorKind,
    GeneratorSpec, PointId, ValueKind, WorldFunction,
};
pub use tolerance::TolerancePolicy;
