//! Exact evaluation and property verification for the multilinear strong
//! maximal operator on ℤ^d, plus a grid approximation of its continuous
//! counterpart on ℝ^d.

pub mod error;
pub mod lattice;
pub mod engine;
pub mod numerics;
pub mod seed;
pub mod variation;
pub mod continuum;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
pub use engine::{MaximalField, StrongMaxEngine};
pub use lattice::{IntegerBox, LatticeFunction, PrefixSumTable};
