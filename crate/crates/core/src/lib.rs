//! Profile decompositions of bounded sequences in Lᵖ and ℓᵖ under dyadic
//! dislocations, with numerical tools for weak and Δ-type limits.

// `!(x >= y)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod convergence;
pub mod corpus;
pub mod decomposition;
pub mod dislocation;
pub mod error;
pub mod inequalities;
pub mod modulus;
pub mod seq;
pub mod space;

#[cfg(test)]
mod cli_tests;
#[cfg(test)]
mod property_tests;

pub use dislocation::{Dislocation, DislocationPath, SearchGrid};
pub use error::{Error, Result};
pub use seq::Seq;
pub use space::{DualElement, Element, Geometry, Space};
