//! claw — an exact symbolic workbench for complex Lie algebroids given in
//! local coordinates.
//!
//! The crate verifies algebroid axioms symbolically over the field ℚ(i) of
//! Gaussian rationals, computes pointwise invariants (real rank, type,
//! class, order, distribution of real elements, minimum subalgebroid) with
//! exact linear algebra, and constructs, verifies and decomposes complex
//! sums of matched pairs of skew-algebroids, including the complex
//! vector-field and complex Poisson special cases.

pub mod algebroid;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod linalg;
pub mod symexpr;

pub use error::{Error, Result};
