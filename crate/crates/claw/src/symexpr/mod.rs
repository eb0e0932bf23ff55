//! Exact arithmetic, differentiation, evaluation and decidable zero-testing
//! for multivariate rational functions with Gaussian-rational coefficients.
//!
//! Everything downstream (brackets, axiom checks, pointwise invariants)
//! reduces to identities between such functions, and canonical forms make
//! those identities decidable: an expression is the zero function iff its
//! canonical numerator is the zero polynomial.

mod chart;
mod gaussian;
mod parser;
pub mod poly;

pub mod expr;

pub use chart::{Chart, Point};
pub use expr::RationalExpr;
pub use gaussian::GaussianRational;
pub use parser::parse_expr;
