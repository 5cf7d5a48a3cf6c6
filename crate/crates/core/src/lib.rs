//! Exact construction and numeric verification of second-order PDEs for
//! hypersurface graphs that are invariant under the Euclidean motion group
//! `SE(n+1)` or the Möbius group `SO(1, n+2)`.

pub mod error;
pub mod expr;
pub mod jet;
pub mod series;
pub mod invariant;
pub mod euclidean;
pub mod conformal;
pub mod harness;
pub mod cli;

pub use error::{Error, Result};

/// Arbitrary-precision rational numbers, always in lowest terms.
pub type Rational = num_rational::BigRational;
