//! Exact arithmetic toolkit for heights, multihomogeneous indices and the
//! explicit constants behind multiplicity bounds for binary recurrences.
//!
//! Every real quantity that is not rational is carried as a
//! [`CertifiedInterval`] with exact rational endpoints. Inequality verdicts
//! are only issued when the enclosures separate; an overlap is reported as
//! such and never rounded into a verdict.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod heights;
pub mod index;
pub mod places;
pub mod recurrence;
pub mod roth;
pub mod subspace;

pub use arith::interval::{certified_compare, CertifiedInterval, Comparison};
pub use arith::quadratic::{Field, FieldElement};
pub use arith::rational::Rational;
pub use error::{Error, Result};

/// Upper bound on the number of solutions carried by every multiplicity
/// report: 2^57.
pub const SOLUTION_COUNT_BOUND_EXPONENT: u32 = 57;
