//! Exact rationals, quadratic fields and certified interval arithmetic.

pub mod factor;
pub mod factorial;
pub mod interval;
pub mod power;
pub mod quadratic;
pub mod rational;
pub mod transcendental;

pub use factorial::log_factorial_bounds;
pub use transcendental::enclose_log;
