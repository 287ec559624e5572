//! Exact truncated Laurent series in up to four variables.

pub mod json;
pub mod linalg;
pub mod matrix;
pub mod multi;
pub mod scalar;

pub use linalg::DMat;
pub use matrix::MatSeries;
pub use multi::{binomial, factorial, Mono, MultiSeries, VarSpec, MAX_VARS, UNBOUNDED};
pub use scalar::Scalar;
