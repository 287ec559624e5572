//! Resummation of divergent formal solutions of meromorphic linear ODEs.
//!
//! A divergent formal gauge transformation `φ̂` between a system and an
//! exponential model becomes a convergent two-variable series once it is
//! transported to a Stokes groupoid:
//!
//! ```text
//! Σ = t*(φ̂) · Ψ₁ · (s*(φ̂))⁻¹
//! ```
//!
//! where `Ψ₁` is the model's groupoid representation and `s`, `t` are the
//! source and target maps of the chart. Everything symbolic happens in exact
//! Gaussian-rational arithmetic ([`series`]); the [`oracle`] module provides
//! independent numerics (parallel transport, Airy functions, `Ei`).
//!
//! ```
//! use stokes_resum::resummation::demos;
//!
//! let sigma = demos::euler_sigma(6).unwrap();
//! // coefficient of z μ in the off-diagonal entry
//! assert_eq!(sigma.psi.get(0, 1).coeff(&[1, 1]).to_string(), "-1");
//! ```

pub mod cli;
pub mod connection;
pub mod error;
pub mod groupoid;
pub mod oracle;
pub mod resummation;
pub mod series;

pub use error::{Error, Result};
pub use series::{MatSeries, MultiSeries, Scalar, VarSpec};
