//! Formal gauges, closed-form model representations, and the resummation
//! operator `Σ(Ψ̂₁, φ̂) = t*φ̂ · Ψ̂₁ · (s*φ̂)⁻¹`.

pub mod demos;
pub mod gauge;
pub mod model;
pub mod numeric;
pub mod rep;
pub mod resum;

pub use crate::groupoid::descends_to_pair;
pub use gauge::{airy_gauge, airy_l, airy_m, gauge_residual, solve_formal_gauge, FormalGauge};
pub use model::{model_rep, ExponentialModel, ModelEntry, ModelJson};
pub use numeric::delta_psi_numeric;
pub use rep::{Coordinates, GroupoidRepresentation};
pub use resum::{locality_probe, required_degree, resum, truncation_locality_check, PreGauge, ResumInputs};
