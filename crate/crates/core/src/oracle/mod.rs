//! Independent numerics: parallel transport and special functions.

pub mod cmat;
pub mod special;
pub mod transport;

pub use cmat::CMat;
pub use special::{airy_values, airy_wronskian, euler_rho, expint_ei, AiryValues};
pub use transport::{transport, PathSpec, TransportResult};
