//! Meromorphic connections `d + A(z) z^{-k} dz` on a disc and the operations
//! that move them around: companion systems of scalar operators, pullback and
//! pushforward along `z ↦ zⁿ`, elementary modifications, Schwarzian changes of
//! projective coordinate, and the anti-Stokes directions of the leading term.

mod json;
mod spectral;
mod system;
mod transforms;

pub use json::{OperatorJson, PolyJson, SystemJson};
pub use spectral::{anti_stokes, eigenvalues, AntiStokes, AntiStokesReport, Eigenvalues};
pub use system::{companion, isotropy_leading, MeromorphicSystem, ScalarOperator};
pub use transforms::{
    divisor_calculus, elementary_modification, modification_residual, pullback, pushforward,
    schwarzian, schwarzian_derivative, DivisorData,
};
