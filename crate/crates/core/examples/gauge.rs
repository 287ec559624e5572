//! Solving for the formal gauge between a system and its exponential model.

use stokes_resum::resummation::{demos, solve_formal_gauge, ExponentialModel, ModelEntry};
use stokes_resum::Scalar;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = solve_formal_gauge(&ExponentialModel::euler(), &demos::euler_system(), 12)?;
    println!("Euler gauge, off-diagonal entry: {}", g.phi().get(0, 1));
    let zero = g.residual()?.entries().iter().all(|e| e.is_zero());
    println!("z²φ′ − φA₁ + A₂φ vanishes through degree 12: {zero}");

    // wrong model: the leading terms cannot be matched
    let flipped = ModelEntry { a: Scalar::from_int(0), q: vec![(1, Scalar::from_int(-1))] };
    let wrong = ExponentialModel::new(2, 1, vec![flipped, ModelEntry::residue(Scalar::from_int(0))])?;
    println!("with e^{{+1/z}} instead: {}", solve_formal_gauge(&wrong, &demos::euler_system(), 4).unwrap_err());
    Ok(())
}
