//! The Schwarzian derivative and the change of projective coordinate.

use stokes_resum::connection::{schwarzian, schwarzian_derivative};
use stokes_resum::{MultiSeries, Scalar, VarSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = vec![VarSpec::regular("z", 10)];
    // g = z + z², a local coordinate change
    let g = MultiSeries::from_terms(vars.clone(), None, [(vec![1], Scalar::from_int(1)), (vec![2], Scalar::from_int(1))])?;
    println!("S(z + z²) = {}", schwarzian_derivative(&g)?);

    // Möbius maps have zero Schwarzian
    let den = MultiSeries::from_terms(vars.clone(), None, [(vec![0], Scalar::from_int(1)), (vec![1], Scalar::from_int(-1))])?;
    let mobius = MultiSeries::monomial(&vars, &[1], Scalar::from_int(1))?.mul(&den.invert()?)?;
    println!("S(z/(1 − z)) = {}", schwarzian_derivative(&mobius)?);

    let q = MultiSeries::constant(vars, Scalar::ratio(1, 4))?;
    println!("q = 1/4 after z ↦ z + z²: {}", schwarzian(&g, &q)?);
    Ok(())
}
