//! Σ through degree N only depends on the inputs through degree N.

use stokes_resum::resummation::{demos, locality_probe, truncation_locality_check};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [4, 8] {
        let euler = demos::euler_inputs(n)?;
        let airy = demos::airy_inputs(n)?;
        println!(
            "N = {n}: perturbing above N leaves Σ unchanged: Euler {}, Airy {}",
            truncation_locality_check(&euler, n, 7)?,
            truncation_locality_check(&airy, n, 7)?,
        );
        println!(
            "N = {n}: perturbing at N leaves Σ unchanged: Euler {}, Airy {}",
            locality_probe(&euler, n, n, 7)?,
            locality_probe(&airy, n, n, 7)?,
        );
    }
    Ok(())
}
