//! Airy's equation at infinity: the resummed representation on `Pair_3`
//! against the displayed degree-6 matrix and against `Ai`, `Bi`.

use num_complex::Complex64;
use stokes_resum::groupoid::GroupoidChart;
use stokes_resum::oracle::cmat;
use stokes_resum::resummation::{delta_psi_numeric, demos};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let low = demos::airy_sigma(6)?;
    let exact = low.truncated(6)?.psi.agrees_with(&demos::airy_expected())?;
    println!("degree-6 matrix matches: {exact}");
    for i in 0..2 {
        for j in 0..2 {
            println!("  ({}, {}): {}", i + 1, j + 1, low.psi.get(i, j));
        }
    }

    let sigma = demos::airy_sigma(30)?;
    let chart = GroupoidChart::pair(3);
    let (z, u) = (Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.0));
    let g = chart.point(z, u)?;
    let numeric = delta_psi_numeric(demos::airy_fundamental, &chart, &g)?;
    let series = sigma.psi.eval_numeric(&[z, u]);
    println!("degree 30 at (z, u) = (0.2, 0.1): relative error {:.2e}", cmat::rel_diff(&series, &numeric));
    Ok(())
}
