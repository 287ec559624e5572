//! Numeric parallel transport of the Airy system, compared with the
//! Airy functions themselves.

use num_complex::Complex64;
use stokes_resum::oracle::{cmat, transport, PathSpec};
use stokes_resum::resummation::demos;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = demos::airy_system();
    let (s, t) = (Complex64::new(0.2, 0.0), Complex64::new(0.25, 0.1));
    let path = PathSpec::segment(s, t)?;
    let res = transport(&sys, &path, 1e-12)?;
    let fs = demos::airy_fundamental(s)?;
    let ft = demos::airy_fundamental(t)?;
    let expected = cmat::mul(&ft, &cmat::inverse(&fs).expect("invertible"));
    println!("{} steps, error estimate {:.1e}", res.steps, res.error_estimate);
    println!("relative difference from ψ(t)ψ(s)⁻¹: {:.2e}", cmat::rel_diff(&res.matrix, &expected));

    // around the pole and back: the monodromy of a system with an entire solution is trivial
    let square = PathSpec::parse("1,0; 0,1; -1,0; 0,-1; 1,0", 1e-2)?;
    let loop_ = transport(&sys, &square, 1e-12)?;
    println!("loop around 0 differs from the identity by {:.2e}", cmat::max_abs_diff(&loop_.matrix, &cmat::identity(2)));
    Ok(())
}
