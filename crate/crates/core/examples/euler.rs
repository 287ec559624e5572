//! The Euler equation `z² f′ = f − z`: its divergent solution `Σ n! z^{n+1}`
//! becomes a convergent series on `Pair_2`.

use num_complex::Complex64;
use stokes_resum::oracle::euler_rho;
use stokes_resum::resummation::demos;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 14;
    let sigma = demos::euler_sigma(n)?;
    let bad = demos::euler_mismatches(&sigma, n);
    println!("Σ through degree {n}: {} mismatches against [[e^μ, ρ], [0, 1]]", bad.len());

    let rho = sigma.psi.get(0, 1);
    println!("first terms of ρ(z, μ):");
    for i in 0..3i64 {
        for j in 0..3i64 {
            println!("  z^{} μ^{}: {}", i + 1, i + j + 1, rho.coeff(&[i + 1, i + j + 1]));
        }
    }

    let deep = demos::euler_sigma(40)?;
    let (z, mu) = (Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0));
    let series = deep.psi.get(0, 1).eval_numeric(&[z, mu]);
    let exact = euler_rho(z, mu)?;
    println!("ρ(0.1, 0.5): series {:.15}, Ei formula {:.15}, diff {:.2e}", series.re, exact.re, (series - exact).norm());
    Ok(())
}
