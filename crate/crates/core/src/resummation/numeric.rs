use num_complex::Complex64;

use crate::error::ResumError;
use crate::groupoid::{GroupoidChart, GroupoidPoint};
use crate::oracle::cmat::{self, CMat};

/// `ψ(t(g))·ψ(s(g))⁻¹` from a fundamental-solution evaluator `fund`.
///
/// Branches are the evaluator's business; it should be continuous along
/// the path from `s(g)` to `t(g)` so that `u = 0` gives the identity.
pub fn delta_psi_numeric<F, E>(fund: F, chart: &GroupoidChart, g: &GroupoidPoint) -> Result<CMat, ResumError>
where
    F: Fn(Complex64) -> Result<CMat, E>,
    E: std::fmt::Display,
{
    let eval = |z: Complex64| fund(z).map_err(|e| ResumError::Evaluator(e.to_string()));
    let s = eval(g.z)?;
    let t = eval(chart.target(g))?;
    let inv = cmat::inverse(&s).ok_or_else(|| ResumError::Evaluator(format!("ψ({}) is singular", g.z)))?;
    Ok(cmat::mul(&t, &inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_sto() {
        // ψ = z^{-1} on Sto_1 gives e^{-u}
        let chart = GroupoidChart::sto(1);
        let g = chart.point(Complex64::new(0.7, 0.2), Complex64::new(0.3, -0.1)).unwrap();
        let m = delta_psi_numeric(|z| Ok::<_, String>(vec![vec![z.inv()]]), &chart, &g).unwrap();
        assert!((m[0][0] - (-g.u).exp()).norm() < 1e-14);
        let id = chart.identity(Complex64::new(0.5, 0.0));
        let m = delta_psi_numeric(|z| Ok::<_, String>(vec![vec![z.inv()]]), &chart, &id).unwrap();
        assert!((m[0][0] - 1.0).norm() < 1e-15);
    }
}
