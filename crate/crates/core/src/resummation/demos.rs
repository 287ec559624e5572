//! The Euler and Airy examples, with their closed forms.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::connection::MeromorphicSystem;
use crate::error::{OracleError, ResumError};
use crate::groupoid::GroupoidChart;
use crate::oracle::{airy_values, CMat};
use crate::series::{factorial, MatSeries, MultiSeries, Scalar, VarSpec};

use super::gauge::{airy_gauge, solve_formal_gauge};
use super::model::ExponentialModel;
use super::rep::{Coordinates, GroupoidRepresentation};
use super::resum::{required_degree, PreGauge, ResumInputs};

type Res<T> = Result<T, ResumError>;

fn poly(t: &[(i64, i64)]) -> Vec<(i64, Scalar)> {
    t.iter().map(|&(e, c)| (e, Scalar::from_int(c))).collect()
}

/// `d + [[-1, z], [0, 0]] z^{-2} dz`, solved by `(e^{-1/z} f, 1)` with
/// `z² f′ = f − z`.
pub fn euler_system() -> MeromorphicSystem {
    MeromorphicSystem::from_polys("z", 1, 2, &[vec![poly(&[(0, -1)]), poly(&[(1, 1)])], vec![vec![], vec![]]])
        .expect("valid system")
}

/// Solved gauge, Euler model and `Pair_2` in `(z, μ)`, ready for degree `n`.
pub fn euler_inputs(n: i64) -> Res<ResumInputs> {
    let model = ExponentialModel::euler();
    let gauge = solve_formal_gauge(&model, &euler_system(), n)?;
    Ok(ResumInputs { gauge, model, chart: GroupoidChart::pair(2), pre_gauge: None, coords: Coordinates::Mu })
}

/// Resummed Euler representation in `(z, μ)` through total degree `n`.
pub fn euler_sigma(n: i64) -> Res<GroupoidRepresentation> {
    euler_inputs(n)?.run(n)
}

/// Coefficient of `z^{i+1} μ^{i+j+1}` in the off-diagonal entry:
/// `−1/((i+1)(i+2)⋯(i+j+1))`.
pub fn euler_coefficient(i: u64, j: u64) -> Scalar {
    let p = Scalar::real(&factorial(i + j + 1) / &factorial(i));
    -p.inv().expect("nonzero")
}

/// Every mismatch between an Euler `Σ` in `(z, μ)` and the closed form
/// `[[e^μ, ρ], [0, 1]]`, as `(row, col, exponents, got, expected)`.
pub fn euler_mismatches(sigma: &GroupoidRepresentation, n: i64) -> Vec<(usize, usize, [i64; 2], Scalar, Scalar)> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            let exp = |i: usize, j: usize| -> Scalar {
                match (i, j) {
                    (0, 0) if a == 0 => Scalar::real(factorial(b as u64).recip()),
                    (0, 1) if a >= 1 && b >= a => euler_coefficient(a as u64 - 1, (b - a) as u64),
                    (1, 1) if a == 0 && b == 0 => Scalar::one(),
                    _ => Scalar::zero(),
                }
            };
            for i in 0..2 {
                for j in 0..2 {
                    let got = sigma.psi.get(i, j).coeff(&[a, b]);
                    let want = exp(i, j);
                    if got != want {
                        out.push((i, j, [a, b], got, want));
                    }
                }
            }
        }
    }
    out
}

/// `d + [[0, z], [1, 0]] z^{-3} dz`, solved by
/// `[[Ai(1/z), Bi(1/z)], [Ai′(1/z), Bi′(1/z)]]`.
pub fn airy_system() -> MeromorphicSystem {
    MeromorphicSystem::from_polys("z", 1, 3, &[vec![vec![], poly(&[(1, 1)])], vec![poly(&[(0, 1)]), vec![]]])
        .expect("valid system")
}

/// Companion form of `f″ = x f` at `x = ∞`, `z = 1/x`, with `δ = z³∂_z`:
/// `[[0, −1], [−z, −z²]]`, solved by `(Ai(1/z), −z Ai′(1/z))`.
pub fn airy_companion_system() -> MeromorphicSystem {
    MeromorphicSystem::from_polys("z", 1, 3, &[vec![vec![], poly(&[(0, -1)])], vec![poly(&[(1, -1)]), poly(&[(2, -1)])]])
        .expect("valid system")
}

/// Closed-form gauge, pre-gauge `diag(z^{1/4}, z^{-1/4})`, model
/// `diag(e^{∓(2/3) z^{-3/2}})` and `Pair_3`, ready for degree `n`.
pub fn airy_inputs(n: i64) -> Res<ResumInputs> {
    let pre = PreGauge::airy();
    let gauge = airy_gauge(required_degree(n, Some(&pre)))?;
    Ok(ResumInputs {
        gauge,
        model: ExponentialModel::airy(),
        chart: GroupoidChart::pair(3),
        pre_gauge: Some(pre),
        coords: Coordinates::Standard,
    })
}

/// Resummed Airy representation in `(z, u)` through total degree `n`.
pub fn airy_sigma(n: i64) -> Res<GroupoidRepresentation> {
    airy_inputs(n)?.run(n)
}

/// The degree `<= 6` part of the resummed Airy representation on `Pair_3`.
pub fn airy_expected() -> MatSeries {
    let vars = vec![VarSpec::regular("z", 7), VarSpec::regular("u", 7)];
    let s = |t: &[((i64, i64), (i64, i64))]| {
        let terms = t.iter().map(|&((a, b), (p, q))| (vec![a, b], Scalar::ratio(p, q)));
        MultiSeries::from_terms(vars.clone(), Some(7), terms).expect("valid terms")
    };
    let e11 = s(&[((0, 0), (1, 1)), ((1, 2), (1, 2)), ((3, 3), (-7, 6)), ((2, 4), (1, 24))]);
    let e12 = s(&[((1, 1), (-1, 1)), ((3, 2), (1, 1)), ((2, 3), (-1, 6))]);
    let e21 = s(&[((0, 1), (-1, 1)), ((2, 2), (3, 2)), ((1, 3), (-1, 6))]);
    let e22 = s(&[((0, 0), (1, 1)), ((1, 2), (1, 2)), ((3, 3), (-4, 3)), ((2, 4), (1, 24))]);
    MatSeries::new(2, 2, vec![e11, e12, e21, e22]).expect("2x2")
}

/// `[[Ai(1/z), Bi(1/z)], [Ai′(1/z), Bi′(1/z)]]`, a fundamental solution of
/// [`airy_system`]; needs `|1/z| <= 8`.
pub fn airy_fundamental(z: Complex64) -> Result<CMat, OracleError> {
    let v = airy_values(z.inv())?;
    Ok(vec![vec![v.ai, v.bi], vec![v.ai_prime, v.bi_prime]])
}

/// Twenty sample points for the Airy Wronskian: the real segment `[-7, 5]`
/// and a ring of radius 2.5, where `Ai·Bi′` stays of moderate size.
pub fn wronskian_points() -> Vec<Complex64> {
    let real = (0..10).map(|i| Complex64::new(-7.0 + 12.0 * i as f64 / 9.0, 0.0));
    let ring = (0..10).map(|i| Complex64::from_polar(2.5, 0.3 + std::f64::consts::TAU * i as f64 / 10.0));
    real.chain(ring).collect()
}
