use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::system::{isotropy_leading, MeromorphicSystem};
use crate::error::ConnectionError;
use crate::series::{DMat, Scalar};

type Res<T> = Result<T, ConnectionError>;

#[derive(Clone, Debug, PartialEq)]
pub enum Eigenvalues {
    /// Gaussian-rational eigenvalues, listed with multiplicity.
    Exact(Vec<Scalar>),
    Numeric(Vec<Complex64>),
}

impl Eigenvalues {
    pub fn method(&self) -> &'static str {
        match self {
            Eigenvalues::Exact(_) => "exact",
            Eigenvalues::Numeric(_) => "numeric",
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Eigenvalues::Exact(v) => v.iter().map(Scalar::to_complex64).collect(),
            Eigenvalues::Numeric(v) => v.clone(),
        }
    }
}

/// Eigenvalues of a constant matrix after checking it is diagonalizable.
///
/// Triangular and 2x2 matrices with a rational discriminant root are handled
/// exactly; everything else goes through the characteristic polynomial and a
/// simultaneous root iteration.
pub fn eigenvalues(m: &DMat) -> Res<Eigenvalues> {
    let n = m.rows;
    let exact = if m.is_upper_triangular() || m.is_lower_triangular() {
        Some((0..n).map(|i| m[(i, i)].clone()).collect::<Vec<_>>())
    } else if n == 2 {
        let tr = &m[(0, 0)] + &m[(1, 1)];
        let det = m.det()?;
        let disc = &(&tr * &tr) - &(&Scalar::from_int(4) * &det);
        disc.exact_sqrt().map(|s| {
            let half = Scalar::ratio(1, 2);
            vec![&(&tr - &s) * &half, &(&tr + &s) * &half]
        })
    } else {
        None
    };
    if let Some(ev) = exact {
        check_diagonalizable_exact(m, &ev)?;
        return Ok(Eigenvalues::Exact(ev));
    }
    let roots = poly_roots(&charpoly(m)?);
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for i in 0..roots.len() {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() <= 1e-8 * scale {
                // a numerically repeated eigenvalue cannot be certified
                return Err(ConnectionError::NotDiagonalizable);
            }
        }
    }
    Ok(Eigenvalues::Numeric(roots))
}

fn check_diagonalizable_exact(m: &DMat, ev: &[Scalar]) -> Res<()> {
    let n = m.rows;
    let mut seen: Vec<&Scalar> = Vec::new();
    for l in ev {
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        let mult = ev.iter().filter(|x| *x == l).count();
        if mult == 1 {
            continue;
        }
        let mut shifted = DMat::from_fn(n, n, |i, j| {
            if i == j {
                &m[(i, j)] - l
            } else {
                m[(i, j)].clone()
            }
        });
        if shifted.rref().len() != n - mult {
            return Err(ConnectionError::NotDiagonalizable);
        }
    }
    Ok(())
}

/// Characteristic polynomial `det(xI - M)` by Faddeev–LeVerrier, as
/// coefficients `c_0 … c_n` of `x^0 … x^n` (monic).
fn charpoly(m: &DMat) -> Res<Vec<Complex64>> {
    let n = m.rows;
    let mut c = vec![Scalar::zero(); n + 1];
    c[n] = Scalar::one();
    let mut mk = DMat::zeros(n, n);
    for k in 1..=n {
        // M_k = M·M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk)?;
        for i in 0..n {
            next[(i, i)] += &c[n - k + 1];
        }
        let am = m.mul(&next)?;
        let tr = (0..n).fold(Scalar::zero(), |s, i| &s + &am[(i, i)]);
        c[n - k] = &-tr * &Scalar::ratio(1, k as i64);
        mk = next;
    }
    Ok(c.iter().map(Scalar::to_complex64).collect())
}

/// Roots of a monic polynomial by Durand–Kerner, polished with Newton steps.
fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let eval = |x: Complex64| c.iter().rev().fold(Complex64::zero(), |acc, a| acc * x + a);
    let deval = |x: Complex64| {
        (1..=n)
            .rev()
            .fold(Complex64::zero(), |acc, k| acc * x + c[k] * k as f64)
    };
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius.min(2.0)).collect();
    for _ in 0..2000 {
        let mut delta = 0f64;
        for i in 0..n {
            let mut den = Complex64::one();
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    for r in &mut z {
        for _ in 0..3 {
            let d = deval(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    z
}

/// One `(i, j)` pair of distinct leading eigenvalues.
#[derive(Clone, Debug, Serialize)]
pub struct AntiStokes {
    pub i: usize,
    pub j: usize,
    /// `λ_j - λ_i`.
    pub q: [f64; 2],
    /// Every `v` with `v^{k-1} = q`.
    pub roots: Vec<[f64; 2]>,
    /// The same roots as `p/q` pairs when all of them are Gaussian rationals.
    pub exact_roots: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AntiStokesReport {
    pub pole_order: u32,
    pub eigenvalue_method: &'static str,
    pub eigenvalues: Vec<[f64; 2]>,
    pub directions: Vec<AntiStokes>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Anti-Stokes directions of the leading term `A(0)`.
pub fn anti_stokes(sys: &MeromorphicSystem) -> Res<AntiStokesReport> {
    let k = sys.pole_order();
    if k < 2 {
        return Err(ConnectionError::AntiStokesUndefined);
    }
    let ev = eigenvalues(&isotropy_leading(sys))?;
    let m = k - 1;
    let n = sys.rank();
    let mut directions = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (q, q_exact) = match &ev {
                Eigenvalues::Exact(v) => {
                    let d = &v[j] - &v[i];
                    (d.to_complex64(), Some(d))
                }
                Eigenvalues::Numeric(v) => (v[j] - v[i], None),
            };
            let is_zero = match &q_exact {
                Some(d) => d.is_zero(),
                None => q.norm() == 0.0,
            };
            if is_zero {
                continue;
            }
            let roots = roots_of(q, m);
            let exact_roots = q_exact.and_then(|qe| exact_roots(&roots, &qe, m));
            directions.push(AntiStokes {
                i,
                j,
                q: pair(q),
                roots: roots.iter().copied().map(pair).collect(),
                exact_roots,
            });
        }
    }
    Ok(AntiStokesReport {
        pole_order: k,
        eigenvalue_method: ev.method(),
        eigenvalues: ev.to_complex().into_iter().map(pair).collect(),
        directions,
    })
}

/// The `m` complex `m`-th roots of `q`.
fn roots_of(q: Complex64, m: u32) -> Vec<Complex64> {
    let r = q.norm().powf(1.0 / m as f64);
    let arg = q.arg() / m as f64;
    (0..m)
        .map(|l| {
            let t = arg + 2.0 * std::f64::consts::PI * l as f64 / m as f64;
            Complex64::from_polar(r, t)
        })
        .collect()
}

fn exact_roots(roots: &[Complex64], q: &Scalar, m: u32) -> Option<Vec<[String; 2]>> {
    roots
        .iter()
        .map(|v| {
            let c = Scalar::new(rationalize(v.re)?, rationalize(v.im)?);
            (c.powi(m as i64).ok()? == *q).then(|| {
                let (re, im) = c.to_strings();
                [re, im]
            })
        })
        .collect()
}

/// Best rational approximation with denominator at most 10⁶.
fn rationalize(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e12 {
            break;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    let r = BigRational::new(BigInt::from(h1), BigInt::from(k1));
    ((r.to_f64()? - x).abs() <= 1e-9 * x.abs().max(1.0)).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::MatSeries;
    use crate::series::VarSpec;

    fn diag_sys(k: u32, d: &[Scalar]) -> MeromorphicSystem {
        let m = DMat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { Scalar::zero() });
        let a = MatSeries::from_constant(&m, &[VarSpec::exact("z", 1)]).unwrap();
        MeromorphicSystem::new(k, a).unwrap()
    }

    #[test]
    fn square_roots_of_one() {
        let r = anti_stokes(&diag_sys(3, &[Scalar::zero(), Scalar::one()])).unwrap();
        let d = &r.directions[0];
        assert_eq!((d.i, d.j), (0, 1));
        let ex = d.exact_roots.as_ref().unwrap();
        assert_eq!(ex.len(), 2);
        assert!(ex.contains(&["1/1".into(), "0/1".into()]));
        assert!(ex.contains(&["-1/1".into(), "0/1".into()]));
    }

    #[test]
    fn pole_two_and_trivial_pairs() {
        let r = anti_stokes(&diag_sys(2, &[Scalar::zero(), Scalar::i()])).unwrap();
        assert_eq!(r.directions[0].roots.len(), 1);
        assert!((r.directions[0].roots[0][1] - 1.0).abs() < 1e-15);
        let same = anti_stokes(&diag_sys(3, &[Scalar::one(), Scalar::one()])).unwrap();
        assert!(same.directions.is_empty());
        assert!(anti_stokes(&diag_sys(1, &[Scalar::one()])).is_err());
    }

    #[test]
    fn jordan_block_rejected() {
        let m = DMat::from_rows(vec![
            vec![Scalar::zero(), -Scalar::one()],
            vec![Scalar::zero(), Scalar::zero()],
        ])
        .unwrap();
        assert_eq!(eigenvalues(&m), Err(ConnectionError::NotDiagonalizable));
    }

    #[test]
    fn numeric_three_by_three() {
        // companion matrix of x^3 - 2 (irrational roots)
        let z = Scalar::zero;
        let m = DMat::from_rows(vec![
            vec![z(), Scalar::one(), z()],
            vec![z(), z(), Scalar::one()],
            vec![Scalar::from_int(2), z(), z()],
        ])
        .unwrap();
        let Eigenvalues::Numeric(ev) = eigenvalues(&m).unwrap() else {
            panic!("expected numeric eigenvalues");
        };
        for l in ev {
            assert!((l.powu(3) - 2.0).norm() < 1e-12);
        }
    }
}
