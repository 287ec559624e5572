use num_integer::Integer;
use num_traits::{One, Zero};

use crate::connection::MeromorphicSystem;
use crate::error::{ResumError, SeriesError};
use crate::series::{factorial, DMat, MatSeries, MultiSeries, Scalar, VarSpec};

use super::model::ExponentialModel;

type Res<T> = Result<T, ResumError>;

/// A formal gauge transformation `φ̂`: a regular matrix series in `w = z^{1/r}`
/// with invertible constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGauge {
    phi: MatSeries,
    source: Option<ExponentialModel>,
    target: Option<MeromorphicSystem>,
}

impl FormalGauge {
    pub fn new(phi: MatSeries) -> Res<Self> {
        if !phi.is_square() || phi.vars().len() != 1 {
            return Err(ResumError::Incompatible("gauge must be a square matrix in one variable".into()));
        }
        let phi = phi.map(|_, _, e| e.regularized())?;
        if phi.constant_term().det()?.is_zero() {
            return Err(SeriesError::Singular.into());
        }
        Ok(FormalGauge { phi, source: None, target: None })
    }

    /// The exact identity gauge on ramification `r`.
    pub fn identity(n: usize, r: u32) -> Self {
        let phi = MatSeries::identity(n, &[VarSpec::exact("z", r)]).expect("exact window");
        FormalGauge { phi, source: None, target: None }
    }

    pub fn with_endpoints(mut self, source: ExponentialModel, target: MeromorphicSystem) -> Self {
        self.source = Some(source);
        self.target = Some(target);
        self
    }

    pub fn phi(&self) -> &MatSeries {
        &self.phi
    }

    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    pub fn ramification(&self) -> u32 {
        self.phi.vars()[0].ramification
    }

    pub fn source(&self) -> Option<&ExponentialModel> {
        self.source.as_ref()
    }

    pub fn target(&self) -> Option<&MeromorphicSystem> {
        self.target.as_ref()
    }

    /// Degree in `z` through which `φ̂` is known (`None` when exact).
    pub fn degree(&self) -> Option<i64> {
        let v = &self.phi.vars()[0];
        v.is_bounded().then(|| (v.prec - 1).div_euclid(v.ramification as i64))
    }

    /// `z^k φ′ − φA₁ + A₂φ` against the recorded endpoints.
    pub fn residual(&self) -> Res<MatSeries> {
        let (Some(m), Some(s)) = (&self.source, &self.target) else {
            return Err(ResumError::Incompatible("gauge has no recorded source and target".into()));
        };
        let a1 = m.induced_system()?;
        gauge_residual(&self.phi, s.pole_order(), a1.matrix(), s.matrix())
    }
}

fn rescale_to(m: &MatSeries, ram: u32) -> Result<MatSeries, SeriesError> {
    let r = m.vars()[0].ramification;
    if r == ram {
        return Ok(m.clone());
    }
    m.map(|_, _, e| e.scale_exponents(&[ram / r]))
}

/// `z^k φ′ − φA₁ + A₂φ`, all univariate in the same variable name; the
/// ramifications are harmonized first.
pub fn gauge_residual(phi: &MatSeries, k: u32, a1: &MatSeries, a2: &MatSeries) -> Res<MatSeries> {
    let ram = [phi, a1, a2].iter().fold(1u32, |acc, m| acc.lcm(&m.vars()[0].ramification));
    let (phi, a1, a2) = (rescale_to(phi, ram)?, rescale_to(a1, ram)?, rescale_to(a2, ram)?);
    let r = ram as i64;
    let lift = [r * (k as i64 - 1) + 1];
    let inv_r = Scalar::ratio(1, r);
    let dphi = phi.map(|_, _, e| e.derivative(0)?.mul_monomial(&lift, &inv_r))?;
    Ok(dphi.sub(&phi.mul(&a1)?)?.add(&a2.mul(&phi)?)?)
}

/// Solves `z^k φ′ = φA₁ − A₂φ` with `φ(0) = I` through degree `n` in `z`,
/// where `A₁` is the model's induced system and `A₂` that of `sys`.
///
/// Coefficients come from one exact linear system per column, including
/// `k - 1` orders of lookahead, and must be uniquely determined.
pub fn solve_formal_gauge(model: &ExponentialModel, sys: &MeromorphicSystem, n: i64) -> Res<FormalGauge> {
    let rank = model.rank();
    if sys.rank() != rank || sys.pole_order() != model.pole_order() {
        return Err(ResumError::Incompatible(format!(
            "model has rank {} and pole order {}, system has rank {} and pole order {}",
            rank,
            model.pole_order(),
            sys.rank(),
            sys.pole_order()
        )));
    }
    if n < 0 {
        return Err(SeriesError::WindowExhausted(format!("degree {n}")).into());
    }
    let ram = model.ramification().lcm(&sys.ramification());
    let r = ram as i64;
    let a1 = rescale_to(model.induced_system()?.matrix(), ram)?;
    let a2 = rescale_to(sys.matrix(), ram)?;
    let k = model.pole_order() as i64;
    let dw = (r * (k - 1)) as usize;
    let pw = (r * (n + 1)) as usize;
    let len = pw + dw;
    if let Some(p) = sys.prec() {
        if (p * (ram / sys.ramification()) as i64) < len as i64 {
            return Err(SeriesError::WindowExhausted(format!(
                "system known below w^{p}, solver needs w^{len}"
            ))
            .into());
        }
    }
    let coef = |m: &MatSeries, i: usize, j: usize, t: usize| m.get(i, j).coeff(&[t as i64]);
    let mut columns = Vec::with_capacity(rank);
    for col in 0..rank {
        let unknowns = rank * len;
        let rows = unknowns + rank;
        let mut sys_m = DMat::zeros(rows, unknowns + 1);
        let idx = |t: usize, i: usize| t * rank + i;
        for t in 0..len {
            for i in 0..rank {
                let row = idx(t, i);
                if t >= dw {
                    let d = Scalar::ratio((t - dw) as i64, r);
                    sys_m[(row, idx(t - dw, i))] += &d;
                }
                for m in 0..=t {
                    let alpha = coef(&a1, col, col, m);
                    if !alpha.is_zero() {
                        sys_m[(row, idx(t - m, i))] -= &alpha;
                    }
                    for l in 0..rank {
                        let c = coef(&a2, i, l, m);
                        if !c.is_zero() {
                            sys_m[(row, idx(t - m, l))] += &c;
                        }
                    }
                }
            }
        }
        for i in 0..rank {
            sys_m[(unknowns + i, idx(0, i))] = Scalar::one();
            if i == col {
                sys_m[(unknowns + i, unknowns)] = Scalar::one();
            }
        }
        let pivots = sys_m.rref();
        if pivots.last() == Some(&unknowns) {
            return Err(ResumError::LeadingTermMismatch { column: col });
        }
        let free: Vec<usize> = (0..unknowns).filter(|c| !pivots.contains(c)).collect();
        let mut v = vec![Scalar::zero(); rank * pw];
        for (row, &p) in pivots.iter().enumerate() {
            if p < rank * pw {
                if free.iter().any(|&f| !sys_m[(row, f)].is_zero()) {
                    return Err(ResumError::Resonance { order: p / rank });
                }
                v[p] = sys_m[(row, unknowns)].clone();
            }
        }
        if let Some(&f) = free.iter().find(|&&f| f < rank * pw) {
            return Err(ResumError::Resonance { order: f / rank });
        }
        columns.push(v);
    }
    let vars = vec![VarSpec::new("z", ram, 0, pw as i64)];
    let phi = MatSeries::from_fn(rank, rank, |i, j| {
        let terms = (0..pw).map(|t| (vec![t as i64], columns[j][t * rank + i].clone()));
        MultiSeries::from_terms(vars.clone(), None, terms)
    })?;
    Ok(FormalGauge::new(phi)?.with_endpoints(model.clone(), sys.clone()))
}

/// `l_n = 2ⁿ ∏_{j<3n}(j + ½) / (3^{3n} (2n)!)`.
pub fn airy_l(n: u64) -> Scalar {
    let mut p = Scalar::one();
    for j in 0..3 * n {
        p = &p * &Scalar::ratio(2 * j as i64 + 1, 2);
    }
    let two_n = Scalar::from_int(2).powi(n as i64).expect("nonzero");
    let three = Scalar::from_int(27).powi(n as i64).expect("nonzero");
    let f = Scalar::real(factorial(2 * n));
    &(&two_n * &p) / &(&three * &f)
}

/// `m_n = -(6n+1)/(6n-1) · l_n`.
pub fn airy_m(n: u64) -> Scalar {
    let n = n as i64;
    &Scalar::ratio(-(6 * n + 1), 6 * n - 1) * &airy_l(n as u64)
}

/// `φ̂ = [[l(-ζ), l(ζ)], [-m(-ζ), m(ζ)]]` with `ζ = (3/2) z^{3/2}`, through
/// degree `n` in `z`; the variable has ramification 2.
pub fn airy_gauge(n: i64) -> Res<FormalGauge> {
    if n < 0 {
        return Err(SeriesError::WindowExhausted(format!("degree {n}")).into());
    }
    let prec = 2 * (n + 1);
    let vars = vec![VarSpec::new("z", 2, 0, prec)];
    let terms = |f: fn(u64) -> Scalar, sign: i64, outer: i64| {
        let mut v = Vec::new();
        let mut idx = 0u64;
        while 3 * idx as i64 <= prec {
            let zeta = Scalar::ratio(3 * sign, 2).powi(idx as i64).expect("nonzero");
            v.push((vec![3 * idx as i64], &(&f(idx) * &zeta) * &Scalar::from_int(outer)));
            idx += 1;
        }
        MultiSeries::from_terms(vars.clone(), None, v)
    };
    let phi = MatSeries::new(
        2,
        2,
        vec![terms(airy_l, -1, 1)?, terms(airy_l, 1, 1)?, terms(airy_m, -1, -1)?, terms(airy_m, 1, 1)?],
    )?;
    FormalGauge::new(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_system() -> MeromorphicSystem {
        let p = |t: &[(i64, i64)]| t.iter().map(|&(e, c)| (e, Scalar::from_int(c))).collect::<Vec<_>>();
        MeromorphicSystem::from_polys("z", 1, 2, &[vec![p(&[(0, -1)]), p(&[(1, 1)])], vec![vec![], vec![]]])
            .unwrap()
    }

    #[test]
    fn euler_factorials() {
        let g = solve_formal_gauge(&ExponentialModel::euler(), &euler_system(), 10).unwrap();
        let f = g.phi().get(0, 1);
        for n in 0..10u64 {
            assert_eq!(f.coeff(&[n as i64 + 1]), Scalar::real(factorial(n)));
        }
        assert!(g.phi().get(1, 0).is_zero());
        assert_eq!(g.degree(), Some(10));
        assert!(g.residual().unwrap().entries().iter().all(MultiSeries::is_zero));
    }

    #[test]
    fn airy_coefficients() {
        assert_eq!(airy_l(0), Scalar::one());
        assert_eq!(airy_m(0), Scalar::one());
        assert_eq!(airy_l(1), Scalar::ratio(5, 72));
        assert_eq!(airy_m(1), Scalar::ratio(-7, 72));
        let g = airy_gauge(3).unwrap();
        assert_eq!(g.phi().get(0, 0).coeff(&[3]), &Scalar::ratio(-3, 2) * &Scalar::ratio(5, 72));
        assert_eq!(g.phi().get(1, 0).coeff(&[0]), Scalar::from_int(-1));
    }

    #[test]
    fn mismatch_detected() {
        // model diag(-1, 0) against diag(0, -1): leading terms differ
        let p = |c: i64| vec![(0i64, Scalar::from_int(c))];
        let sys = MeromorphicSystem::from_polys("z", 1, 2, &[vec![p(0), vec![]], vec![vec![], p(-1)]]).unwrap();
        let err = solve_formal_gauge(&ExponentialModel::euler(), &sys, 3).unwrap_err();
        assert!(matches!(err, ResumError::LeadingTermMismatch { .. } | ResumError::Resonance { .. }));
    }
}
