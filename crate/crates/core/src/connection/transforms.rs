use num_traits::One;
use serde::Serialize;

use super::system::{MeromorphicSystem, ScalarOperator};
use crate::error::ConnectionError;
use crate::series::{MatSeries, MultiSeries, Scalar, VarSpec, UNBOUNDED};

type Res<T> = Result<T, ConnectionError>;

/// Divisors attached to the cover `z ↦ zⁿ` over a pole of order `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorData {
    pub n: u32,
    pub q: u32,
    /// Order of the ramification divisor `R` at 0.
    pub ramification_order: u32,
    /// Order of `C = f*D - R`, the pole order upstairs.
    pub pullback_order: i64,
    pub etale: bool,
}

pub fn divisor_calculus(n: u32, q: u32) -> Res<DivisorData> {
    if n == 0 || q == 0 {
        return Err(ConnectionError::Invalid(format!("need n, q >= 1 (got n = {n}, q = {q})")));
    }
    let (n64, q64) = (n as i64, q as i64);
    Ok(DivisorData {
        n,
        q,
        ramification_order: n - 1,
        pullback_order: n64 * q64 - (n64 - 1),
        etale: n64 - 1 <= n64 * q64,
    })
}

fn var_of(sys: &MeromorphicSystem, prec: i64) -> Vec<VarSpec> {
    vec![VarSpec::new(sys.var(), sys.ramification(), 0, prec)]
}

/// Pullback along `z ↦ zⁿ`: `n·A(zⁿ)` with pole order `nq - n + 1`.
///
/// A holomorphic system (`q = 0`) pulls back to `n z^{n-1} A(zⁿ)`, still
/// holomorphic.
pub fn pullback(sys: &MeromorphicSystem, n: u32) -> Res<MeromorphicSystem> {
    if n == 0 {
        return Err(ConnectionError::Invalid("covering degree 0".into()));
    }
    if n == 1 {
        return Ok(sys.clone());
    }
    let q = sys.pole_order();
    let r = sys.ramification() as i64;
    let nn = n as i64;
    let shift = if q == 0 { (nn - 1) * r } else { 0 };
    let prec = sys.prec().map_or(UNBOUNDED, |p| p * nn + shift);
    let vars = var_of(sys, prec);
    let scale = Scalar::from_int(nn);
    let a = sys.matrix().map(|_, _, e| {
        let terms = e.terms().map(|(x, c)| (vec![x[0] * nn + shift], c * &scale));
        MultiSeries::from_terms(vars.clone(), None, terms)
    })?;
    let pole = if q == 0 { 0 } else { n * q - n + 1 };
    Ok(MeromorphicSystem::new(pole, a)?)
}

/// Direct image along `z ↦ w = zⁿ` in the fibre basis `(1, z, …, z^{n-1})`.
///
/// The upstairs pole order must be `nq - (n-1)` for some `q >= 1`; the result
/// has pole order `q`, rank `n·rank`, and carries the factor `1/n` coming from
/// `dw = n z^{n-1} dz`. Basis vector `z^b e_j` has index `b·rank + j`.
pub fn pushforward(sys: &MeromorphicSystem, n: u32) -> Res<MeromorphicSystem> {
    if n == 0 {
        return Err(ConnectionError::Invalid("covering degree 0".into()));
    }
    if sys.ramification() != 1 {
        return Err(ConnectionError::Invalid("pushforward of a ramified system".into()));
    }
    let p = sys.pole_order();
    if p == 0 || (p + n - 1) % n != 0 {
        return Err(ConnectionError::EtaleViolated { pole: p, n });
    }
    if n == 1 {
        return Ok(sys.clone());
    }
    let q = ((p + n - 1) / n) as i64;
    let nn = n as i64;
    let m = sys.rank();
    let prec = sys.prec().map_or(UNBOUNDED, |pr| pr.div_euclid(nn));
    let vars = var_of(sys, prec);
    let inv_n = Scalar::ratio(1, nn);
    let a = sys.matrix();
    let big = MatSeries::from_fn(m * (n as usize), m * (n as usize), |row, col| {
        let (bp, i) = ((row / m) as i64, row % m);
        let (b, j) = ((col / m) as i64, col % m);
        let mut terms: Vec<(Vec<i64>, Scalar)> = Vec::new();
        if bp == b && i == j && b > 0 {
            terms.push((vec![q - 1], &Scalar::from_int(b) * &inv_n));
        }
        // z^b · z^e = z^{b'} w^t with e = c + n·s
        for (x, coef) in a.get(i, j).terms() {
            let e = x[0];
            if (b + e).rem_euclid(nn) == bp {
                terms.push((vec![(b + e).div_euclid(nn)], coef * &inv_n));
            }
        }
        Ok(MultiSeries::from_terms(vars.clone(), None, terms)?)
    })?;
    Ok(MeromorphicSystem::new(q as u32, big)?)
}

/// `S(g) = g'''/g' - (3/2)(g''/g')²`.
pub fn schwarzian_derivative(g: &MultiSeries) -> Res<MultiSeries> {
    let d1 = g.derivative(0)?;
    let d2 = d1.derivative(0)?;
    let d3 = d2.derivative(0)?;
    let inv = d1.invert()?;
    let a = d3.mul(&inv)?;
    let b = d2.mul(&inv)?;
    Ok(a.sub(&b.mul(&b)?.scale(&Scalar::ratio(3, 2)))?)
}

/// Projective connection coefficient after the coordinate change `g`:
/// `q_w = (q_z + S(g))·(g')^{-2}`.
pub fn schwarzian(g: &MultiSeries, q_z: &MultiSeries) -> Res<MultiSeries> {
    if g.nvars() != 1 {
        return Err(ConnectionError::Invalid("g must be univariate".into()));
    }
    let s = schwarzian_derivative(g)?;
    let d1 = g.derivative(0)?;
    let inv2 = d1.invert()?.pow(2)?;
    Ok(q_z.add(&s)?.mul(&inv2)?)
}

/// Elementary modification of a 2x2 companion system with pole order `n`:
/// `[[0, -1], [z²p₀, z p₁ - zⁿ]]` with pole order `n + 1`.
pub fn elementary_modification(sys: &MeromorphicSystem) -> Res<MeromorphicSystem> {
    if sys.rank() != 2 {
        return Err(ConnectionError::NotCompanion(format!("rank {}", sys.rank())));
    }
    let op = ScalarOperator::from_companion(sys)?;
    let n = sys.pole_order() as i64;
    let r = sys.ramification() as i64;
    let (p0, p1) = (&op.coeffs()[0], &op.coeffs()[1]);
    let lo = p0.vars().to_vec();
    let new_p0 = p0.mul_monomial(&[2 * r], &Scalar::one())?;
    let zn = MultiSeries::monomial(&lo, &[n * r], Scalar::one())?;
    let new_p1 = p1.mul_monomial(&[r], &Scalar::one())?.sub(&zn)?;
    let a = MatSeries::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => MultiSeries::constant(lo.clone(), -Scalar::one()),
        (1, 0) => Ok(new_p0.clone()),
        (1, 1) => Ok(new_p1.clone()),
        _ => MultiSeries::new(lo.clone()),
    })?;
    Ok(MeromorphicSystem::new(sys.pole_order() + 1, a)?)
}

/// `A'G - (z G A - z^{n+1} G')` for `G = diag(1, z)`; zero exactly when
/// `modified` is the gauge transform of `sys` by `G`.
pub fn modification_residual(sys: &MeromorphicSystem, modified: &MeromorphicSystem) -> Res<MatSeries> {
    let n = sys.pole_order() as i64;
    let r = sys.ramification() as i64;
    let like = sys.matrix().vars().to_vec();
    let mono = |e: i64| MultiSeries::monomial(&like, &[e * r], Scalar::one());
    let zero = || MultiSeries::new(like.clone());
    let g = MatSeries::new(2, 2, vec![mono(0)?, zero()?, zero()?, mono(1)?])?;
    let dg = MatSeries::new(2, 2, vec![zero()?, zero()?, zero()?, mono(0)?])?;
    let lhs = modified.matrix().mul(&g)?;
    let zga = g.mul(sys.matrix())?.map(|_, _, e| e.mul_monomial(&[r], &Scalar::one()))?;
    let corr = dg.map(|_, _, e| e.mul_monomial(&[(n + 1) * r], &Scalar::one()))?;
    Ok(lhs.sub(&zga.sub(&corr)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(t: &[(i64, (i64, i64))]) -> Vec<(i64, Scalar)> {
        t.iter().map(|&(e, (p, q))| (e, Scalar::ratio(p, q))).collect()
    }

    #[test]
    fn divisors() {
        let d = divisor_calculus(2, 2).unwrap();
        assert_eq!(d.pullback_order, 3);
        assert_eq!(d.ramification_order, 1);
        assert!(d.etale);
    }

    #[test]
    fn pullback_rank_one() {
        let sys = MeromorphicSystem::from_polys("z", 1, 1, &[vec![poly(&[(0, (3, 1))])]]).unwrap();
        let p = pullback(&sys, 2).unwrap();
        assert_eq!(p.pole_order(), 1);
        assert_eq!(p.matrix().get(0, 0).constant_term(), Scalar::from_int(6));
        assert_eq!(pullback(&sys, 1).unwrap(), sys);
    }

    #[test]
    fn pushforward_of_trivial() {
        let sys = MeromorphicSystem::from_polys("z", 1, 3, &[vec![vec![]]]).unwrap();
        let p = pushforward(&sys, 2).unwrap();
        assert_eq!(p.pole_order(), 2);
        assert!(p.matrix().get(0, 0).is_zero() && p.matrix().get(0, 1).is_zero());
        assert!(p.matrix().get(1, 0).is_zero());
        assert_eq!(p.matrix().get(1, 1).coeff(&[1]), Scalar::ratio(1, 2));
        let bad = MeromorphicSystem::from_polys("z", 1, 2, &[vec![vec![]]]).unwrap();
        assert!(matches!(pushforward(&bad, 2), Err(ConnectionError::EtaleViolated { .. })));
    }

    #[test]
    fn schwarzian_of_square() {
        let v = vec![VarSpec::exact("z", 1)];
        let g = MultiSeries::from_terms(v.clone(), None, [(vec![2], Scalar::one())]).unwrap();
        let q = schwarzian(&g, &MultiSeries::new(v).unwrap()).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.coeff(&[-4]), Scalar::ratio(-3, 8));
    }

    #[test]
    fn modification_of_zero_operator() {
        let sys = MeromorphicSystem::from_polys("z", 1, 1, &[vec![vec![], poly(&[(0, (-1, 1))])], vec![vec![], vec![]]])
            .unwrap();
        let m = elementary_modification(&sys).unwrap();
        assert_eq!(m.pole_order(), 2);
        assert_eq!(m.matrix().get(1, 1).coeff(&[1]), Scalar::from_int(-1));
        assert!(m.matrix().get(1, 0).is_zero());
        let res = modification_residual(&sys, &m).unwrap();
        assert!(res.entries().iter().all(MultiSeries::is_zero));
    }
}
