use num_traits::One;

use crate::error::ConnectionError;
use crate::series::{DMat, MatSeries, MultiSeries, Scalar, VarSpec};

type Res<T> = Result<T, ConnectionError>;

/// `∇ = d + A(z) z^{-k} dz` with `A` a regular matrix series in one variable.
///
/// A ramified system stores `A` in `w = z^{1/r}`; the variable's ramification
/// is `r`. Pole order 0 is allowed and means a holomorphic connection.
#[derive(Clone, Debug, PartialEq)]
pub struct MeromorphicSystem {
    pole_order: u32,
    a: MatSeries,
}

impl MeromorphicSystem {
    pub fn new(pole_order: u32, a: MatSeries) -> Res<Self> {
        if !a.is_square() {
            return Err(ConnectionError::Invalid(format!("{}x{} matrix", a.rows(), a.cols())));
        }
        if a.vars().len() != 1 {
            return Err(ConnectionError::Invalid("A must be a series in one variable".into()));
        }
        let a = a.map(|_, _, e| e.regularized())?;
        Ok(MeromorphicSystem { pole_order, a })
    }

    /// System from exact polynomial entries `[(exponent, coefficient)]`.
    pub fn from_polys(
        var: &str,
        ramification: u32,
        pole_order: u32,
        rows: &[Vec<Vec<(i64, Scalar)>>],
    ) -> Res<Self> {
        let n = rows.len();
        let vars = vec![VarSpec::exact(var, ramification)];
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(ConnectionError::Invalid("matrix is not square".into()));
            }
            for p in row {
                let terms = p.iter().map(|(e, c)| (vec![*e], c.clone()));
                entries.push(MultiSeries::from_terms(vars.clone(), None, terms)?);
            }
        }
        Self::new(pole_order, MatSeries::new(n, n, entries)?)
    }

    pub fn rank(&self) -> usize {
        self.a.rows()
    }

    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    pub fn ramification(&self) -> u32 {
        self.a.vars()[0].ramification
    }

    pub fn var(&self) -> &str {
        &self.a.vars()[0].name
    }

    pub fn matrix(&self) -> &MatSeries {
        &self.a
    }

    /// Truncation of `A` in its variable (`None` when exact).
    pub fn prec(&self) -> Option<i64> {
        let v = &self.a.vars()[0];
        v.is_bounded().then_some(v.prec)
    }

    pub fn with_prec(&self, prec: i64) -> Res<Self> {
        Ok(MeromorphicSystem {
            pole_order: self.pole_order,
            a: self.a.restrict(&[prec], None)?,
        })
    }
}

/// Leading term `A(0)`, which generates the isotropy action at the pole.
pub fn isotropy_leading(sys: &MeromorphicSystem) -> DMat {
    sys.a.constant_term()
}

/// `D = δ^k + p_{k-1} δ^{k-1} + … + p_0` with `δ = zⁿ ∂_z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarOperator {
    pole_order: u32,
    coeffs: Vec<MultiSeries>,
}

impl ScalarOperator {
    /// `coeffs[i]` is `p_i`; all in the same single variable.
    pub fn new(pole_order: u32, coeffs: Vec<MultiSeries>) -> Res<Self> {
        let Some(first) = coeffs.first() else {
            return Err(ConnectionError::Invalid("operator of order 0".into()));
        };
        if first.nvars() != 1 || coeffs.iter().any(|p| !p.compatible(first)) {
            return Err(ConnectionError::Invalid("coefficients must share one variable".into()));
        }
        let coeffs = coeffs.iter().map(MultiSeries::regularized).collect::<Result<_, _>>()?;
        Ok(ScalarOperator { pole_order, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    pub fn coeffs(&self) -> &[MultiSeries] {
        &self.coeffs
    }

    /// Reads the operator back from a companion system.
    pub fn from_companion(sys: &MeromorphicSystem) -> Res<Self> {
        let n = sys.rank();
        let a = sys.matrix();
        for i in 0..n - 1 {
            for j in 0..n {
                let e = a.get(i, j);
                let ok = if j == i + 1 {
                    e.len() == 1 && e.constant_term() == -Scalar::one()
                } else {
                    e.is_zero()
                };
                if !ok {
                    return Err(ConnectionError::NotCompanion(format!("entry ({i},{j})")));
                }
            }
        }
        Self::new(sys.pole_order(), (0..n).map(|j| a.get(n - 1, j).clone()).collect())
    }
}

/// First-order system on jets `(f, δf, …, δ^{k-1}f)`: `-1` on the
/// superdiagonal and `p_0 … p_{k-1}` along the bottom row.
pub fn companion(op: &ScalarOperator) -> Res<MeromorphicSystem> {
    let k = op.order();
    let vars = op.coeffs[0].vars().to_vec();
    let a = MatSeries::from_fn(k, k, |i, j| {
        if i + 1 == k {
            Ok(op.coeffs[j].clone())
        } else if j == i + 1 {
            MultiSeries::constant(vars.clone(), -Scalar::one())
        } else {
            MultiSeries::new(vars.clone())
        }
    })?;
    MeromorphicSystem::new(op.pole_order, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn poly(t: &[(i64, i64)]) -> Vec<(i64, Scalar)> {
        t.iter().map(|&(e, c)| (e, Scalar::from_int(c))).collect()
    }

    #[test]
    fn airy_at_infinity() {
        let vars = vec![VarSpec::exact("z", 1)];
        let p0 = MultiSeries::from_terms(vars.clone(), None, [(vec![1], Scalar::from_int(-1))]).unwrap();
        let p1 = MultiSeries::from_terms(vars, None, [(vec![2], Scalar::from_int(-1))]).unwrap();
        let op = ScalarOperator::new(3, vec![p0, p1]).unwrap();
        let sys = companion(&op).unwrap();
        let expect = MeromorphicSystem::from_polys(
            "z",
            1,
            3,
            &[vec![vec![], poly(&[(0, -1)])], vec![poly(&[(1, -1)]), poly(&[(2, -1)])]],
        )
        .unwrap();
        assert_eq!(sys, expect);
        let lead = isotropy_leading(&sys);
        assert_eq!(lead[(0, 1)], Scalar::from_int(-1));
        assert!(lead[(1, 0)].is_zero() && lead[(1, 1)].is_zero());
        assert_eq!(ScalarOperator::from_companion(&sys).unwrap(), op);
    }

    #[test]
    fn rank_one_companion() {
        let vars = vec![VarSpec::exact("z", 1)];
        let op = ScalarOperator::new(1, vec![MultiSeries::constant(vars, Scalar::ratio(3, 2)).unwrap()]).unwrap();
        let sys = companion(&op).unwrap();
        assert_eq!(sys.rank(), 1);
        assert_eq!(sys.matrix().get(0, 0).constant_term(), Scalar::ratio(3, 2));
    }
}
