use num_traits::One;
use serde::Serialize;

use crate::error::{ResumError, SeriesError};
use crate::groupoid::{reparam_mu, unreparam_mu, ChartKind, GroupoidChart};
use crate::series::{MatSeries, MultiSeries, Scalar, VarSpec};

use super::model::ratio_power;

type Res<T> = Result<T, ResumError>;

/// Chart coordinates of a representation. `Mu` is `(z, μ)` with
/// `μ = u/(1 + z u)`, available on `Pair_2` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    Standard,
    Mu,
}

/// A matrix of two-variable series on a groupoid chart.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidRepresentation {
    pub chart: GroupoidChart,
    pub coords: Coordinates,
    pub psi: MatSeries,
}

impl GroupoidRepresentation {
    pub fn rank(&self) -> usize {
        self.psi.rows()
    }

    /// Largest `N` such that every entry knows all terms of degree `<= N`
    /// (`u` counted with weight 1, `z` with weight 1).
    pub fn degree(&self) -> i64 {
        let vars = self.psi.vars();
        let rz = vars[0].ramification as i64;
        let ru = vars[1].ramification as i64;
        let t = self.psi.total_prec().unwrap_or(crate::series::UNBOUNDED);
        let pz = vars[0].prec.min(t);
        let pu = vars[1].prec.min(t);
        if rz == ru {
            ((pz.min(pu).min(t)) - 1).div_euclid(rz)
        } else {
            (pz - 1).div_euclid(rz).min((pu - 1).div_euclid(ru)).min((t - 1).div_euclid(rz.max(ru)))
        }
    }

    /// Rewrites a `Pair_2` representation in `(z, μ)`.
    pub fn to_mu(&self) -> Res<Self> {
        match self.coords {
            Coordinates::Mu => Ok(self.clone()),
            Coordinates::Standard => {
                self.require_pair2()?;
                let psi = self.psi.map(|_, _, e| reparam_mu(e))?;
                Ok(GroupoidRepresentation { chart: self.chart, coords: Coordinates::Mu, psi })
            }
        }
    }

    pub fn to_standard(&self) -> Res<Self> {
        match self.coords {
            Coordinates::Standard => Ok(self.clone()),
            Coordinates::Mu => {
                let psi = self.psi.map(|_, _, e| unreparam_mu(e))?;
                Ok(GroupoidRepresentation { chart: self.chart, coords: Coordinates::Standard, psi })
            }
        }
    }

    fn require_pair2(&self) -> Res<()> {
        if self.chart.kind != ChartKind::Pair || self.chart.k != 2 {
            return Err(ResumError::Incompatible(format!("(z, μ) coordinates need Pair_2, not {}", self.chart)));
        }
        Ok(())
    }

    /// Terms of total degree `<= n` (in raw exponents).
    pub fn truncated(&self, n: i64) -> Res<Self> {
        Ok(GroupoidRepresentation { psi: self.psi.truncate_total(n)?, ..self.clone() })
    }

    /// `Ψ|_{u=0}` is exactly the identity.
    pub fn identity_check(&self) -> Res<bool> {
        let z = self.psi.vars()[0].name.clone();
        let restricted = self.psi.map(|_, _, e| e.project(&[&z]))?;
        Ok(restricted.is_identity())
    }

    /// `Ψ(g₂·g₁) = Ψ(g₂)·Ψ(g₁)` as an identity in `(z, u₁, u₂)` through raw
    /// total degree `degree`.
    pub fn multiplicativity_check(&self, degree: i64) -> Res<bool> {
        let psi = self.normalized_u()?;
        let vz = psi.vars()[0].clone();
        let rz = vz.ramification as i64;
        let t = degree + 1;
        let vars = vec![
            VarSpec::new(vz.name.clone(), vz.ramification, 0, t),
            VarSpec::new("u1", 1, 0, t),
            VarSpec::new("u2", 1, 0, t),
        ];
        let mono = |e: [i64; 3]| -> Res<MultiSeries> {
            Ok(MultiSeries::from_terms(vars.clone(), Some(t), [(e.to_vec(), Scalar::one())])?)
        };
        let w = mono([1, 0, 0])?;
        let (u1, u2) = (mono([0, 1, 0])?, mono([0, 0, 1])?);
        let km1 = self.chart.k as i64 - 1;
        let (w_t, law) = match self.coords {
            Coordinates::Mu => {
                self.require_pair2()?;
                // t = z/(1 - zμ₁), μ additive
                let one_minus = w.unit_like().sub(&w.mul(&u1)?)?;
                (w.mul(&one_minus.invert()?)?, u1.add(&u2)?)
            }
            Coordinates::Standard => {
                let y1 = u1.mul_monomial(&[rz * km1, 0, 0], &Scalar::one())?;
                let w_t = w.mul(&ratio_power(self.chart.kind, &y1, &Scalar::ratio(1, rz))?)?;
                let f = match self.chart.kind {
                    ChartKind::Sto => y1.scale(&Scalar::from_int(km1)).exp_series()?,
                    ChartKind::Pair => y1.add(&y1.unit_like())?.pow(self.chart.k as i64)?,
                };
                (w_t, u2.mul(&f)?.add(&u1)?)
            }
        };
        let renamed = psi.map(|_, _, e| e.rename(&["__z", "__u"]))?;
        let at = |zi: &MultiSeries, ui: &MultiSeries| renamed.substitute(&[("__z", zi), ("__u", ui)]);
        let lhs = at(&w, &law)?;
        let rhs = at(&w_t, &u2)?.mul(&at(&w, &u1)?)?;
        for m in [&lhs, &rhs] {
            if !m.entries().iter().all(|e| e.covers_total(degree)) {
                return Err(SeriesError::WindowExhausted(format!(
                    "multiplicativity check through degree {degree}"
                ))
                .into());
            }
        }
        Ok(lhs.truncate_total(degree)?.agrees_with(&rhs.truncate_total(degree)?)?)
    }

    /// `psi` with an unramified `u`; ramified `u` exponents must be multiples
    /// of the ramification.
    fn normalized_u(&self) -> Res<MatSeries> {
        let ru = self.psi.vars()[1].ramification;
        if ru == 1 {
            return Ok(self.psi.clone());
        }
        Ok(self.psi.map(|_, _, e| e.unscale_exponents(&[1, ru]))?)
    }
}
