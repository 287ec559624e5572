//! Chart models of the Stokes groupoids `Sto_k` and the twisted pair
//! groupoids `Pair(𝔸¹, k·0)`.
//!
//! Both charts use coordinates `(z, u)` with source `s(z,u) = z`. The target
//! is `z·exp(u z^(k-1))` on `Sto_k` and `z(1 + u z^(k-1))` on `Pair_k`; the
//! latter excludes the curve `1 + u z^(k-1) = 0`.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GroupoidError, SeriesError};
use crate::series::{binomial, MultiSeries, Scalar, VarSpec, UNBOUNDED};

type Res<T> = Result<T, GroupoidError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    Sto,
    Pair,
}

impl std::str::FromStr for ChartKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sto" => Ok(ChartKind::Sto),
            "pair" => Ok(ChartKind::Pair),
            _ => Err(format!("unknown chart kind {s:?} (expected sto or pair)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupoidChart {
    pub kind: ChartKind,
    pub k: u32,
}

impl fmt::Display for GroupoidChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ChartKind::Sto => write!(f, "Sto_{}", self.k),
            ChartKind::Pair => write!(f, "Pair_{}", self.k),
        }
    }
}

/// `(z, u)` with both variables regular and truncated at `prec`.
pub fn zu_vars(prec: i64) -> Vec<VarSpec> {
    vec![VarSpec::regular("z", prec), VarSpec::regular("u", prec)]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupoidPoint {
    pub chart: GroupoidChart,
    pub z: Complex64,
    pub u: Complex64,
}

impl GroupoidChart {
    pub fn new(kind: ChartKind, k: u32) -> Res<Self> {
        if k == 0 {
            return Err(GroupoidError::InvalidK(k));
        }
        Ok(GroupoidChart { kind, k })
    }

    pub fn sto(k: u32) -> Self {
        GroupoidChart::new(ChartKind::Sto, k).expect("k >= 1")
    }

    pub fn pair(k: u32) -> Self {
        GroupoidChart::new(ChartKind::Pair, k).expect("k >= 1")
    }

    fn km1(&self) -> i64 {
        self.k as i64 - 1
    }

    pub fn point(&self, z: Complex64, u: Complex64) -> Res<GroupoidPoint> {
        if self.kind == ChartKind::Pair {
            let y = u * z.powi(self.km1() as i32);
            if (Complex64::one() + y).norm() < 1e-300 {
                return Err(GroupoidError::OutsideDomain);
            }
        }
        Ok(GroupoidPoint { chart: *self, z, u })
    }

    pub fn identity(&self, z: Complex64) -> GroupoidPoint {
        GroupoidPoint {
            chart: *self,
            z,
            u: Complex64::zero(),
        }
    }

    /// `t/s` at `(z, u)`.
    pub fn ratio(&self, z: Complex64, u: Complex64) -> Complex64 {
        let y = u * z.powi(self.km1() as i32);
        match self.kind {
            ChartKind::Sto => y.exp(),
            ChartKind::Pair => Complex64::one() + y,
        }
    }

    pub fn target(&self, g: &GroupoidPoint) -> Complex64 {
        g.z * self.ratio(g.z, g.u)
    }

    /// `g2 · g1`, defined when `s(g2) = t(g1)` to relative tolerance 1e-12.
    pub fn compose(&self, g2: &GroupoidPoint, g1: &GroupoidPoint) -> Res<GroupoidPoint> {
        let t1 = self.target(g1);
        if (g2.z - t1).norm() > 1e-12 * t1.norm().max(1.0) {
            return Err(GroupoidError::NotComposable {
                s2: format!("{}", g2.z),
                t1: format!("{t1}"),
            });
        }
        let y1 = g1.u * g1.z.powi(self.km1() as i32);
        let f = match self.kind {
            ChartKind::Sto => (y1 * self.km1() as f64).exp(),
            ChartKind::Pair => (Complex64::one() + y1).powi(self.k as i32),
        };
        self.point(g1.z, g2.u * f + g1.u)
    }

    pub fn inverse(&self, g: &GroupoidPoint) -> Res<GroupoidPoint> {
        let y = g.u * g.z.powi(self.km1() as i32);
        let u = match self.kind {
            ChartKind::Sto => -g.u * (-(y * self.km1() as f64)).exp(),
            ChartKind::Pair => -g.u * (Complex64::one() + y).powi(-(self.k as i32)),
        };
        self.point(self.target(g), u)
    }

    /// Target map as a series in `(z, u)`.
    pub fn target_series(&self, prec: i64) -> Res<MultiSeries> {
        let vars = zu_vars(prec);
        let z = var(&vars, 0)?;
        let u = var(&vars, 1)?;
        let t = target_of(self.kind, self.k, &z, &u, &vars)?;
        Ok(t.restrict(&[prec, prec], None)?)
    }

    /// The additive function: `S_k` on `Sto_k`, `S′_k` on `Pair_k`; for
    /// `k = 1` both are `u` (on `Pair_1` the multiplicative coordinate is `1 + u`).
    pub fn additive_fn(&self, prec: i64) -> Res<MultiSeries> {
        let km1 = self.km1();
        let vars = zu_vars(prec);
        if km1 == 0 {
            return Ok(MultiSeries::from_terms(vars, None, [([0i64, 1], Scalar::one())])?);
        }
        // u · Σ_n c_n (u z^(k-1))^n
        let coef = |n: i64| -> Scalar {
            match self.kind {
                ChartKind::Sto => {
                    // (1 - e^{-Y})/Y with Y = (k-1) y
                    let y = Scalar::from_int(-km1).powi(n).expect("integer power");
                    let f = crate::series::factorial(n as u64 + 1);
                    &y / &Scalar::real(f)
                }
                ChartKind::Pair => {
                    // (1 - (1+y)^{-(k-1)}) / ((k-1) y)
                    let c = binomial(&Scalar::from_int(-km1), n as u64 + 1);
                    -(&c / &Scalar::from_int(km1))
                }
            }
        };
        let terms = (0..prec).map(|n| (vec![km1 * n, n + 1], coef(n)));
        Ok(MultiSeries::from_terms(vars, None, terms)?)
    }

    pub fn additive_numeric(&self, g: &GroupoidPoint) -> Complex64 {
        let km1 = self.km1();
        if km1 == 0 {
            return g.u;
        }
        let y = g.u * g.z.powi(km1 as i32);
        let k1 = km1 as f64;
        // written without the cancellation in 1 - r for small y
        match self.kind {
            ChartKind::Sto => g.u * exprel(-(y * k1)),
            ChartKind::Pair => {
                let w = Complex64::one() + y;
                let geom = (0..km1).fold(Complex64::default(), |acc, _| acc * w + 1.0);
                g.u * geom / (w.powi(km1 as i32) * k1)
            }
        }
    }
}

/// `(e^w - 1)/w`, accurate near 0.
fn exprel(w: Complex64) -> Complex64 {
    if w.norm() > 0.5 {
        return (w.exp() - 1.0) / w;
    }
    let (mut term, mut sum) = (Complex64::one(), Complex64::one());
    for n in 2..40 {
        term = term * w / n as f64;
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    sum
}

/// Target `z·(t/s)` built from series `z`, `u` by ring operations.
pub fn target_of(kind: ChartKind, k: u32, z: &MultiSeries, u: &MultiSeries, _vars: &[VarSpec]) -> Result<MultiSeries, SeriesError> {
    let y = u.mul(&z.pow(k as i64 - 1)?)?;
    let r = match kind {
        ChartKind::Sto => y.exp_series()?,
        ChartKind::Pair => y.add(&y.unit_like())?,
    };
    z.mul(&r)
}

/// `u_b · F(z, u_a) + u_a`: the `u`-coordinate of `(t(z,u_a), u_b) · (z, u_a)`.
pub fn law_series(kind: ChartKind, k: u32, z: &MultiSeries, ua: &MultiSeries, ub: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    let km1 = k as i64 - 1;
    let y = ua.mul(&z.pow(km1)?)?;
    let f = match kind {
        ChartKind::Sto => y.scale(&Scalar::from_int(km1)).exp_series()?,
        ChartKind::Pair => y.add(&y.unit_like())?.pow(k as i64)?,
    };
    ub.mul(&f)?.add(ua)
}

/// `hom_E: Sto_k → Pair_k`, `u ↦ (exp(u z^(k-1)) - 1)/z^(k-1)`, as a series.
pub fn hom_e_series(k: u32, prec: i64) -> Res<MultiSeries> {
    let km1 = k as i64 - 1;
    let terms = (0..prec).map(|n| {
        let f = crate::series::factorial(n as u64 + 1);
        (vec![km1 * n, n + 1], Scalar::real(f.recip()))
    });
    Ok(MultiSeries::from_terms(zu_vars(prec), None, terms)?)
}

pub fn hom_e_numeric(k: u32, z: Complex64, u: Complex64) -> Complex64 {
    if k == 1 {
        return u.exp() - 1.0;
    }
    let zk = z.powi(k as i32 - 1);
    let y = u * zk;
    if y.norm() < 1e-8 {
        return u * (Complex64::one() + y / 2.0 + y * y / 6.0);
    }
    (y.exp() - 1.0) / zk
}

/// `Sto_{k+1} → Sto_k`, `(z, u) ↦ (z, u z)`.
pub fn projection(z: Complex64, u: Complex64) -> (Complex64, Complex64) {
    (z, u * z)
}

/// Rewrites `f(z, u)` on `Pair_2` in the coordinates `(z, μ)`, `μ = u/(1 + z u)`,
/// by substituting `u = μ/(1 - z μ)`.
pub fn reparam_mu(f: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    let (pz, pu) = window_zu(f)?;
    let vars = vec![VarSpec::regular("z", pz), VarSpec::regular("mu", pu)];
    let one_minus = MultiSeries::from_terms(vars.clone(), None, [([0i64, 0], Scalar::one()), ([1, 1], Scalar::from_int(-1))])?;
    let mu = MultiSeries::monomial(&vars, &[0, 1], Scalar::one())?;
    let u_img = mu.mul(&one_minus.invert()?)?;
    let z_img = MultiSeries::monomial(&vars, &[1, 0], Scalar::one())?;
    let g = f.rename(&["z", "mu"])?;
    g.substitute(&[("z", &z_img), ("mu", &u_img)])
}

/// Inverse of [`reparam_mu`]: substitutes `μ = u/(1 + z u)`.
pub fn unreparam_mu(f: &MultiSeries) -> Result<MultiSeries, SeriesError> {
    let (pz, pu) = window_zu(f)?;
    let vars = vec![VarSpec::regular("z", pz), VarSpec::regular("u", pu)];
    let one_plus = MultiSeries::from_terms(vars.clone(), None, [([0i64, 0], Scalar::one()), ([1, 1], Scalar::one())])?;
    let u = MultiSeries::monomial(&vars, &[0, 1], Scalar::one())?;
    let mu_img = u.mul(&one_plus.invert()?)?;
    let z_img = MultiSeries::monomial(&vars, &[1, 0], Scalar::one())?;
    let g = f.rename(&["z", "u"])?;
    g.substitute(&[("z", &z_img), ("u", &mu_img)])
}

fn window_zu(f: &MultiSeries) -> Result<(i64, i64), SeriesError> {
    if f.nvars() != 2 || f.vars().iter().any(|v| v.low < 0 || v.ramification != 1) {
        return Err(SeriesError::VarMismatch("expected a regular series in two unramified variables".into()));
    }
    let t = f.total_prec().unwrap_or(UNBOUNDED);
    Ok((f.vars()[0].prec.min(t), f.vars()[1].prec.min(t)))
}

/// Whether the rank-one representation with residue `a` on `Sto_k` descends
/// to `Pair_k`: always for `k > 1`, and for `k = 1` exactly when `a` is a
/// Gaussian integer.
pub fn descends_to_pair(k: u32, a: &Scalar) -> bool {
    k > 1 || a.is_gaussian_integer()
}

// ---------------------------------------------------------------------------
// Axiom verification

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub chart: String,
    pub axiom: String,
    pub method: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
}

/// Polynomial fraction used for exact identities on `Pair_k`.
#[derive(Clone)]
struct Frac {
    num: MultiSeries,
    den: MultiSeries,
}

impl Frac {
    fn poly(p: MultiSeries) -> Self {
        let den = p.unit_like();
        Frac { num: p, den }
    }
    fn add(&self, o: &Frac) -> Result<Frac, SeriesError> {
        Ok(Frac {
            num: self.num.mul(&o.den)?.add(&o.num.mul(&self.den)?)?,
            den: self.den.mul(&o.den)?,
        })
    }
    fn mul(&self, o: &Frac) -> Result<Frac, SeriesError> {
        Ok(Frac {
            num: self.num.mul(&o.num)?,
            den: self.den.mul(&o.den)?,
        })
    }
    fn pow(&self, n: i64) -> Result<Frac, SeriesError> {
        if n < 0 {
            return Frac { num: self.den.clone(), den: self.num.clone() }.pow(-n);
        }
        Ok(Frac {
            num: self.num.pow(n)?,
            den: self.den.pow(n)?,
        })
    }
    fn neg(&self) -> Frac {
        Frac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn equals(&self, o: &Frac) -> Result<bool, SeriesError> {
        Ok(self.num.mul(&o.den)?.sub(&o.num.mul(&self.den)?)?.is_zero())
    }
}

struct PairLaws {
    k: u32,
}

impl PairLaws {
    fn one_plus_y(&self, z: &Frac, u: &Frac) -> Result<Frac, SeriesError> {
        let one = Frac::poly(z.num.unit_like());
        one.add(&u.mul(&z.pow(self.k as i64 - 1)?)?)
    }
    fn target(&self, z: &Frac, u: &Frac) -> Result<Frac, SeriesError> {
        z.mul(&self.one_plus_y(z, u)?)
    }
    fn law(&self, z: &Frac, ua: &Frac, ub: &Frac) -> Result<Frac, SeriesError> {
        ub.mul(&self.one_plus_y(z, ua)?.pow(self.k as i64)?)?.add(ua)
    }
    fn inverse_u(&self, z: &Frac, u: &Frac) -> Result<Frac, SeriesError> {
        Ok(u.neg().mul(&self.one_plus_y(z, u)?.pow(-(self.k as i64))?)?)
    }
}

fn exact_vars(names: &[&str]) -> Vec<VarSpec> {
    names.iter().map(|n| VarSpec::exact(*n, 1)).collect()
}

fn var(vars: &[VarSpec], i: usize) -> Result<MultiSeries, SeriesError> {
    let mut e = vec![0; vars.len()];
    e[i] = 1;
    let m = MultiSeries::monomial(vars, &e, Scalar::one())?;
    // keep the caller's window rather than the monomial's exact one
    let z = MultiSeries::new(vars.to_vec())?;
    z.add(&m)
}

fn report(chart: &GroupoidChart, axiom: &str, method: &str, passed: bool, err: Option<f64>) -> AxiomReport {
    AxiomReport {
        chart: chart.to_string(),
        axiom: axiom.into(),
        method: method.into(),
        passed,
        max_error: err,
    }
}

/// Exact checks on `Pair_k`: associativity, both identity laws, both
/// inverse laws, and additivity of `S′_k`, as identities of rational functions.
pub fn check_pair_exact(k: u32) -> Result<Vec<AxiomReport>, GroupoidError> {
    let chart = GroupoidChart::pair(k);
    let vars = exact_vars(&["z1", "u1", "u2", "u3"]);
    let z1 = Frac::poly(var(&vars, 0)?);
    let u1 = Frac::poly(var(&vars, 1)?);
    let u2 = Frac::poly(var(&vars, 2)?);
    let u3 = Frac::poly(var(&vars, 3)?);
    let zero = Frac::poly(MultiSeries::new(vars.clone())?);
    let law = PairLaws { k };
    let m = "exact rational-function identity";
    let mut out = Vec::new();

    let z2 = law.target(&z1, &u1)?;
    let lhs = law.law(&z1, &u1, &law.law(&z2, &u2, &u3)?)?;
    let rhs = law.law(&z1, &law.law(&z1, &u1, &u2)?, &u3)?;
    out.push(report(&chart, "associativity", m, lhs.equals(&rhs)?, None));

    let right_id = law.law(&z1, &zero, &u1)?;
    let left_id = law.law(&z1, &u1, &zero)?;
    out.push(report(&chart, "identity", m, right_id.equals(&u1)? && left_id.equals(&u1)?, None));

    let inv_u = law.inverse_u(&z1, &u1)?;
    let left = law.law(&z1, &u1, &inv_u)?;
    let right = law.law(&z2, &inv_u, &u1)?;
    out.push(report(&chart, "inverse", m, left.equals(&zero)? && right.equals(&zero)?, None));

    // S′ on arrows as a rational function; k = 1 uses the multiplicative 1 + u
    let s_prime = |z: &Frac, u: &Frac| -> Result<Frac, SeriesError> {
        if k == 1 {
            return law.one_plus_y(z, u);
        }
        let km1 = k as i64 - 1;
        let one = Frac::poly(z.num.unit_like());
        let inner = one.add(&law.one_plus_y(z, u)?.pow(-km1)?.neg())?;
        let zk = z.pow(km1)?;
        let scale = Frac::poly(z.num.unit_like().scale(&Scalar::ratio(1, km1)));
        inner.mul(&zk.pow(-1)?)?.mul(&scale)
    };
    let s12 = s_prime(&z1, &law.law(&z1, &u1, &u2)?)?;
    let s1 = s_prime(&z1, &u1)?;
    let s2 = s_prime(&z2, &u2)?;
    let ok = if k == 1 { s12.equals(&s1.mul(&s2)?)? } else { s12.equals(&s1.add(&s2)?)? };
    out.push(report(&chart, "additive_fn", m, ok, None));
    Ok(out)
}

fn trunc_vars(names: &[&str], degree: i64) -> Vec<VarSpec> {
    names.iter().map(|n| VarSpec::regular(*n, degree + 1)).collect()
}

fn agree_to_degree(a: &MultiSeries, b: &MultiSeries, degree: i64) -> Result<bool, SeriesError> {
    let d = a.sub(b)?;
    if !d.covers_total(degree) {
        return Ok(false);
    }
    Ok(d.truncate_total(degree)?.is_zero())
}

/// Truncated-series checks on `Sto_k` to total degree `degree` in `(z1, u1, u2, u3)`.
pub fn check_sto_series(k: u32, degree: i64) -> Result<Vec<AxiomReport>, GroupoidError> {
    let chart = GroupoidChart::sto(k);
    let kind = ChartKind::Sto;
    let vars = trunc_vars(&["z1", "u1", "u2", "u3"], degree);
    let vars: Vec<VarSpec> = vars;
    let total = Some(degree + 1);
    let mk = |i: usize| -> Result<MultiSeries, SeriesError> { var(&vars, i)?.restrict(&[UNBOUNDED; 4], total) };
    let (z1, u1, u2, u3) = (mk(0)?, mk(1)?, mk(2)?, mk(3)?);
    let zero = MultiSeries::with_total(vars.clone(), total)?;
    let m = format!("truncated series identity to total degree {degree}");
    let mut out = Vec::new();

    let z2 = target_of(kind, k, &z1, &u1, &vars)?;
    let lhs = law_series(kind, k, &z1, &u1, &law_series(kind, k, &z2, &u2, &u3)?)?;
    let rhs = law_series(kind, k, &z1, &law_series(kind, k, &z1, &u1, &u2)?, &u3)?;
    out.push(report(&chart, "associativity", &m, agree_to_degree(&lhs, &rhs, degree)?, None));

    let right_id = law_series(kind, k, &z1, &zero, &u1)?;
    let left_id = law_series(kind, k, &z1, &u1, &zero)?;
    let ok = agree_to_degree(&right_id, &u1, degree)? && agree_to_degree(&left_id, &u1, degree)?;
    out.push(report(&chart, "identity", &m, ok, None));

    let km1 = k as i64 - 1;
    let y = u1.mul(&z1.pow(km1)?)?;
    let inv_u = u1.neg().mul(&y.scale(&Scalar::from_int(-km1)).exp_series()?)?;
    let left = law_series(kind, k, &z1, &u1, &inv_u)?;
    let right = law_series(kind, k, &z2, &inv_u, &u1)?;
    let ok = agree_to_degree(&left, &zero, degree)? && agree_to_degree(&right, &zero, degree)?;
    out.push(report(&chart, "inverse", &m, ok, None));

    // S_k(g2 g1) = S_k(g2) + S_k(g1) via S_k = u (1 - e^{-Y})/Y, Y = (k-1) u z^(k-1)
    let s_of = |z: &MultiSeries, u: &MultiSeries| -> Result<MultiSeries, SeriesError> {
        if km1 == 0 {
            return Ok(u.clone());
        }
        let yy = u.mul(&z.pow(km1)?)?.scale(&Scalar::from_int(km1));
        let mut acc = u.zero_like();
        let mut p = u.clone();
        for n in 0..=degree {
            let c = Scalar::from_int(-1).powi(n).expect("unit") * Scalar::real(crate::series::factorial(n as u64 + 1).recip());
            acc = acc.add(&p.scale(&c))?;
            p = p.mul(&yy)?;
        }
        Ok(acc)
    };
    let s12 = s_of(&z1, &law_series(kind, k, &z1, &u1, &u2)?)?;
    let sum = s_of(&z1, &u1)?.add(&s_of(&z2, &u2)?)?;
    out.push(report(&chart, "additive_fn", &m, agree_to_degree(&s12, &sum, degree)?, None));
    Ok(out)
}

fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Random arrow with source `z`, kept away from the excluded curve of
/// `Pair_k` where the laws are badly conditioned.
fn rand_arrow(chart: &GroupoidChart, rng: &mut ChaCha8Rng, z: Complex64) -> Res<GroupoidPoint> {
    loop {
        let u = rand_c(rng, 0.8);
        if chart.ratio(z, u).norm() >= 0.25 {
            return chart.point(z, u);
        }
    }
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Numeric sampling of the axioms at `samples` random arrows.
pub fn check_numeric(chart: &GroupoidChart, samples: usize, seed: u64, tol: f64) -> Result<Vec<AxiomReport>, GroupoidError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut assoc, mut ident, mut inv, mut add) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..samples {
        let z1 = rand_c(&mut rng, 1.0);
        let g1 = rand_arrow(chart, &mut rng, z1)?;
        let g2 = rand_arrow(chart, &mut rng, chart.target(&g1))?;
        let g3 = rand_arrow(chart, &mut rng, chart.target(&g2))?;
        let a = chart.compose(&chart.compose(&g3, &g2)?, &g1)?;
        let b = chart.compose(&g3, &chart.compose(&g2, &g1)?)?;
        assoc = assoc.max(rel_err(a.u, b.u)).max(rel_err(a.z, b.z));

        let l = chart.compose(&g1, &chart.identity(g1.z))?;
        let r = chart.compose(&chart.identity(chart.target(&g1)), &g1)?;
        ident = ident.max(rel_err(l.u, g1.u)).max(rel_err(r.u, g1.u));

        let gi = chart.inverse(&g1)?;
        let e1 = chart.compose(&gi, &g1)?;
        let e2 = chart.compose(&g1, &gi)?;
        inv = inv.max(e1.u.norm()).max(e2.u.norm()).max(rel_err(e2.z, chart.target(&g1)));

        let g21 = chart.compose(&g2, &g1)?;
        let (s21, s1, s2) = (chart.additive_numeric(&g21), chart.additive_numeric(&g1), chart.additive_numeric(&g2));
        let e = if chart.k == 1 && chart.kind == ChartKind::Pair {
            rel_err(Complex64::one() + s21, (Complex64::one() + s1) * (Complex64::one() + s2))
        } else {
            rel_err(s21, s1 + s2)
        };
        add = add.max(e);
    }
    let m = format!("{samples} random samples, tol {tol:e}");
    Ok(vec![
        report(chart, "associativity", &m, assoc <= tol, Some(assoc)),
        report(chart, "identity", &m, ident <= tol, Some(ident)),
        report(chart, "inverse", &m, inv <= tol, Some(inv)),
        report(chart, "additive_fn", &m, add <= tol, Some(add)),
    ])
}

/// `hom_E` checks: functoriality and `t ∘ E = t` as truncated identities in
/// `(z1, u1, u2)`, plus numeric functoriality.
pub fn check_hom_e(k: u32, degree: i64, samples: usize, seed: u64, tol: f64) -> Result<Vec<AxiomReport>, GroupoidError> {
    let chart = GroupoidChart::sto(k);
    let vars = trunc_vars(&["z1", "u1", "u2"], degree);
    let total = Some(degree + 1);
    let mk = |i: usize| -> Result<MultiSeries, SeriesError> { var(&vars, i)?.restrict(&[UNBOUNDED; 3], total) };
    let (z1, u1, u2) = (mk(0)?, mk(1)?, mk(2)?);
    let h = hom_e_series(k, degree + 1)?.rename(&["z1", "u1"])?;
    let e_u = |z: &MultiSeries, u: &MultiSeries| h.substitute(&[("z1", z), ("u1", u)]);
    let m = format!("truncated series identity to total degree {degree}");
    let mut out = Vec::new();

    let z2 = target_of(ChartKind::Sto, k, &z1, &u1, &vars)?;
    let lhs = e_u(&z1, &law_series(ChartKind::Sto, k, &z1, &u1, &u2)?)?;
    let rhs = law_series(ChartKind::Pair, k, &z1, &e_u(&z1, &u1)?, &e_u(&z2, &u2)?)?;
    out.push(report(&chart, "hom_E functoriality", &m, agree_to_degree(&lhs, &rhs, degree)?, None));

    let t_pair = target_of(ChartKind::Pair, k, &z1, &e_u(&z1, &u1)?, &vars)?;
    out.push(report(&chart, "hom_E preserves target", &m, agree_to_degree(&t_pair, &z2, degree)?, None));

    let pair = GroupoidChart::pair(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let mut err = 0f64;
    for _ in 0..samples {
        let z1 = rand_c(&mut rng, 1.0);
        let g1 = rand_arrow(&chart, &mut rng, z1)?;
        let g2 = rand_arrow(&chart, &mut rng, chart.target(&g1))?;
        let e = |g: &GroupoidPoint| pair.point(g.z, hom_e_numeric(k, g.z, g.u));
        let lhs = e(&chart.compose(&g2, &g1)?)?;
        let rhs = pair.compose(&e(&g2)?, &e(&g1)?)?;
        err = err.max(rel_err(lhs.u, rhs.u));
    }
    let mm = format!("{samples} random samples, tol {tol:e}");
    out.push(report(&chart, "hom_E functoriality", &mm, err <= tol, Some(err)));
    Ok(out)
}

/// All checks for one chart, as used by `check-groupoid`.
pub fn check_groupoid(chart: &GroupoidChart, degree: i64, samples: usize, seed: u64) -> Result<Vec<AxiomReport>, GroupoidError> {
    let tol = 1e-9;
    let mut out = match chart.kind {
        ChartKind::Pair => check_pair_exact(chart.k)?,
        ChartKind::Sto => {
            let mut v = check_sto_series(chart.k, degree)?;
            v.extend(check_hom_e(chart.k, degree, samples, seed, tol)?);
            v
        }
    };
    out.extend(check_numeric(chart, samples, seed, tol)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn target_series_values() {
        let t = GroupoidChart::pair(1).target_series(5).unwrap();
        assert_eq!(t.coeff(&[1, 0]), Scalar::one());
        assert_eq!(t.coeff(&[1, 1]), Scalar::one());
        assert_eq!(t.len(), 2);
        let t = GroupoidChart::sto(2).target_series(6).unwrap();
        assert_eq!(t.coeff(&[2, 1]), Scalar::one());
        assert_eq!(t.coeff(&[3, 2]), Scalar::ratio(1, 2));
        let t = GroupoidChart::pair(3).target_series(6).unwrap();
        assert_eq!(t.coeff(&[3, 1]), Scalar::one());
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn compose_values() {
        let p = GroupoidChart::pair(2);
        let g1 = p.point(c(0.5), c(1.0 / 3.0)).unwrap();
        let g2 = p.point(p.target(&g1), c(0.2)).unwrap();
        let g = p.compose(&g2, &g1).unwrap();
        assert!((g.u.re - (49.0 / 180.0 + 1.0 / 3.0)).abs() < 1e-15);
        let id = p.point(p.target(&g1), c(0.0)).unwrap();
        assert_eq!(p.compose(&id, &g1).unwrap().u, g1.u);
        let far = p.point(c(3.0), c(0.2)).unwrap();
        assert!(p.compose(&far, &g1).is_err());
    }

    #[test]
    fn inverse_values() {
        let p = GroupoidChart::pair(2);
        let g = p.point(c(1.0), c(1.0)).unwrap();
        let i = p.inverse(&g).unwrap();
        assert_eq!(i.z, c(2.0));
        assert!((i.u.re + 0.25).abs() < 1e-15);
        let s = GroupoidChart::sto(2);
        let i = s.inverse(&s.point(c(1.0), c(1.0)).unwrap()).unwrap();
        assert!((i.z.re - std::f64::consts::E).abs() < 1e-12);
        assert!((i.u.re + (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn pair_domain() {
        assert!(GroupoidChart::pair(2).point(c(1.0), c(-1.0)).is_err());
        assert!(GroupoidChart::sto(2).point(c(1.0), c(-1.0)).is_ok());
    }

    #[test]
    fn additive_series() {
        let s = GroupoidChart::pair(2).additive_fn(5).unwrap();
        assert_eq!(s.coeff(&[0, 1]), Scalar::one());
        assert_eq!(s.coeff(&[1, 2]), Scalar::from_int(-1));
        assert_eq!(s.coeff(&[2, 3]), Scalar::one());
        let s = GroupoidChart::sto(2).additive_fn(5).unwrap();
        assert_eq!(s.coeff(&[1, 2]), Scalar::ratio(-1, 2));
        assert_eq!(s.coeff(&[2, 3]), Scalar::ratio(1, 6));
    }

    #[test]
    fn hom_e_values() {
        let h = hom_e_series(2, 5).unwrap();
        assert_eq!(h.coeff(&[1, 2]), Scalar::ratio(1, 2));
        assert_eq!(h.coeff(&[2, 3]), Scalar::ratio(1, 6));
        let v = hom_e_numeric(1, c(0.3), c(0.5));
        assert!((v.re - (0.5f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn projection_values() {
        assert_eq!(projection(c(2.0), c(3.0)), (c(2.0), c(6.0)));
    }

    #[test]
    fn mu_coordinates() {
        let u = MultiSeries::from_terms(zu_vars(6), None, [([0i64, 1], Scalar::one())]).unwrap();
        let m = reparam_mu(&u).unwrap();
        assert_eq!(m.coeff(&[0, 1]), Scalar::one());
        assert_eq!(m.coeff(&[1, 2]), Scalar::one());
        assert_eq!(m.coeff(&[2, 3]), Scalar::one());
        let s = GroupoidChart::pair(2).additive_fn(6).unwrap();
        let m = reparam_mu(&s).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.coeff(&[0, 1]), Scalar::one());
        let back = unreparam_mu(&m).unwrap();
        assert!(back.sub(&s).unwrap().is_zero());
    }

    #[test]
    fn descends() {
        assert!(descends_to_pair(1, &Scalar::from_int(2)));
        assert!(!descends_to_pair(1, &Scalar::ratio(1, 2)));
        assert!(descends_to_pair(3, &Scalar::i()));
    }

    #[test]
    fn additive_numeric_matches_closed_forms() {
        for k in 2..=5u32 {
            for kind in [ChartKind::Sto, ChartKind::Pair] {
                let chart = GroupoidChart::new(kind, k).unwrap();
                let g = chart.point(Complex64::new(0.7, 0.2), Complex64::new(0.4, -0.3)).unwrap();
                let m = (k - 1) as i32;
                let zk = g.z.powi(m);
                let y = g.u * zk;
                let r = match kind {
                    ChartKind::Sto => (-(y * m as f64)).exp(),
                    ChartKind::Pair => (Complex64::one() + y).powi(-m),
                };
                let want = (Complex64::one() - r) / (zk * m as f64);
                assert!((chart.additive_numeric(&g) - want).norm() <= 1e-14, "{chart}");
            }
        }
        // small z, where the naive form cancels
        let chart = GroupoidChart::pair(5);
        let g = chart.point(Complex64::new(1e-3, 0.0), Complex64::new(0.5, 0.0)).unwrap();
        assert!((chart.additive_numeric(&g) - 0.5).norm() <= 1e-12);
    }
}
