use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::connection::MeromorphicSystem;
use crate::error::{ResumError, SeriesError};
use crate::groupoid::{ChartKind, GroupoidChart};
use crate::series::json::value_str;
use crate::series::{MatSeries, MultiSeries, Scalar, VarSpec};

use super::rep::{Coordinates, GroupoidRepresentation};

type Res<T> = Result<T, ResumError>;

/// One diagonal entry `ψ = z^{-a} e^{-q}` with `q = Σ c·w^{-m}`, `w = z^{1/r}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelEntry {
    pub a: Scalar,
    /// `(m, c)` pairs with `m >= 1`.
    pub q: Vec<(i64, Scalar)>,
}

impl ModelEntry {
    pub fn residue(a: Scalar) -> Self {
        ModelEntry { a, q: Vec::new() }
    }
}

/// A diagonal model `d + diag(a_i z^{-1} + q_i′(z)) dz` with known solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialModel {
    pole_order: u32,
    ramification: u32,
    entries: Vec<ModelEntry>,
}

impl ExponentialModel {
    /// Each `m` must satisfy `1 <= m <= (k-1)·r`.
    pub fn new(pole_order: u32, ramification: u32, entries: Vec<ModelEntry>) -> Res<Self> {
        if pole_order == 0 || ramification == 0 || entries.is_empty() {
            return Err(ResumError::Incompatible(format!(
                "model needs k >= 1, r >= 1 and rank >= 1 (got k = {pole_order}, r = {ramification}, rank {})",
                entries.len()
            )));
        }
        let bound = (pole_order as i64 - 1) * ramification as i64;
        for (i, e) in entries.iter().enumerate() {
            for (m, _) in &e.q {
                if *m < 1 || *m > bound {
                    return Err(ResumError::DegreeBound { entry: i, degree: *m, bound });
                }
            }
        }
        Ok(ExponentialModel { pole_order, ramification, entries })
    }

    /// `ψ = exp(a z^{-(k-1)}/(k-1))` for `k > 1` and `ψ = z^{-a}` for `k = 1`.
    pub fn rank_one(k: u32, a: Scalar) -> Res<Self> {
        let entry = if k == 1 {
            ModelEntry::residue(a)
        } else {
            let km1 = k as i64 - 1;
            ModelEntry { a: Scalar::zero(), q: vec![(km1, -(&a / &Scalar::from_int(km1)))] }
        };
        Self::new(k, 1, vec![entry])
    }

    /// `diag(e^{-1/z}, 1)`, the model of the Euler system.
    pub fn euler() -> Self {
        let e1 = ModelEntry { a: Scalar::zero(), q: vec![(1, Scalar::one())] };
        Self::new(2, 1, vec![e1, ModelEntry::residue(Scalar::zero())]).expect("valid model")
    }

    /// `diag(e^{-(2/3) z^{-3/2}}, e^{(2/3) z^{-3/2}})` on ramification 2.
    pub fn airy() -> Self {
        let q = |s: i64| ModelEntry { a: Scalar::zero(), q: vec![(3, Scalar::ratio(s * 2, 3))] };
        Self::new(3, 2, vec![q(1), q(-1)]).expect("valid model")
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    pub fn ramification(&self) -> u32 {
        self.ramification
    }

    pub fn entries(&self) -> &[ModelEntry] {
        &self.entries
    }

    /// The diagonal system solved by the model, in `w` with ramification `r`.
    pub fn induced_system(&self) -> Res<MeromorphicSystem> {
        let r = self.ramification as i64;
        let d = r * (self.pole_order as i64 - 1);
        let n = self.rank();
        let rows: Vec<Vec<Vec<(i64, Scalar)>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i != j {
                            return Vec::new();
                        }
                        let e = &self.entries[i];
                        let mut p = vec![(d, e.a.clone())];
                        for (m, c) in &e.q {
                            p.push((d - m, -(&(c * &Scalar::from_int(*m)) / &Scalar::from_int(r))));
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        Ok(MeromorphicSystem::from_polys("z", self.ramification, self.pole_order, &rows)?)
    }
}

/// Variables `z`, `u` sharing ramification `ram`, truncated at raw total `total`.
/// With equal ramifications the raw total is `ram` times the degree.
pub(crate) fn work_vars(ram: u32, total: i64) -> Vec<VarSpec> {
    vec![VarSpec::new("z", ram, 0, total), VarSpec::new("u", ram, 0, total)]
}

/// `y = u z^{k-1}` on the working window.
pub(crate) fn y_series(k: u32, ram: u32, total: i64) -> Result<MultiSeries, SeriesError> {
    let vars = work_vars(ram, total);
    let r = ram as i64;
    MultiSeries::from_terms(vars, Some(total), [(vec![r * (k as i64 - 1), r], Scalar::one())])
}

/// `(t/s)^α` on the chart, as a series in `y`.
pub(crate) fn ratio_power(kind: ChartKind, y: &MultiSeries, alpha: &Scalar) -> Result<MultiSeries, SeriesError> {
    match kind {
        ChartKind::Pair => y.add(&y.unit_like())?.binom_power(alpha),
        ChartKind::Sto => y.scale(alpha).exp_series(),
    }
}

/// `Σ_n g_n yⁿ` summed until the window is exhausted.
fn power_sum(y: &MultiSeries, coef: impl Fn(u64) -> Scalar) -> Result<MultiSeries, SeriesError> {
    let mut acc = y.zero_like().add(&y.scale(&Scalar::zero()))?;
    let mut p = y.unit_like();
    let mut n = 0u64;
    loop {
        if n > 0 {
            p = p.mul(y)?;
        }
        if n > 0 && p.is_zero() {
            break;
        }
        acc = acc.add(&p.scale(&coef(n)))?;
        n += 1;
    }
    Ok(acc)
}

/// Diagonal model representation on the working window `(z, u)`, both with
/// ramification `ram` (a multiple of the model's), raw total bound `total`.
pub(crate) fn model_rep_work(model: &ExponentialModel, kind: ChartKind, ram: u32, total: i64) -> Res<MatSeries> {
    let r = model.ramification as i64;
    let big = ram as i64;
    if big % r != 0 {
        return Err(ResumError::Incompatible(format!("ramification {ram} is not a multiple of {r}")));
    }
    let k = model.pole_order;
    let y = y_series(k, ram, total)?;
    let vars = y.vars().to_vec();
    let n = model.rank();
    let mut diag = Vec::with_capacity(n);
    for e in &model.entries {
        let mut psi = ratio_power(kind, &y, &-e.a.clone())?;
        let mut irr = MultiSeries::with_total(vars.clone(), Some(total))?;
        for (m, c) in &e.q {
            // q(s) - q(t) = c z^{-m/r}(1 - (t/s)^{-m/r}) = c u z^{k-1-m/r} g(y)
            let beta = Scalar::ratio(-m, r);
            let g = match kind {
                ChartKind::Pair => power_sum(&y, |n| -crate::series::binomial(&beta, n + 1))?,
                ChartKind::Sto => power_sum(&y, |n| {
                    let f = crate::series::factorial(n + 1);
                    -(&beta.powi(n as i64 + 1).expect("nonzero base") / &Scalar::real(f))
                })?,
            };
            let shift = [big * (k as i64 - 1) - m * big / r, big];
            irr = irr.add(&g.mul_monomial(&shift, c)?)?;
        }
        if !irr.is_zero() {
            psi = psi.mul(&irr.exp_series()?)?;
        }
        diag.push(psi.restrict_total(total)?);
    }
    let zero = MultiSeries::with_total(vars.clone(), Some(total))?;
    Ok(MatSeries::from_fn(n, n, |i, j| Ok(if i == j { diag[i].clone() } else { zero.clone() }))?)
}

/// Closed-form groupoid representation of the model, through total degree
/// `degree` in `(z, u)`.
///
/// For a ramified model `z` and `u` both carry ramification `r`, so one raw
/// total bound `r·(degree + 1)` truncates by degree.
pub fn model_rep(model: &ExponentialModel, chart: &GroupoidChart, degree: i64) -> Res<GroupoidRepresentation> {
    if chart.k != model.pole_order {
        return Err(ResumError::Incompatible(format!(
            "model has pole order {} but chart is {chart}",
            model.pole_order
        )));
    }
    if degree < 0 {
        return Err(SeriesError::WindowExhausted(format!("degree {degree}")).into());
    }
    let r = model.ramification;
    let psi = model_rep_work(model, chart.kind, r, r as i64 * (degree + 1))?;
    Ok(GroupoidRepresentation { chart: *chart, coords: Coordinates::Standard, psi })
}

// ---------------------------------------------------------------------------
// JSON: {"rank", "pole_order", "ramification",
//        "entries": [{"a": ["re", "im"], "q": [[exponent, "re", "im"], …]}]}
// where exponents of w are negative.

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ModelJson {
    pub rank: usize,
    pub pole_order: u32,
    pub ramification: u32,
    pub entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct EntryJson {
    pub a: [Value; 2],
    #[serde(default)]
    pub q: Vec<Vec<Value>>,
}

impl TryFrom<&ModelJson> for ExponentialModel {
    type Error = ResumError;

    fn try_from(j: &ModelJson) -> Res<Self> {
        if j.entries.len() != j.rank {
            return Err(SeriesError::Parse(format!("rank {} but {} entries", j.rank, j.entries.len())).into());
        }
        let mut entries = Vec::with_capacity(j.rank);
        for e in &j.entries {
            let a = Scalar::from_strings(&value_str(&e.a[0])?, &value_str(&e.a[1])?)?;
            let mut q = Vec::with_capacity(e.q.len());
            for t in &e.q {
                if t.len() != 3 {
                    return Err(SeriesError::Parse(format!("q term {t:?} is not [exponent, re, im]")).into());
                }
                let x = t[0].as_i64().ok_or_else(|| SeriesError::Parse(format!("bad exponent {}", t[0])))?;
                q.push((-x, Scalar::from_strings(&value_str(&t[1])?, &value_str(&t[2])?)?));
            }
            entries.push(ModelEntry { a, q });
        }
        ExponentialModel::new(j.pole_order, j.ramification, entries)
    }
}

impl From<&ExponentialModel> for ModelJson {
    fn from(m: &ExponentialModel) -> Self {
        let s = |c: &Scalar| {
            let (re, im) = c.to_strings();
            [Value::from(re), Value::from(im)]
        };
        ModelJson {
            rank: m.rank(),
            pole_order: m.pole_order,
            ramification: m.ramification,
            entries: m
                .entries
                .iter()
                .map(|e| EntryJson {
                    a: s(&e.a),
                    q: e
                        .q
                        .iter()
                        .map(|(x, c)| {
                            let [re, im] = s(c);
                            vec![Value::from(-x), re, im]
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl ExponentialModel {
    pub fn from_json_str(text: &str) -> Res<Self> {
        let j: ModelJson = serde_json::from_str(text).map_err(|e| SeriesError::Parse(e.to_string()))?;
        ExponentialModel::try_from(&j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&ModelJson::from(self)).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_induced_system() {
        let sys = ExponentialModel::euler().induced_system().unwrap();
        let a = sys.matrix();
        assert_eq!(a.get(0, 0).coeff(&[0]), Scalar::from_int(-1));
        assert!(a.get(1, 1).is_zero());
    }

    #[test]
    fn degree_bound() {
        let e = ModelEntry { a: Scalar::zero(), q: vec![(3, Scalar::one())] };
        let err = ExponentialModel::new(2, 1, vec![e]).unwrap_err();
        assert!(matches!(err, ResumError::DegreeBound { entry: 0, degree: 3, bound: 1 }));
    }

    #[test]
    fn json_roundtrip() {
        let m = ExponentialModel::airy();
        let again = ExponentialModel::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn pair_one_residue() {
        // (1+u)^{-2}
        let m = ExponentialModel::rank_one(1, Scalar::from_int(2)).unwrap();
        let rep = model_rep(&m, &GroupoidChart::pair(1), 5).unwrap();
        let p = rep.psi.get(0, 0);
        assert_eq!(p.coeff(&[0, 1]), Scalar::from_int(-2));
        assert_eq!(p.coeff(&[0, 2]), Scalar::from_int(3));
        assert_eq!(p.coeff(&[0, 5]), Scalar::from_int(-6));
    }
}
