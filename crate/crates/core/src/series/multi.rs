//! Truncated multivariate Laurent series with per-variable exponent windows.
//!
//! A series records, besides its stored coefficients, the region of exponent
//! space where its coefficients are *known*: the rectangle `low_i <= e_i < prec_i`
//! intersected with an optional total-degree bound `Σ e_i < total_prec`.
//! Every coefficient in that region that is not stored is exactly zero.
//! Coefficients outside it are unknown and never reported.
//!
//! `low` is a promise about the whole (untruncated) series: no term of it,
//! known or not, has an exponent below `low`. Operations rely on this to
//! propagate windows conservatively, so `low` is never tightened from the
//! stored terms alone.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::SeriesError;

/// Sentinel for a window with no upper bound.
pub const UNBOUNDED: i64 = i64::MAX / 8;
pub const MAX_VARS: usize = 4;

type Res<T> = Result<T, SeriesError>;

fn norm(p: i64) -> i64 {
    if p >= UNBOUNDED / 2 {
        UNBOUNDED
    } else if p <= -UNBOUNDED / 2 {
        -UNBOUNDED
    } else {
        p
    }
}

fn wadd(a: i64, b: i64) -> i64 {
    if a >= UNBOUNDED / 2 || b >= UNBOUNDED / 2 {
        return UNBOUNDED;
    }
    norm(a.saturating_add(b))
}

fn wmul(a: i64, b: i64) -> i64 {
    norm(a.saturating_mul(b))
}

fn opt_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSpec {
    pub name: String,
    /// Exponent `e` stands for `z^(e/ramification)`.
    pub ramification: u32,
    pub low: i64,
    pub prec: i64,
}

impl VarSpec {
    pub fn new(name: impl Into<String>, ramification: u32, low: i64, prec: i64) -> Self {
        VarSpec {
            name: name.into(),
            ramification,
            low,
            prec,
        }
    }

    /// Unramified, `low = 0`.
    pub fn regular(name: impl Into<String>, prec: i64) -> Self {
        VarSpec::new(name, 1, 0, prec)
    }

    /// Regular variable with no upper truncation.
    pub fn exact(name: impl Into<String>, ramification: u32) -> Self {
        VarSpec::new(name, ramification, 0, UNBOUNDED)
    }

    pub fn is_bounded(&self) -> bool {
        self.prec < UNBOUNDED
    }

    fn same_kind(&self, o: &VarSpec) -> bool {
        self.name == o.name && self.ramification == o.ramification
    }
}

/// Exponent tuple, padded with zeros up to [`MAX_VARS`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(pub [i64; MAX_VARS]);

impl Mono {
    pub fn from_slice(e: &[i64]) -> Self {
        let mut m = [0; MAX_VARS];
        m[..e.len()].copy_from_slice(e);
        Mono(m)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    fn add(&self, o: &Mono) -> Mono {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0) {
            *a += b;
        }
        Mono(m)
    }
}

/// Graded lexicographic: total degree first, then lexicographic.
impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.total().cmp(&o.total()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiSeries {
    vars: Vec<VarSpec>,
    total_prec: Option<i64>,
    coeffs: BTreeMap<Mono, Scalar>,
}

impl MultiSeries {
    /// The zero series on the given window.
    pub fn new(vars: Vec<VarSpec>) -> Res<Self> {
        Self::with_total(vars, None)
    }

    pub fn with_total(vars: Vec<VarSpec>, total_prec: Option<i64>) -> Res<Self> {
        if vars.is_empty() || vars.len() > MAX_VARS {
            return Err(SeriesError::InvalidWindow(format!(
                "{} variables (1 to {MAX_VARS} supported)",
                vars.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.ramification == 0 {
                return Err(SeriesError::InvalidWindow(format!("{}: ramification 0", v.name)));
            }
            if v.low >= v.prec {
                return Err(SeriesError::WindowExhausted(format!(
                    "{}: low {} >= prec {}",
                    v.name, v.low, v.prec
                )));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(SeriesError::InvalidWindow(format!("duplicate variable {}", v.name)));
            }
        }
        let vars: Vec<VarSpec> = vars
            .into_iter()
            .map(|mut v| {
                v.prec = norm(v.prec);
                v
            })
            .collect();
        let total_prec = total_prec.map(norm).filter(|&t| t < UNBOUNDED);
        if let Some(t) = total_prec {
            let lt: i64 = vars.iter().map(|v| v.low).sum();
            if t <= lt {
                return Err(SeriesError::WindowExhausted(format!(
                    "total precision {t} <= sum of lows {lt}"
                )));
            }
        }
        Ok(MultiSeries {
            vars,
            total_prec,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn constant(vars: Vec<VarSpec>, c: Scalar) -> Res<Self> {
        let n = vars.len();
        Self::from_terms(vars, None, [(vec![0; n], c)])
    }

    pub fn one(vars: Vec<VarSpec>) -> Res<Self> {
        Self::constant(vars, Scalar::one())
    }

    /// An exact monomial `c·x^e`: the window is `[e, ∞)` in every variable.
    /// Only names and ramifications are taken from `like`.
    pub fn monomial(like: &[VarSpec], exps: &[i64], c: Scalar) -> Res<Self> {
        let vars = like
            .iter()
            .zip(exps)
            .map(|(v, &e)| VarSpec::new(v.name.clone(), v.ramification, e, UNBOUNDED))
            .collect();
        Self::from_terms(vars, None, [(exps.to_vec(), c)])
    }

    /// Series from explicit terms. Terms outside the known window are
    /// dropped (truncation); terms below `low` are an error.
    pub fn from_terms<E: AsRef<[i64]>>(
        vars: Vec<VarSpec>,
        total_prec: Option<i64>,
        terms: impl IntoIterator<Item = (E, Scalar)>,
    ) -> Res<Self> {
        let mut s = Self::with_total(vars, total_prec)?;
        for (e, c) in terms {
            let e = e.as_ref();
            if e.len() != s.vars.len() {
                return Err(SeriesError::Shape(format!(
                    "exponent tuple of length {} for {} variables",
                    e.len(),
                    s.vars.len()
                )));
            }
            let m = Mono::from_slice(e);
            if s.below_low(&m) {
                return Err(SeriesError::InvalidWindow(format!("term {e:?} below low")));
            }
            if s.known(&m) {
                s.accumulate(m, &c);
            }
        }
        Ok(s)
    }

    pub(crate) fn from_parts(
        vars: Vec<VarSpec>,
        total_prec: Option<i64>,
        coeffs: BTreeMap<Mono, Scalar>,
    ) -> Res<Self> {
        let mut s = Self::with_total(vars, total_prec)?;
        for (m, c) in coeffs {
            if !c.is_zero() && s.known(&m) && !s.below_low(&m) {
                s.coeffs.insert(m, c);
            }
        }
        Ok(s)
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn total_prec(&self) -> Option<i64> {
        self.total_prec
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: &[i64]) -> Scalar {
        self.coeffs.get(&Mono::from_slice(e)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeffs.get(&Mono::default()).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Stored terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &Scalar)> + '_ {
        let n = self.vars.len();
        self.coeffs.iter().map(move |(m, c)| (&m.0[..n], c))
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<Mono, Scalar> {
        &self.coeffs
    }

    /// Whether the coefficient at `e` is determined by this series.
    pub fn is_known(&self, e: &[i64]) -> bool {
        let m = Mono::from_slice(e);
        !self.below_low(&m) && self.known(&m)
    }

    fn known(&self, m: &Mono) -> bool {
        self.vars.iter().enumerate().all(|(i, v)| m.0[i] < v.prec)
            && self.total_prec.is_none_or(|t| m.total() < t)
    }

    fn below_low(&self, m: &Mono) -> bool {
        self.vars.iter().enumerate().any(|(i, v)| m.0[i] < v.low)
    }

    fn accumulate(&mut self, m: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.coeffs.remove(&m);
                }
            }
            None => {
                self.coeffs.insert(m, c.clone());
            }
        }
    }

    fn check_compat(&self, o: &MultiSeries) -> Res<()> {
        if self.vars.len() != o.vars.len()
            || self.vars.iter().zip(&o.vars).any(|(a, b)| !a.same_kind(b))
        {
            return Err(SeriesError::VarMismatch(format!(
                "[{}] vs [{}]",
                self.describe_vars(),
                o.describe_vars()
            )));
        }
        Ok(())
    }

    /// True when both series have the same variable names and ramifications.
    pub fn compatible(&self, o: &MultiSeries) -> bool {
        self.check_compat(o).is_ok()
    }

    fn describe_vars(&self) -> String {
        self.vars
            .iter()
            .map(|v| format!("{}/{}", v.name, v.ramification))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Lowest total degree any term (known or unknown) can have.
    pub fn ordtot(&self) -> i64 {
        let stored = self.coeffs.keys().next().map(|m| m.total()).unwrap_or(UNBOUNDED);
        stored.min(self.unknown_ordtot())
    }

    fn unknown_ordtot(&self) -> i64 {
        let lows: i64 = self.vars.iter().map(|v| v.low).sum();
        let mut m = self.total_prec.unwrap_or(UNBOUNDED);
        for v in &self.vars {
            m = m.min(wadd(v.prec, lows - v.low));
        }
        m
    }

    /// Lowest exponent of variable `i` among stored terms.
    pub fn min_stored(&self, i: usize) -> Option<i64> {
        self.coeffs.keys().map(|m| m.0[i]).min()
    }

    pub fn max_stored(&self, i: usize) -> Option<i64> {
        self.coeffs.keys().map(|m| m.0[i]).max()
    }

    /// Shrinks the window: per-variable `prec` (elementwise min) and total bound.
    pub fn restrict(&self, prec: &[i64], total: Option<i64>) -> Res<Self> {
        let vars = self
            .vars
            .iter()
            .zip(prec)
            .map(|(v, &p)| VarSpec { prec: v.prec.min(p), ..v.clone() })
            .collect();
        Self::from_parts(vars, opt_min(self.total_prec, total), self.coeffs.clone())
    }

    pub fn restrict_total(&self, total: i64) -> Res<Self> {
        let p = vec![UNBOUNDED; self.nvars()];
        self.restrict(&p, Some(total))
    }

    /// True when every monomial of total degree `<= n` with nonnegative
    /// exponents is known.
    pub fn covers_total(&self, n: i64) -> bool {
        self.vars.iter().all(|v| v.low <= 0 && v.prec > n) && self.total_prec.is_none_or(|t| t > n)
    }

    /// Terms of total degree `<= n`, with the window cut to match.
    pub fn truncate_total(&self, n: i64) -> Res<Self> {
        if !self.covers_total(n) {
            return Err(SeriesError::WindowExhausted(format!(
                "window does not cover total degree {n}"
            )));
        }
        self.restrict_total(n + 1)
    }

    /// Same series with `low` raised to 0 where possible.
    ///
    /// Fails if a stored term has a negative exponent. Raising `low` asserts
    /// the unknown part is regular too, which the callers guarantee.
    pub fn regularized(&self) -> Res<Self> {
        if let Some((m, _)) = self.coeffs.iter().find(|(m, _)| m.0.iter().any(|&e| e < 0)) {
            return Err(SeriesError::NegativeExponents(format!("{:?}", &m.0[..self.nvars()])));
        }
        let vars = self
            .vars
            .iter()
            .map(|v| VarSpec { low: v.low.max(0), ..v.clone() })
            .collect();
        Self::from_parts(vars, self.total_prec, self.coeffs.clone())
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.values_mut() {
            *c = -&*c;
        }
        s
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            let mut s = self.clone();
            s.coeffs.clear();
            return s;
        }
        let mut s = self.clone();
        for c in s.coeffs.values_mut() {
            *c = &*c * k;
        }
        s
    }

    pub fn add(&self, o: &MultiSeries) -> Res<Self> {
        self.check_compat(o)?;
        let vars = self
            .vars
            .iter()
            .zip(&o.vars)
            .map(|(a, b)| VarSpec {
                low: a.low.min(b.low),
                prec: a.prec.min(b.prec),
                ..a.clone()
            })
            .collect();
        let mut s = Self::with_total(vars, opt_min(self.total_prec, o.total_prec))?;
        for src in [self, o] {
            for (m, c) in &src.coeffs {
                if s.known(m) {
                    s.accumulate(*m, c);
                }
            }
        }
        Ok(s)
    }

    pub fn sub(&self, o: &MultiSeries) -> Res<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MultiSeries) -> Res<Self> {
        self.check_compat(o)?;
        let vars: Vec<VarSpec> = self
            .vars
            .iter()
            .zip(&o.vars)
            .map(|(a, b)| VarSpec {
                low: a.low + b.low,
                prec: wadd(a.prec, b.low).min(wadd(b.prec, a.low)),
                ..a.clone()
            })
            .collect();
        let total = match (self.total_prec, o.total_prec) {
            (None, None) => None,
            (Some(ta), None) => Some(wadd(ta, o.ordtot())),
            (None, Some(tb)) => Some(wadd(tb, self.ordtot())),
            (Some(ta), Some(tb)) => Some(wadd(ta, o.ordtot()).min(wadd(tb, self.ordtot()))),
        };
        let mut s = Self::with_total(vars, total)?;
        let mut acc: HashMap<Mono, Scalar> = HashMap::new();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &o.coeffs {
                let m = ma.add(mb);
                if !s.known(&m) {
                    continue;
                }
                let p = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += &p,
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        s.coeffs = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(s)
    }

    /// Multiplication by the exact monomial `c·x^e`.
    pub fn mul_monomial(&self, e: &[i64], c: &Scalar) -> Res<Self> {
        if e.len() != self.nvars() {
            return Err(SeriesError::Shape("monomial length".into()));
        }
        let shift = Mono::from_slice(e);
        let vars = self
            .vars
            .iter()
            .zip(e)
            .map(|(v, &d)| VarSpec {
                low: v.low + d,
                prec: wadd(v.prec, d),
                ..v.clone()
            })
            .collect();
        let total = self.total_prec.map(|t| wadd(t, shift.total()));
        let mut s = Self::with_total(vars, total)?;
        if !c.is_zero() {
            s.coeffs = self.coeffs.iter().map(|(m, x)| (m.add(&shift), x * c)).collect();
        }
        Ok(s)
    }

    /// Non-negative integer power by repeated multiplication; negative via [`Self::invert`].
    pub fn pow(&self, n: i64) -> Res<Self> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        let mut acc = self.unit_like();
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The exact constant 1 with the same variables.
    pub fn unit_like(&self) -> Self {
        let vars = self
            .vars
            .iter()
            .map(|v| VarSpec::exact(v.name.clone(), v.ramification))
            .collect();
        MultiSeries::one(vars).expect("exact window")
    }

    /// Exact zero with the same variables and no truncation.
    pub fn zero_like(&self) -> Self {
        let vars = self
            .vars
            .iter()
            .map(|v| VarSpec::exact(v.name.clone(), v.ramification))
            .collect();
        MultiSeries::new(vars).expect("exact window")
    }

    /// Multiplicative inverse of `c·x^m·(1 + y)` with `y` regular and `y(0) = 0`.
    ///
    /// `x^m` is the componentwise minimum of the stored exponents and must
    /// itself be a stored term. The unknown part is assumed divisible by `x^m`.
    /// The result has window `low = -m`, `prec = prec - 2m`.
    pub fn invert(&self) -> Res<Self> {
        let n = self.nvars();
        let Some(first) = self.coeffs.keys().next() else {
            return Err(SeriesError::NotInvertible("zero series".into()));
        };
        let mut m = *first;
        for k in self.coeffs.keys() {
            for i in 0..n {
                m.0[i] = m.0[i].min(k.0[i]);
            }
        }
        let Some(c) = self.coeffs.get(&m) else {
            return Err(SeriesError::NotInvertible(format!(
                "no single leading monomial (componentwise minimum {:?} has zero coefficient)",
                &m.0[..n]
            )));
        };
        let cinv = c.inv()?;
        let neg_m: Vec<i64> = m.0[..n].iter().map(|e| -e).collect();
        // y = self / (c x^m), regular with constant term 1
        let shifted = self.mul_monomial(&neg_m, &cinv)?;
        let y = shifted.with_lows_zero()?;
        let x = y.sub(&y.unit_like())?;
        let inv_y = geometric(&x)?;
        inv_y.mul_monomial(&neg_m, &cinv)
    }

    fn with_lows_zero(&self) -> Res<Self> {
        let vars = self
            .vars
            .iter()
            .map(|v| VarSpec { low: 0, ..v.clone() })
            .collect();
        Self::from_parts(vars, self.total_prec, self.coeffs.clone())
    }

    /// `exp(a)` for `a` with zero constant term and no negative exponents.
    pub fn exp_series(&self) -> Res<Self> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let x = self.regularized()?;
        check_terminates(&x)?;
        let mut sum = x.unit_like();
        let mut p = x.unit_like();
        let mut n = 0i64;
        loop {
            n += 1;
            p = p.mul(&x)?.scale(&Scalar::ratio(1, n));
            sum = sum.add(&p)?;
            if p.is_zero() || n > 100_000 {
                break;
            }
        }
        Ok(sum)
    }

    /// `a^α` for `a` with constant term 1, by the generalized binomial series.
    pub fn binom_power(&self, alpha: &Scalar) -> Res<Self> {
        if self.constant_term() != Scalar::one() {
            return Err(SeriesError::ConstantNotOne);
        }
        let a = self.regularized()?;
        let x = a.sub(&a.unit_like())?;
        check_terminates(&x)?;
        let mut sum = x.unit_like();
        let mut p = x.unit_like();
        let mut coef = Scalar::one();
        let mut n = 0i64;
        // sum's window must include x's even when the series terminates early
        sum = sum.add(&x.scale(&Scalar::zero()))?;
        loop {
            coef = &coef * &(alpha - &Scalar::from_int(n)) * Scalar::ratio(1, n + 1);
            n += 1;
            if coef.is_zero() {
                break;
            }
            p = p.mul(&x)?;
            if p.is_zero() || n > 100_000 {
                break;
            }
            sum = sum.add(&p.scale(&coef))?;
        }
        Ok(sum)
    }

    /// Partial derivative in variable `i` (with respect to the stored
    /// variable, i.e. `w` rather than `z = w^r` for a ramified variable).
    pub fn derivative(&self, i: usize) -> Res<Self> {
        let mut vars = self.vars.clone();
        let v = &mut vars[i];
        v.low = if v.low == 0 { 0 } else { v.low - 1 };
        v.prec = wadd(v.prec, -1);
        if v.low >= v.prec {
            return Err(SeriesError::WindowExhausted(format!("derivative in {}", v.name)));
        }
        let total = self.total_prec.map(|t| wadd(t, -1));
        let mut s = Self::with_total(vars, total)?;
        for (m, c) in &self.coeffs {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut k = *m;
            k.0[i] -= 1;
            if s.known(&k) {
                s.accumulate(k, &(c * &Scalar::from_int(e)));
            }
        }
        Ok(s)
    }

    /// Embeds into a larger variable set, matched by name. Variables absent
    /// from `self` get exponent 0 and an exact window.
    pub fn embed(&self, like: &[VarSpec]) -> Res<Self> {
        let mut pos = Vec::with_capacity(self.nvars());
        for v in &self.vars {
            match like.iter().position(|w| w.same_kind(v)) {
                Some(p) => pos.push(p),
                None => {
                    return Err(SeriesError::VarMismatch(format!(
                        "variable {} not in target set",
                        v.name
                    )))
                }
            }
        }
        let vars: Vec<VarSpec> = like
            .iter()
            .map(|w| match self.vars.iter().position(|v| v.same_kind(w)) {
                Some(i) => self.vars[i].clone(),
                None => VarSpec::exact(w.name.clone(), w.ramification),
            })
            .collect();
        let mut s = Self::with_total(vars, self.total_prec)?;
        for (m, c) in &self.coeffs {
            let mut k = Mono::default();
            for (i, &p) in pos.iter().enumerate() {
                k.0[p] = m.0[i];
            }
            s.coeffs.insert(k, c.clone());
        }
        Ok(s)
    }

    /// Restricts to terms with exponent 0 in every variable outside `keep`,
    /// dropping those variables.
    pub fn project(&self, keep: &[&str]) -> Res<Self> {
        let idx: Vec<usize> = keep
            .iter()
            .map(|n| {
                self.var_index(n)
                    .ok_or_else(|| SeriesError::VarMismatch(format!("no variable {n}")))
            })
            .collect::<Res<_>>()?;
        let vars = idx.iter().map(|&i| self.vars[i].clone()).collect();
        let mut s = Self::with_total(vars, self.total_prec)?;
        for (m, c) in &self.coeffs {
            if (0..self.nvars()).all(|i| idx.contains(&i) || m.0[i] == 0) {
                let k: Vec<i64> = idx.iter().map(|&i| m.0[i]).collect();
                s.coeffs.insert(Mono::from_slice(&k), c.clone());
            }
        }
        Ok(s)
    }

    /// Multiplies every exponent of variable `i` by `factor` and its
    /// ramification by the same factor; the represented function is unchanged.
    pub fn reramify(&self, i: usize, factor: u32) -> Res<Self> {
        if factor == 1 {
            return Ok(self.clone());
        }
        let f = factor as i64;
        if self.total_prec.is_some() && self.vars[i].low < 0 {
            return Err(SeriesError::InvalidWindow(
                "re-ramifying a Laurent variable under a total bound".into(),
            ));
        }
        let mut vars = self.vars.clone();
        vars[i].ramification *= factor;
        vars[i].low *= f;
        vars[i].prec = wmul(vars[i].prec, f);
        let mut s = Self::with_total(vars, self.total_prec)?;
        for (m, c) in &self.coeffs {
            let mut k = *m;
            k.0[i] *= f;
            if s.known(&k) {
                s.coeffs.insert(k, c.clone());
            }
        }
        Ok(s)
    }

    /// Multiplies every exponent of variable `i` by `f[i]` and its ramification
    /// by the same factor; the represented function is unchanged.
    ///
    /// Exponents that are not multiples of the factor become known zeros, so
    /// `prec` scales exactly and a total bound scales by the smallest factor.
    pub fn scale_exponents(&self, f: &[u32]) -> Res<Self> {
        self.rescale(f, true)
    }

    /// Inverse of [`Self::scale_exponents`]: divides exponents of variable
    /// `i` by `f[i]`. Every stored exponent must be divisible.
    pub fn unscale_exponents(&self, f: &[u32]) -> Res<Self> {
        self.rescale(f, false)
    }

    fn rescale(&self, f: &[u32], up: bool) -> Res<Self> {
        let n = self.nvars();
        if f.len() != n || f.contains(&0) {
            return Err(SeriesError::Shape("one nonzero factor per variable".into()));
        }
        let fmin = *f.iter().min().expect("nonempty") as i64;
        let fmax = *f.iter().max().expect("nonempty") as i64;
        if self.total_prec.is_some() && fmin != fmax && self.vars.iter().any(|v| v.low < 0) {
            return Err(SeriesError::InvalidWindow(
                "uneven rescaling of a Laurent variable under a total bound".into(),
            ));
        }
        let mut vars = self.vars.clone();
        for (v, &k) in vars.iter_mut().zip(f) {
            let k = k as i64;
            if up {
                v.ramification *= k as u32;
                v.low *= k;
                v.prec = wmul(v.prec, k);
            } else {
                if v.ramification % k as u32 != 0 {
                    return Err(SeriesError::InvalidWindow(format!(
                        "{}: ramification {} not divisible by {k}",
                        v.name, v.ramification
                    )));
                }
                v.ramification /= k as u32;
                v.low = v.low.div_euclid(k) + i64::from(v.low.rem_euclid(k) != 0);
                if v.prec < UNBOUNDED {
                    v.prec = v.prec.div_euclid(k) + i64::from(v.prec.rem_euclid(k) != 0);
                }
            }
        }
        let total = self.total_prec.map(|t| {
            if up {
                wmul(t, fmin)
            } else {
                t.div_euclid(fmax) + i64::from(t.rem_euclid(fmax) != 0)
            }
        });
        let mut s = Self::with_total(vars, total)?;
        for (m, c) in &self.coeffs {
            let mut k = *m;
            for i in 0..n {
                let fi = f[i] as i64;
                if up {
                    k.0[i] *= fi;
                } else if k.0[i] % fi != 0 {
                    return Err(SeriesError::InvalidWindow(format!(
                        "exponent {} of {} not divisible by {fi}",
                        k.0[i], self.vars[i].name
                    )));
                } else {
                    k.0[i] /= fi;
                }
            }
            if s.known(&k) {
                s.coeffs.insert(k, c.clone());
            }
        }
        Ok(s)
    }

    /// Renames variables in order; names must stay distinct.
    pub fn rename(&self, names: &[&str]) -> Res<Self> {
        let vars = self
            .vars
            .iter()
            .zip(names)
            .map(|(v, n)| VarSpec { name: n.to_string(), ..v.clone() })
            .collect();
        Self::from_parts(vars, self.total_prec, self.coeffs.clone())
    }

    /// Applies `f` to every stored term; the window is kept.
    pub fn map_coeffs(&self, f: impl Fn(&[i64], &Scalar) -> Scalar) -> Self {
        let n = self.nvars();
        let mut s = self.clone();
        s.coeffs = self
            .coeffs
            .iter()
            .map(|(m, c)| (*m, f(&m.0[..n], c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        s
    }

    /// Double-precision evaluation at `point` (values of the stored
    /// variables), with compensated summation.
    pub fn eval_numeric(&self, point: &[Complex64]) -> Complex64 {
        let n = self.nvars();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut comp = Complex64::new(0.0, 0.0);
        for (m, c) in &self.coeffs {
            let mut t = c.to_complex64();
            for i in 0..n {
                t *= point[i].powi(m.0[i] as i32);
            }
            // Neumaier summation, per component
            let s = sum + t;
            comp.re += if sum.re.abs() >= t.re.abs() {
                (sum.re - s.re) + t.re
            } else {
                (t.re - s.re) + sum.re
            };
            comp.im += if sum.im.abs() >= t.im.abs() {
                (sum.im - s.im) + t.im
            } else {
                (t.im - s.im) + sum.im
            };
            sum = s;
        }
        sum + comp
    }

    /// Exact evaluation at a Gaussian-rational point.
    pub fn eval_exact(&self, point: &[Scalar]) -> Res<Scalar> {
        let n = self.nvars();
        let mut sum = Scalar::zero();
        let mut cache: Vec<HashMap<i64, Scalar>> = vec![HashMap::new(); n];
        for (m, c) in &self.coeffs {
            let mut t = c.clone();
            for i in 0..n {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                if !cache[i].contains_key(&e) {
                    let v = point[i].powi(e)?;
                    cache[i].insert(e, v);
                }
                t = &t * &cache[i][&e];
            }
            sum += &t;
        }
        Ok(sum)
    }

    /// Composition `f(s_1, …, s_n)`: each listed variable of `self` is replaced
    /// by the given series; the others map to the same-named variable of the
    /// output. All substituted series must share one variable set, which
    /// becomes the output's.
    ///
    /// A variable of `self` with negative exponents needs an image that
    /// [`Self::invert`] accepts. Unknown coefficients of `self` must provably
    /// land outside the output window, which is cut accordingly; when no such
    /// bound exists the substitution is refused.
    pub fn substitute(&self, subs: &[(&str, &MultiSeries)]) -> Res<Self> {
        let Some((_, first)) = subs.first() else {
            return Ok(self.clone());
        };
        for (name, s) in subs {
            first.check_compat(s)?;
            if self.var_index(name).is_none() {
                return Err(SeriesError::VarMismatch(format!("no variable {name} to substitute")));
            }
        }
        let out_like: Vec<VarSpec> = first.vars.clone();
        let no = out_like.len();
        let nf = self.nvars();

        let mut images: Vec<MultiSeries> = Vec::with_capacity(nf);
        for v in &self.vars {
            if let Some((_, s)) = subs.iter().find(|(n, _)| *n == v.name) {
                images.push((*s).clone());
            } else {
                let j = out_like.iter().position(|w| w.same_kind(v)).ok_or_else(|| {
                    SeriesError::VarMismatch(format!(
                        "variable {} is neither substituted nor present in the output",
                        v.name
                    ))
                })?;
                let mut e = vec![0; no];
                e[j] = 1;
                images.push(MultiSeries::monomial(&out_like, &e, Scalar::one())?);
            }
        }
        let mut inverses: Vec<Option<MultiSeries>> = vec![None; nf];
        for (i, v) in self.vars.iter().enumerate() {
            if v.low < 0 {
                inverses[i] = Some(images[i].invert()?);
            }
        }

        // per-variable lower bound of e_v * ord(s_v) over all admissible e_v
        let lb = |i: usize, ord: &dyn Fn(&MultiSeries) -> i64| -> Option<i64> {
            let lowf = self.vars[i].low;
            let o = ord(&images[i]);
            if lowf >= 0 {
                if o < 0 {
                    return None;
                }
                return Some(wmul(lowf, o));
            }
            let oi = ord(inverses[i].as_ref().expect("inverse computed"));
            let neg = if oi >= 0 { 0 } else { wmul(-lowf, oi) };
            if o < 0 {
                return None;
            }
            Some(neg)
        };
        let ord_j = |j: usize| move |s: &MultiSeries| s.vars[j].low;
        let ord_t = |s: &MultiSeries| s.ordtot();

        // output lows
        let mut out_low = vec![0i64; no];
        for (j, ol) in out_low.iter_mut().enumerate() {
            let oj = ord_j(j);
            let mut acc = 0i64;
            for i in 0..nf {
                match lb(i, &oj) {
                    Some(b) => acc = wadd(acc, b),
                    None => {
                        if self.vars[i].is_bounded() || !self.coeffs.is_empty() {
                            return Err(SeriesError::InfiniteTerms(format!(
                                "image of {} has negative order in {}",
                                self.vars[i].name, out_like[j].name
                            )));
                        }
                    }
                }
            }
            *ol = acc;
        }

        // caps keeping the unknown part of self out of the output window
        let mut cap = vec![UNBOUNDED; no];
        let mut cap_total: Option<i64> = None;
        for i in 0..nf {
            let pv = self.vars[i].prec;
            if pv >= UNBOUNDED {
                continue;
            }
            let rect = |j: usize| -> Option<i64> {
                let oj = ord_j(j);
                let o = images[i].vars[j].low;
                if o <= 0 {
                    return None;
                }
                let mut c = wmul(pv, o);
                for w in (0..nf).filter(|&w| w != i) {
                    c = wadd(c, lb(w, &oj)?);
                }
                Some(c)
            };
            let same = out_like.iter().position(|w| w.name == self.vars[i].name);
            let order: Vec<usize> = same.into_iter().chain((0..no).filter(|&j| Some(j) != same)).collect();
            if let Some((j, c)) = order.iter().find_map(|&j| rect(j).map(|c| (j, c))) {
                cap[j] = cap[j].min(c);
                continue;
            }
            let o = images[i].ordtot();
            let mut c = if o > 0 { Some(wmul(pv, o)) } else { None };
            for w in (0..nf).filter(|&w| w != i) {
                c = match (c, lb(w, &ord_t)) {
                    (Some(c), Some(b)) => Some(wadd(c, b)),
                    _ => None,
                };
            }
            match c {
                Some(c) => cap_total = opt_min(cap_total, Some(c)),
                None => {
                    return Err(SeriesError::InfiniteTerms(format!(
                        "unknown coefficients beyond {}^{} have no bounded image",
                        self.vars[i].name, pv
                    )))
                }
            }
        }
        if let Some(tf) = self.total_prec {
            let all_regular = self.vars.iter().all(|v| v.low >= 0);
            let omin = images.iter().map(|s| s.ordtot()).min().unwrap_or(0);
            if all_regular && omin >= 1 {
                cap_total = opt_min(cap_total, Some(wmul(tf, omin)));
            } else {
                let j = (0..no)
                    .filter(|&j| all_regular && images.iter().all(|s| s.vars[j].low >= 1))
                    .max_by_key(|&j| images.iter().map(|s| s.vars[j].low).min());
                match j {
                    Some(j) => {
                        let o = images.iter().map(|s| s.vars[j].low).min().unwrap_or(1);
                        cap[j] = cap[j].min(wmul(tf, o));
                    }
                    None => {
                        return Err(SeriesError::InfiniteTerms(
                            "unknown high-total-degree coefficients have no bounded image".into(),
                        ))
                    }
                }
            }
        }

        // intermediate truncation is safe where every factor is regular
        let regular_j: Vec<bool> = (0..no)
            .map(|j| {
                images.iter().all(|s| s.vars[j].low >= 0)
                    && inverses.iter().flatten().all(|s| s.vars[j].low >= 0)
            })
            .collect();
        let all_reg = regular_j.iter().all(|&b| b);
        let trunc_prec: Vec<i64> = (0..no)
            .map(|j| if regular_j[j] { cap[j] } else { UNBOUNDED })
            .collect();
        let trunc_total = if all_reg { cap_total } else { None };
        let trunc = |s: MultiSeries| -> Res<MultiSeries> {
            if trunc_prec.iter().all(|&p| p >= UNBOUNDED) && trunc_total.is_none() {
                Ok(s)
            } else {
                s.restrict(&trunc_prec, trunc_total)
            }
        };

        let mut powers: Vec<HashMap<i64, MultiSeries>> = vec![HashMap::new(); nf];
        let mut terms: Vec<(Mono, Scalar)> = self.coeffs.iter().map(|(m, c)| (*m, c.clone())).collect();
        terms.sort_by(|a, b| a.0 .0.cmp(&b.0 .0));

        let mut ctx = SubstCtx {
            images: &images,
            inverses: &inverses,
            powers: &mut powers,
            trunc: &trunc,
        };
        let body = ctx.eval(&terms, 0)?;

        let vars: Vec<VarSpec> = out_like
            .iter()
            .enumerate()
            .map(|(j, v)| VarSpec::new(v.name.clone(), v.ramification, out_low[j], cap[j]))
            .collect();
        let result = match body {
            Some(b) => {
                let merged: Vec<VarSpec> = vars
                    .iter()
                    .zip(&b.vars)
                    .map(|(v, w)| VarSpec { prec: v.prec.min(w.prec), ..v.clone() })
                    .collect();
                Self::from_parts(merged, opt_min(cap_total, b.total_prec), b.coeffs)?
            }
            None => Self::with_total(vars, cap_total)?,
        };
        Ok(result)
    }
}

struct SubstCtx<'a> {
    images: &'a [MultiSeries],
    inverses: &'a [Option<MultiSeries>],
    powers: &'a mut Vec<HashMap<i64, MultiSeries>>,
    trunc: &'a dyn Fn(MultiSeries) -> Res<MultiSeries>,
}

impl SubstCtx<'_> {
    fn power(&mut self, i: usize, e: i64) -> Res<MultiSeries> {
        if let Some(p) = self.powers[i].get(&e) {
            return Ok(p.clone());
        }
        let p = if e == 0 {
            self.images[i].unit_like()
        } else if e > 0 {
            let prev = self.power(i, e - 1)?;
            (self.trunc)(prev.mul(&self.images[i])?)?
        } else {
            let prev = self.power(i, e + 1)?;
            let inv = self.inverses[i].as_ref().expect("inverse computed");
            (self.trunc)(prev.mul(inv)?)?
        };
        self.powers[i].insert(e, p.clone());
        Ok(p)
    }

    /// Horner-style evaluation grouped by the leading variables.
    fn eval(&mut self, terms: &[(Mono, Scalar)], var: usize) -> Res<Option<MultiSeries>> {
        if terms.is_empty() {
            return Ok(None);
        }
        let last = var + 1 == self.images.len();
        let mut acc: Option<MultiSeries> = None;
        let mut start = 0;
        while start < terms.len() {
            let e = terms[start].0 .0[var];
            let mut end = start;
            while end < terms.len() && terms[end].0 .0[var] == e {
                end += 1;
            }
            let p = self.power(var, e)?;
            let part = if last {
                debug_assert_eq!(end - start, 1);
                p.scale(&terms[start].1)
            } else {
                match self.eval(&terms[start..end], var + 1)? {
                    Some(inner) => (self.trunc)(p.mul(&inner)?)?,
                    None => {
                        start = end;
                        continue;
                    }
                }
            };
            acc = Some(match acc {
                None => part,
                Some(a) => a.add(&part)?,
            });
            start = end;
        }
        Ok(acc)
    }
}

/// Power series in `x` terminate on the window only if every stored term of
/// `x` grows in some bounded direction.
fn check_terminates(x: &MultiSeries) -> Res<()> {
    if x.total_prec.is_some() {
        return Ok(());
    }
    let n = x.nvars();
    for m in x.coeffs.keys() {
        if !(0..n).any(|i| m.0[i] > 0 && x.vars[i].is_bounded()) {
            return Err(SeriesError::WindowExhausted(format!(
                "powers of the term {:?} never leave the unbounded window",
                &m.0[..n]
            )));
        }
    }
    Ok(())
}

/// `1/(1+x)` for regular `x` with zero constant term.
fn geometric(x: &MultiSeries) -> Res<MultiSeries> {
    check_terminates(x)?;
    let mut sum = x.unit_like().add(&x.scale(&Scalar::zero()))?;
    let mx = x.neg();
    let mut p = x.unit_like();
    for _ in 0..1_000_000 {
        p = p.mul(&mx)?;
        if p.is_zero() {
            break;
        }
        sum = sum.add(&p)?;
    }
    Ok(sum)
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let n = self.nvars();
        for (k, (m, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = (0..n)
                .filter(|&i| m.0[i] != 0)
                .map(|i| {
                    let v = &self.vars[i];
                    let name = if v.ramification == 1 {
                        v.name.clone()
                    } else {
                        format!("{}^(1/{})", v.name, v.ramification)
                    };
                    if m.0[i] == 1 {
                        name
                    } else {
                        format!("{}^{}", name, m.0[i])
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if *c == Scalar::one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", c, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiSeries[")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let p = if v.prec >= UNBOUNDED { "inf".to_string() } else { v.prec.to_string() };
            write!(f, "{}/{} in [{}, {})", v.name, v.ramification, v.low, p)?;
        }
        if let Some(t) = self.total_prec {
            write!(f, "; total < {t}")?;
        }
        write!(f, "]({self})")
    }
}

/// Generalized binomial coefficient `C(α, n)`.
pub fn binomial(alpha: &Scalar, n: u64) -> Scalar {
    let mut c = Scalar::one();
    for k in 0..n as i64 {
        c = &c * &(alpha - &Scalar::from_int(k)) * Scalar::ratio(1, k + 1);
    }
    c
}

/// `n!` as a rational.
pub fn factorial(n: u64) -> BigRational {
    let mut acc = num_bigint::BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    BigRational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(prec: i64) -> Vec<VarSpec> {
        vec![VarSpec::regular("w", prec)]
    }

    fn zu(p: i64) -> Vec<VarSpec> {
        vec![VarSpec::regular("z", p), VarSpec::regular("u", p)]
    }

    fn s(vars: Vec<VarSpec>, terms: &[(&[i64], i64, i64)]) -> MultiSeries {
        MultiSeries::from_terms(vars, None, terms.iter().map(|(e, p, q)| (e.to_vec(), Scalar::ratio(*p, *q)))).unwrap()
    }

    #[test]
    fn add_and_mul_basics() {
        let a = s(w(10), &[(&[0], 1, 1), (&[1], 1, 1)]);
        let b = s(w(10), &[(&[0], 1, 1), (&[1], -1, 1)]);
        assert_eq!(a.add(&b).unwrap(), s(w(10), &[(&[0], 2, 1)]));
        assert_eq!(a.mul(&b).unwrap(), s(w(10), &[(&[0], 1, 1), (&[2], -1, 1)]));
        let c = s(zu(5), &[(&[0, 0], 1, 1), (&[1, 1], 1, 1)]);
        let c2 = c.mul(&c).unwrap();
        assert_eq!(c2.coeff(&[1, 1]), Scalar::from_int(2));
        assert_eq!(c2.coeff(&[2, 2]), Scalar::one());
        assert_eq!(c2.len(), 3);
    }

    #[test]
    fn laurent_cancellation() {
        let inv = MultiSeries::from_terms(vec![VarSpec::new("w", 1, -1, 5)], None, [(vec![-1], Scalar::one())]).unwrap();
        let x = MultiSeries::from_terms(vec![VarSpec::new("w", 1, 1, 7)], None, [(vec![1], Scalar::one())]).unwrap();
        let p = inv.mul(&x).unwrap();
        assert_eq!(p.coeff(&[0]), Scalar::one());
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn invert_geometric() {
        let a = s(w(8), &[(&[0], 1, 1), (&[1], -1, 1)]);
        let b = a.invert().unwrap();
        for n in 0..8 {
            assert_eq!(b.coeff(&[n]), Scalar::one());
        }
        assert_eq!(a.mul(&b).unwrap(), {
            let mut one = s(w(8), &[(&[0], 1, 1)]);
            one = one.restrict(&[b.vars()[0].prec], None).unwrap();
            one
        });
        let two = s(w(4), &[(&[0], 2, 1)]);
        assert_eq!(two.invert().unwrap().coeff(&[0]), Scalar::ratio(1, 2));
    }

    #[test]
    fn invert_shifted_monomial() {
        // z(1 + zu) in (z,u)
        let a = s(zu(8), &[(&[1, 0], 1, 1), (&[2, 1], 1, 1)]);
        let b = a.invert().unwrap();
        assert_eq!(b.vars()[0].low, -1);
        assert_eq!(b.coeff(&[-1, 0]), Scalar::one());
        assert_eq!(b.coeff(&[0, 1]), Scalar::from_int(-1));
        assert_eq!(b.coeff(&[1, 2]), Scalar::one());
        let p = a.mul(&b).unwrap();
        assert_eq!(p.constant_term(), Scalar::one());
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn exp_and_binom() {
        let x = s(w(6), &[(&[1], 1, 1)]);
        let e = x.exp_series().unwrap();
        assert_eq!(e.coeff(&[3]), Scalar::ratio(1, 6));
        assert_eq!(e.coeff(&[5]), Scalar::ratio(1, 120));
        let a = s(w(6), &[(&[0], 1, 1), (&[1], 1, 1)]);
        let r = a.binom_power(&Scalar::ratio(1, 2)).unwrap();
        assert_eq!(r.coeff(&[1]), Scalar::ratio(1, 2));
        assert_eq!(r.coeff(&[2]), Scalar::ratio(-1, 8));
        assert_eq!(r.coeff(&[3]), Scalar::ratio(1, 16));
        let z = a.binom_power(&Scalar::zero()).unwrap();
        assert_eq!(z.len(), 1);
        assert!(MultiSeries::exp_series(&a).is_err());
    }

    #[test]
    fn substitute_polynomial() {
        let f = s(zu(10), &[(&[2, 0], 1, 1)]);
        let img = s(zu(10), &[(&[1, 0], 1, 1), (&[0, 1], 1, 1)]);
        let g = f.substitute(&[("z", &img)]).unwrap();
        assert_eq!(g.coeff(&[1, 1]), Scalar::from_int(2));
        assert_eq!(g.coeff(&[0, 2]), Scalar::one());
    }

    #[test]
    fn substitute_laurent() {
        // z^{-1} with z -> z(1 + zu)
        let f = MultiSeries::from_terms(
            vec![VarSpec::new("z", 1, -1, 6), VarSpec::regular("u", 6)],
            None,
            [(vec![-1, 0], Scalar::one())],
        )
        .unwrap();
        let img = MultiSeries::from_terms(
            vec![VarSpec::new("z", 1, 1, 10), VarSpec::regular("u", 10)],
            None,
            [(vec![1, 0], Scalar::one()), (vec![2, 1], Scalar::one())],
        )
        .unwrap();
        let g = f.substitute(&[("z", &img)]).unwrap();
        assert_eq!(g.coeff(&[-1, 0]), Scalar::one());
        assert_eq!(g.coeff(&[0, 1]), Scalar::from_int(-1));
        assert_eq!(g.coeff(&[1, 2]), Scalar::one());
    }

    #[test]
    fn derivative_and_eval() {
        let f = s(w(10), &[(&[3], 1, 1)]);
        let d = f.derivative(0).unwrap();
        assert_eq!(d.coeff(&[2]), Scalar::from_int(3));
        assert_eq!(d.vars()[0].prec, 9);
        let v = f.eval_numeric(&[Complex64::new(2.0, 0.0)]);
        assert!((v.re - 8.0).abs() < 1e-15);
    }

    #[test]
    fn graded_lex_order() {
        let f = s(zu(5), &[(&[0, 2], 1, 1), (&[1, 0], 1, 1), (&[2, 0], 1, 1), (&[0, 0], 1, 1)]);
        let keys: Vec<Vec<i64>> = f.terms().map(|(e, _)| e.to_vec()).collect();
        assert_eq!(keys, vec![vec![0, 0], vec![1, 0], vec![0, 2], vec![2, 0]]);
    }
}
