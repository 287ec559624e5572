use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ResumError, SeriesError};
use crate::groupoid::GroupoidChart;
use crate::series::scalar::parse_rat;
use crate::series::{MatSeries, MultiSeries, Scalar};

use super::gauge::FormalGauge;
use super::model::{model_rep, ratio_power, work_vars, y_series, ExponentialModel};
use super::rep::{Coordinates, GroupoidRepresentation};

type Res<T> = Result<T, ResumError>;

/// Diagonal pre-gauge `H = diag(z^{h_i})` with rational exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreGauge {
    exponents: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct PreGaugeJson {
    exponents: Vec<String>,
}

impl PreGauge {
    pub fn new(exponents: Vec<BigRational>) -> Self {
        PreGauge { exponents }
    }

    /// `diag(z^{1/4}, z^{-1/4})`.
    pub fn airy() -> Self {
        let q = |p: i64| BigRational::new(p.into(), 4.into());
        PreGauge::new(vec![q(1), q(-1)])
    }

    pub fn exponents(&self) -> &[BigRational] {
        &self.exponents
    }

    /// Smallest ramification making every `h_i - h_j` an integer exponent.
    pub fn ramification(&self) -> u32 {
        let mut l = BigInt::one();
        for a in &self.exponents {
            for b in &self.exponents {
                l = l.lcm((a - b).denom());
            }
        }
        l.to_u32().expect("small denominator")
    }

    fn max_gap(&self) -> BigRational {
        let mut m = BigRational::zero();
        for a in &self.exponents {
            for b in &self.exponents {
                m = m.max(a - b);
            }
        }
        m
    }

    /// `r·max(h_i - h_j)` for a ramification `r` that makes it integral.
    fn max_gap_times(&self, r: i64) -> i64 {
        (self.max_gap() * BigRational::from_integer(r.into())).to_integer().to_i64().expect("small")
    }

    /// `max(h_i - h_j)` rounded up: extra degrees of input needed.
    pub fn spread(&self) -> i64 {
        self.max_gap().ceil().to_integer().to_i64().expect("small spread")
    }

    /// `{"exponents": ["1/4", "-1/4"]}`.
    pub fn from_json_str(text: &str) -> Res<Self> {
        let j: PreGaugeJson = serde_json::from_str(text).map_err(|e| SeriesError::Parse(e.to_string()))?;
        let exponents = j.exponents.iter().map(|s| parse_rat(s)).collect::<Result<_, _>>()?;
        Ok(PreGauge { exponents })
    }

    pub fn to_json_string(&self) -> String {
        let j = PreGaugeJson { exponents: self.exponents.iter().map(|e| e.to_string()).collect() };
        serde_json::to_string(&j).expect("serializable")
    }
}

/// Degree of `φ̂` and `Ψ̂₁` needed for output degree `n`.
pub fn required_degree(n: i64, pre_gauge: Option<&PreGauge>) -> i64 {
    n + pre_gauge.map_or(0, PreGauge::spread)
}

/// `Σ = t*(Hφ̂) · Ψ̂₁ · (s*(Hφ̂))⁻¹` through total degree `n`.
///
/// Works in `(w, v)` with `w^R = z`, `v^R = u`, where `R` is the common
/// ramification, so that one total bound truncates by degree. Every term
/// with a negative or fractional power of `z` must cancel; the output is in
/// the coordinates of `psi1`.
pub fn resum(
    phi: &FormalGauge,
    psi1: &GroupoidRepresentation,
    pre_gauge: Option<&PreGauge>,
    n: i64,
) -> Res<GroupoidRepresentation> {
    let rank = phi.rank();
    if psi1.rank() != rank || pre_gauge.is_some_and(|h| h.exponents.len() != rank) {
        return Err(ResumError::Incompatible("gauge, representation and pre-gauge ranks differ".into()));
    }
    if n < 0 {
        return Err(SeriesError::WindowExhausted(format!("degree {n}")).into());
    }
    let coords = psi1.coords;
    let psi1 = psi1.to_standard()?;
    let chart = psi1.chart;
    let k = chart.k;
    let (rz, ru) = (psi1.psi.vars()[0].ramification, psi1.psi.vars()[1].ramification);
    let big = [phi.ramification(), rz, ru, pre_gauge.map_or(1, PreGauge::ramification)]
        .iter()
        .fold(1u32, |a, b| a.lcm(b));
    let r = big as i64;
    let spread = pre_gauge.map_or(0, |h| h.max_gap_times(r));
    let total = r * (n + 1) + spread;
    let vars = work_vars(big, total);

    let y = y_series(k, big, total)?;
    let w = MultiSeries::from_terms(vars.clone(), Some(total), [(vec![1, 0], Scalar::one())])?;
    let w_t = w.mul(&ratio_power(chart.kind, &y, &Scalar::ratio(1, r))?)?;

    let phi_r = phi
        .phi()
        .map(|_, _, e| e.rename(&["z"])?.scale_exponents(&[big / phi.ramification()])?.restrict(&[total], None))?;
    let t_phi = phi_r.substitute(&[("z", &w_t)])?;
    let s_phi_inv = phi_r.mat_invert()?.embed(&vars)?;
    let psi = psi1
        .psi
        .map(|_, _, e| e.rename(&["z", "u"])?.scale_exponents(&[big / rz, big / ru])?.restrict_total(total))?;
    let mut sigma = t_phi.mul(&psi)?.mul(&s_phi_inv)?;

    if let Some(h) = pre_gauge {
        let rr = BigRational::from_integer(r.into());
        let shift = |i: usize, j: usize| {
            ((&h.exponents[i] - &h.exponents[j]) * &rr).to_integer().to_i64().expect("small exponent")
        };
        let rho: Vec<MultiSeries> = h
            .exponents
            .iter()
            .map(|e| ratio_power(chart.kind, &y, &Scalar::real(e.clone())))
            .collect::<Result<_, _>>()?;
        sigma = sigma.map(|i, j, e| e.mul(&rho[i])?.mul_monomial(&[shift(i, j), 0], &Scalar::one()))?;
    }

    let mut entries = Vec::with_capacity(rank * rank);
    for i in 0..rank {
        for j in 0..rank {
            entries.push(finish_entry(sigma.get(i, j), (i, j), big, n, pre_gauge)?);
        }
    }
    let out = MatSeries::new(rank, rank, entries)?;
    let rep = GroupoidRepresentation { chart, coords: Coordinates::Standard, psi: out };
    match coords {
        Coordinates::Standard => Ok(rep),
        Coordinates::Mu => rep.to_mu()?.truncated(n),
    }
}

/// Cuts an entry of the working matrix to degree `n`, checks that only
/// integral powers of `z` survive, and returns to `(z, u)`.
fn finish_entry(
    e: &MultiSeries,
    (row, col): (usize, usize),
    big: u32,
    n: i64,
    pre_gauge: Option<&PreGauge>,
) -> Res<MultiSeries> {
    let r = big as i64;
    let e = e.restrict_total(r * n + 1)?;
    if let Some((x, c)) = e.terms().find(|(x, _)| x[0] < 0 || x[0] % r != 0 || x[1] % r != 0) {
        return Err(ResumError::CancellationFailure {
            row,
            col,
            term: format!("z^({}/{r}) u^({}/{r})", x[0], x[1]),
            coeff: c.to_string(),
        });
    }
    let e = e.regularized()?;
    if !e.covers_total(r * n) {
        return Err(SeriesError::WindowExhausted(format!(
            "entry ({row},{col}) does not reach degree {n}; supply inputs through degree {}",
            required_degree(n, pre_gauge)
        ))
        .into());
    }
    Ok(e.unscale_exponents(&[big, big])?.restrict_total(n + 1)?)
}

/// Everything needed to run one resummation.
#[derive(Clone, Debug)]
pub struct ResumInputs {
    pub gauge: FormalGauge,
    pub model: ExponentialModel,
    pub chart: GroupoidChart,
    pub pre_gauge: Option<PreGauge>,
    pub coords: Coordinates,
}

impl ResumInputs {
    /// The model representation at the degree `resum` needs for output `n`.
    pub fn psi1(&self, n: i64) -> Res<GroupoidRepresentation> {
        let rep = model_rep(&self.model, &self.chart, required_degree(n, self.pre_gauge.as_ref()))?;
        match self.coords {
            Coordinates::Standard => Ok(rep),
            Coordinates::Mu => rep.to_mu(),
        }
    }

    pub fn run(&self, n: i64) -> Res<GroupoidRepresentation> {
        resum(&self.gauge, &self.psi1(n)?, self.pre_gauge.as_ref(), n)
    }
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let p: i64 = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
    Scalar::ratio(p, rng.gen_range(1..=7))
}

/// Adds random terms of `z`-degree `d` and `d + 1` to every entry of `φ̂`.
fn perturb_gauge(g: &FormalGauge, d: i64, seed: u64) -> Res<FormalGauge> {
    let r = g.ramification() as i64;
    let phi = g.phi().map(|i, j, e| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i * 31 + j) as u64));
        let terms: Vec<_> = (r * d..r * (d + 2)).map(|x| (vec![x], random_scalar(&mut rng))).collect();
        e.add(&MultiSeries::from_terms(e.vars().to_vec(), e.total_prec(), terms)?)
    })?;
    FormalGauge::new(phi)
}

/// Adds random terms of total degree `d` and `d + 1` to every entry of `Ψ̂₁`.
fn perturb_rep(rep: &GroupoidRepresentation, d: i64, seed: u64) -> Res<GroupoidRepresentation> {
    let vars = rep.psi.vars();
    let (rz, ru) = (vars[0].ramification as i64, vars[1].ramification as i64);
    let psi = rep.psi.map(|i, j, e| {
        let mut local = ChaCha8Rng::seed_from_u64(seed ^ ((i * 31 + j) as u64));
        let mut terms = Vec::new();
        for deg in [d, d + 1] {
            for b in 0..=deg {
                terms.push((vec![rz * (deg - b), ru * b], random_scalar(&mut local)));
            }
        }
        e.add(&MultiSeries::from_terms(e.vars().to_vec(), e.total_prec(), terms)?)
    })?;
    Ok(GroupoidRepresentation { psi, ..rep.clone() })
}

/// Whether perturbing `φ̂` and `Ψ̂₁` in degrees `d` and `d + 1` leaves the
/// degree `<= n` part of `Σ` unchanged. Use `d <= n` to confirm that the
/// probe does see changes.
pub fn locality_probe(inputs: &ResumInputs, n: i64, d: i64, seed: u64) -> Res<bool> {
    let psi1 = inputs.psi1(n)?;
    let base = resum(&inputs.gauge, &psi1, inputs.pre_gauge.as_ref(), n)?;
    let gauge = perturb_gauge(&inputs.gauge, d, seed)?;
    let psi1 = perturb_rep(&psi1, d, seed.rotate_left(17))?;
    match resum(&gauge, &psi1, inputs.pre_gauge.as_ref(), n) {
        Ok(moved) => Ok(base.psi.agrees_with(&moved.psi)?),
        // a perturbed gauge no longer intertwines, so fractional terms may survive
        Err(ResumError::CancellationFailure { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// [`locality_probe`] with perturbations just above degree `n`.
pub fn truncation_locality_check(inputs: &ResumInputs, n: i64, seed: u64) -> Res<bool> {
    locality_probe(inputs, n, n + 1, seed)
}
