//! Acceptance criteria, one line each. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use stokes_resum::connection::{pushforward, MeromorphicSystem};
use stokes_resum::groupoid::{check_groupoid, ChartKind, GroupoidChart};
use stokes_resum::oracle::{airy_wronskian, cmat, euler_rho, transport, PathSpec};
use stokes_resum::resummation::{
    delta_psi_numeric, demos, descends_to_pair, model_rep, resum, solve_formal_gauge, truncation_locality_check,
    ExponentialModel, FormalGauge, GroupoidRepresentation,
};
use stokes_resum::{MatSeries, MultiSeries, Scalar, VarSpec};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Harness {
    failed: usize,
}

impl Harness {
    fn check(&mut self, id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let (mut ok, mut detail) = match out {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(l) = limit {
            if took > l {
                ok = false;
                detail.push_str(&format!("; over the {l:?} limit"));
            }
        }
        if !ok {
            self.failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2}. {name} ({:.0} ms): {detail}", took.as_secs_f64() * 1e3);
    }
}

fn euler_exact() -> Outcome {
    // all i + j <= 12; the highest monomial z^13 μ^13 has total degree 26
    let n = 26;
    let sigma = demos::euler_sigma(n)?;
    let mut bad = 0;
    let mut count = 0;
    for i in 0..=12i64 {
        for j in 0..=12 - i {
            let prod = (i + 1..=i + j + 1).fold(num_bigint::BigInt::from(1), |p, m| p * m);
            let want = Scalar::real(num_rational::BigRational::new((-1).into(), prod));
            if sigma.psi.get(0, 1).coeff(&[i + 1, i + j + 1]) != want {
                bad += 1;
            }
            count += 1;
        }
    }
    let rest = demos::euler_mismatches(&sigma, n).len();
    Ok((bad == 0 && rest == 0, format!("{count} coefficients, {bad} wrong; {rest} mismatches elsewhere through degree {n}")))
}

fn euler_numeric() -> Outcome {
    let sigma = demos::euler_sigma(40)?;
    let (z, mu) = (c(0.1, 0.0), c(0.5, 0.0));
    let got = sigma.psi.get(0, 1).eval_numeric(&[z, mu]);
    let want = euler_rho(z, mu)?;
    let err = (got - want).norm();
    Ok((err <= 1e-10, format!("|Σ₁₂ − ρ| = {err:.2e} at (1/10, 1/2), ρ = {:.15}", want.re)))
}

fn gauge_factorials() -> Outcome {
    let g = solve_formal_gauge(&ExponentialModel::euler(), &demos::euler_system(), 21)?;
    let mut fact = num_bigint::BigInt::from(1);
    let mut bad = Vec::new();
    for n in 0..=20i64 {
        if n > 0 {
            fact *= n;
        }
        let want = Scalar::real(num_rational::BigRational::from_integer(fact.clone()));
        if g.phi().get(0, 1).coeff(&[n + 1]) != want {
            bad.push(n);
        }
    }
    let residual = g.residual()?.entries().iter().all(MultiSeries::is_zero);
    Ok((bad.is_empty() && residual, format!("f̂_n = n! for n <= 20 (wrong at {bad:?}); residual zero: {residual}")))
}

/// The displayed matrix, typed in independently of the library's golden copy.
fn airy_display() -> Result<MatSeries, Box<dyn std::error::Error>> {
    let vars = vec![VarSpec::regular("z", 7), VarSpec::regular("u", 7)];
    let s = |t: &[(i64, i64, i64, i64)]| {
        MultiSeries::from_terms(vars.clone(), Some(7), t.iter().map(|&(zp, up, p, q)| (vec![zp, up], Scalar::ratio(p, q))))
    };
    // (z power, u power, coefficient)
    let e11 = s(&[(0, 0, 1, 1), (1, 2, 1, 2), (3, 3, -7, 6), (2, 4, 1, 24)])?;
    let e12 = s(&[(1, 1, -1, 1), (3, 2, 1, 1), (2, 3, -1, 6)])?;
    let e21 = s(&[(0, 1, -1, 1), (2, 2, 3, 2), (1, 3, -1, 6)])?;
    let e22 = s(&[(0, 0, 1, 1), (1, 2, 1, 2), (3, 3, -4, 3), (2, 4, 1, 24)])?;
    Ok(MatSeries::new(2, 2, vec![e11, e12, e21, e22])?)
}

fn airy_exact() -> Outcome {
    let sigma = demos::airy_sigma(6)?;
    let low = sigma.truncated(6)?;
    let ok = low.psi.agrees_with(&airy_display()?)? && low.psi.agrees_with(&demos::airy_expected())?;
    let regular = sigma.psi.entries().iter().all(|e| e.terms().all(|(x, _)| x.iter().all(|&k| k >= 0)));
    let integral = sigma.psi.vars().iter().all(|v| v.ramification == 1);
    Ok((ok && regular && integral, format!("exact match: {ok}; no negative powers: {regular}; no fractional powers: {integral}")))
}

fn airy_numeric() -> Outcome {
    let sigma = demos::airy_sigma(30)?;
    let chart = GroupoidChart::pair(3);
    let (z, u) = (c(0.2, 0.0), c(0.1, 0.0));
    let g = chart.point(z, u)?;
    let series = sigma.psi.eval_numeric(&[z, u]);
    let numeric = delta_psi_numeric(demos::airy_fundamental, &chart, &g)?;
    let e1 = cmat::rel_diff(&series, &numeric);

    // companion system: its fundamental matrix is diag(1, −z)·(Airy fundamental)
    let t = chart.target(&g);
    let p = transport(&demos::airy_companion_system(), &PathSpec::segment(z, t)?, 1e-12)?;
    let h = |w: Complex64| vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), -w]];
    let hinv_t = cmat::inverse(&h(t)).ok_or("singular")?;
    let conj = cmat::mul(&cmat::mul(&hinv_t, &p.matrix), &h(z));
    let e2 = cmat::rel_diff(&series, &conj);
    Ok((e1 <= 1e-6 && e2 <= 1e-6, format!("vs Ai/Bi at 1/s = 5: {e1:.2e}; vs companion transport: {e2:.2e}")))
}

fn wronskian() -> Outcome {
    let pts = demos::wronskian_points();
    let mut worst = 0.0f64;
    for x in &pts {
        worst = worst.max((airy_wronskian(*x)? - 1.0 / PI).norm());
    }
    Ok((pts.len() == 20 && worst <= 1e-12, format!("{} points, max |W − 1/π| = {worst:.2e}", pts.len())))
}

fn groupoid_axioms() -> Outcome {
    let mut total = 0;
    let mut failed = Vec::new();
    let charts = (1..=5).map(GroupoidChart::pair).chain((1..=4).map(GroupoidChart::sto));
    for chart in charts {
        for r in check_groupoid(&chart, 10, 100, 20240901)? {
            total += 1;
            if !r.passed {
                failed.push(format!("{} {} ({})", r.chart, r.axiom, r.method));
            }
        }
    }
    Ok((failed.is_empty(), format!("{total} checks, failures: {failed:?}")))
}

fn rank_one_sigmas(n: i64) -> Result<Vec<(String, GroupoidRepresentation, MultiSeries)>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    for k in 1..=4u32 {
        for a in [Scalar::from_int(1), Scalar::from_int(2), Scalar::ratio(1, 2), Scalar::i()] {
            for kind in [ChartKind::Sto, ChartKind::Pair] {
                if kind == ChartKind::Pair && !descends_to_pair(k, &a) {
                    continue;
                }
                let chart = GroupoidChart::new(kind, k)?;
                let rep = model_rep(&ExponentialModel::rank_one(k, a.clone())?, &chart, n)?;
                let sigma = resum(&FormalGauge::identity(1, 1), &rep, None, n)?;
                let s = chart.additive_fn(n + 1)?;
                let closed = if kind == ChartKind::Pair && k == 1 {
                    s.add(&s.unit_like())?.binom_power(&-a.clone())?
                } else {
                    s.scale(&-a.clone()).exp_series()?
                };
                out.push((format!("{chart} a={a}"), sigma, closed));
            }
        }
    }
    Ok(out)
}

fn rank_one() -> Outcome {
    let n = 12;
    let cases = rank_one_sigmas(n)?;
    let mut bad = Vec::new();
    for (name, sigma, closed) in &cases {
        if !sigma.psi.get(0, 0).sub(closed)?.truncate_total(n)?.is_zero() {
            bad.push(name.clone());
        }
    }
    Ok((bad.is_empty(), format!("{} cases to degree {n}, failures: {bad:?}", cases.len())))
}

fn pushforward_regression() -> Outcome {
    let (a0, a1) = (Scalar::gaussian((5, 3), (-1, 2)), Scalar::ratio(-7, 4));
    let text = format!(
        r#"{{"rank":1,"pole_order":3,"ramification":1,"matrix":[[[[0,"{}","{}"],[1,"{}","{}"]]]]}}"#,
        a0.to_strings().0,
        a0.to_strings().1,
        a1.to_strings().0,
        a1.to_strings().1
    );
    let down = pushforward(&MeromorphicSystem::from_json_str(&text)?, 2)?;
    let vars = vec![VarSpec::exact("w", 1)];
    let half = Scalar::ratio(1, 2);
    let p = |t: &[(i64, Scalar)]| MultiSeries::from_terms(vars.clone(), None, t.iter().map(|(e, x)| (vec![*e], &half * x)));
    let want = [p(&[(0, a0.clone())])?, p(&[(1, a1.clone())])?, p(&[(0, a1.clone())])?, p(&[(0, a0), (1, Scalar::from_int(1))])?];
    let ok = down.pole_order() == 2
        && down.matrix().entries().iter().zip(&want).all(|(g, w)| g.terms().eq(w.terms()));
    Ok((ok, format!("½[[A₀, wA₁], [A₁, A₀ + w]] w⁻² dw, pole order {}", down.pole_order())))
}

fn locality() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in [4, 8] {
        let e = truncation_locality_check(&demos::euler_inputs(n)?, n, 97)?;
        let a = truncation_locality_check(&demos::airy_inputs(n)?, n, 97)?;
        ok &= e && a;
        rows.push(format!("N={n}: Euler {e}, Airy {a}"));
    }
    Ok((ok, rows.join("; ")))
}

fn representation() -> Outcome {
    let mut sigmas: Vec<(String, GroupoidRepresentation)> =
        vec![("Euler".into(), demos::euler_sigma(8)?), ("Airy".into(), demos::airy_sigma(8)?)];
    sigmas.extend(rank_one_sigmas(8)?.into_iter().map(|(n, s, _)| (n, s)));
    let mut bad = Vec::new();
    for (name, s) in &sigmas {
        if !(s.identity_check()? && s.multiplicativity_check(8)?) {
            bad.push(name.clone());
        }
    }
    Ok((bad.is_empty(), format!("{} outputs, Ψ|u=0 = 1 and Ψ(g₂g₁) = Ψ(g₂)Ψ(g₁) to degree 8; failures: {bad:?}", sigmas.len())))
}

fn main() {
    let mut h = Harness { failed: 0 };
    let s = Duration::from_secs;
    h.check(1, "Euler exact coefficients", Some(s(2)), euler_exact);
    h.check(2, "Euler numeric closed form", None, euler_numeric);
    h.check(3, "gauge solver golden series", None, gauge_factorials);
    h.check(4, "Airy exact matrix", Some(s(10)), airy_exact);
    h.check(5, "Airy numeric cross-check", None, airy_numeric);
    h.check(6, "Airy Wronskian", None, wronskian);
    h.check(7, "groupoid axioms", Some(s(5)), groupoid_axioms);
    h.check(8, "rank-one closed forms", None, rank_one);
    h.check(9, "pushforward regression", None, pushforward_regression);
    h.check(10, "truncation locality", None, locality);
    h.check(11, "representation property", None, representation);
    println!("{} of 11 criteria passed", 11 - h.failed);
    if h.failed > 0 {
        std::process::exit(1);
    }
}
