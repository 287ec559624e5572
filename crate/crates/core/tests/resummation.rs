use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use stokes_resum::error::ResumError;
use stokes_resum::groupoid::{ChartKind, GroupoidChart};
use stokes_resum::oracle::{cmat, euler_rho, transport, PathSpec};
use stokes_resum::resummation::{
    airy_gauge, demos, descends_to_pair, locality_probe, model_rep, resum, solve_formal_gauge,
    truncation_locality_check, ExponentialModel, FormalGauge, ModelEntry,
};
use stokes_resum::Scalar;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn euler_gauge_has_factorial_coefficients() {
    let g = solve_formal_gauge(&ExponentialModel::euler(), &demos::euler_system(), 20).unwrap();
    let mut fact = BigInt::from(1);
    for n in 0..=19i64 {
        if n > 0 {
            fact *= n;
        }
        let want = Scalar::real(BigRational::from_integer(fact.clone()));
        assert_eq!(g.phi().get(0, 1).coeff(&[n + 1]), want, "n = {n}");
    }
    assert!(g.residual().unwrap().entries().iter().all(|e| e.is_zero()));
}

#[test]
fn airy_gauge_follows_the_asymptotic_recurrence() {
    // u_k = (6k-5)(6k-3)(6k-1) / (216 (2k-1) k) u_{k-1}, v_k = -(6k+1)/(6k-1) u_k
    let g = airy_gauge(8).unwrap();
    let mut u = Scalar::from_int(1);
    for k in 1..=5i64 {
        u = &u * &Scalar::ratio((6 * k - 5) * (6 * k - 3) * (6 * k - 1), 216 * (2 * k - 1) * k);
        let v = &Scalar::ratio(-(6 * k + 1), 6 * k - 1) * &u;
        let zeta = Scalar::ratio(3, 2).powi(k).unwrap();
        let sign = Scalar::from_int(-1).powi(k).unwrap();
        // φ̂ = [[l(-ζ), l(ζ)], [-m(-ζ), m(ζ)]], in w = z^{1/2}
        let e = [3 * k];
        assert_eq!(g.phi().get(0, 1).coeff(&e), &u * &zeta);
        assert_eq!(g.phi().get(0, 0).coeff(&e), &(&u * &zeta) * &sign);
        assert_eq!(g.phi().get(1, 1).coeff(&e), &v * &zeta);
        assert_eq!(g.phi().get(1, 0).coeff(&e), -(&(&v * &zeta) * &sign));
    }
}

#[test]
fn solver_reports_mismatched_models() {
    let flipped = ModelEntry { a: Scalar::from_int(0), q: vec![(1, Scalar::from_int(-1))] };
    let wrong = ExponentialModel::new(2, 1, vec![flipped, ModelEntry::residue(Scalar::from_int(0))]).unwrap();
    let err = solve_formal_gauge(&wrong, &demos::euler_system(), 4).unwrap_err();
    assert!(matches!(err, ResumError::LeadingTermMismatch { .. }), "{err}");
}

fn diagonal(res: [(i64, i64); 2]) -> (stokes_resum::connection::MeromorphicSystem, ExponentialModel) {
    let text = format!(
        r#"{{"rank":2,"pole_order":1,"ramification":1,"matrix":[[[[0,"{}/{}","0"]],[]],[[],[[0,"{}/{}","0"]]]]}}"#,
        res[0].0, res[0].1, res[1].0, res[1].1
    );
    let sys = stokes_resum::connection::MeromorphicSystem::from_json_str(&text).unwrap();
    let entries = res.iter().map(|&(p, q)| ModelEntry::residue(Scalar::ratio(p, q))).collect();
    (sys, ExponentialModel::new(1, 1, entries).unwrap())
}

#[test]
fn solver_reports_resonance() {
    // residues 0 and 1/2: the gauge is the identity
    let (sys, model) = diagonal([(0, 1), (1, 2)]);
    let g = solve_formal_gauge(&model, &sys, 4).unwrap();
    assert!(g.phi().is_identity());
    // an integer gap leaves a free coefficient
    let (sys, model) = diagonal([(0, 1), (1, 1)]);
    let err = solve_formal_gauge(&model, &sys, 4).unwrap_err();
    assert!(matches!(err, ResumError::Resonance { .. }), "{err}");
}

#[test]
fn euler_sigma_is_the_closed_form() {
    let sigma = demos::euler_sigma(12).unwrap();
    assert!(demos::euler_mismatches(&sigma, 12).is_empty());
    // independent product form of the off-diagonal coefficients
    for i in 0..6i64 {
        for j in 0..=(12 - 2 * i - 2) {
            let prod: i64 = (i + 1..=i + j + 1).product();
            assert_eq!(sigma.psi.get(0, 1).coeff(&[i + 1, i + j + 1]), Scalar::ratio(-1, prod));
        }
    }
}

#[test]
fn euler_sigma_matches_ei_and_transport() {
    let sigma = demos::euler_sigma(40).unwrap();
    for (z, mu) in [(0.1, 0.5), (0.05, -0.3), (0.08, 0.2)] {
        let (z, mu) = (c(z, 0.0), c(mu, 0.0));
        let rho = euler_rho(z, mu).unwrap();
        let got = sigma.psi.get(0, 1).eval_numeric(&[z, mu]);
        assert!((got - rho).norm() <= 1e-10, "ρ({z}, {mu}): {got} vs {rho}");

        // the same arrow, integrated: t = z/(1 - zμ)
        let t = z / (1.0 - z * mu);
        let p = transport(&demos::euler_system(), &PathSpec::segment(z, t).unwrap(), 1e-12).unwrap();
        let series = sigma.psi.eval_numeric(&[z, mu]);
        assert!(cmat::max_abs_diff(&series, &p.matrix) <= 1e-8, "{series:?} vs {:?}", p.matrix);
    }
}

#[test]
fn airy_sigma_matches_the_displayed_matrix() {
    let sigma = demos::airy_sigma(6).unwrap();
    assert!(sigma.truncated(6).unwrap().psi.agrees_with(&demos::airy_expected()).unwrap());
    assert_eq!(sigma.psi.get(0, 0).coeff(&[3, 3]), Scalar::ratio(-7, 6));
    assert_eq!(sigma.psi.get(1, 1).coeff(&[3, 3]), Scalar::ratio(-4, 3));
    assert!(sigma.psi.entries().iter().all(|e| e.terms().all(|(x, _)| x.iter().all(|&k| k >= 0))));
}

#[test]
fn rank_one_closed_forms() {
    let n = 12;
    for k in 1..=4u32 {
        for a in [Scalar::from_int(1), Scalar::from_int(2), Scalar::ratio(1, 2), Scalar::i()] {
            for kind in [ChartKind::Sto, ChartKind::Pair] {
                if kind == ChartKind::Pair && !descends_to_pair(k, &a) {
                    continue;
                }
                let chart = GroupoidChart::new(kind, k).unwrap();
                let rep = model_rep(&ExponentialModel::rank_one(k, a.clone()).unwrap(), &chart, n).unwrap();
                let sigma = resum(&FormalGauge::identity(1, 1), &rep, None, n).unwrap();
                let s = chart.additive_fn(n + 1).unwrap();
                let closed = if kind == ChartKind::Pair && k == 1 {
                    s.add(&s.unit_like()).unwrap().binom_power(&-a.clone()).unwrap()
                } else {
                    s.scale(&-a.clone()).exp_series().unwrap()
                };
                let diff = sigma.psi.get(0, 0).sub(&closed).unwrap();
                assert!(diff.truncate_total(n).unwrap().is_zero(), "{chart}, a = {a}");
            }
        }
    }
}

#[test]
fn rank_one_sigma_matches_numerics() {
    // ψ(z) = exp(a / ((k-1) z^{k-1})), so Σ(g) = ψ(t)/ψ(z)
    for k in 2..=4u32 {
        let a = Scalar::ratio(1, 2);
        let chart = GroupoidChart::sto(k);
        let rep = model_rep(&ExponentialModel::rank_one(k, a).unwrap(), &chart, 20).unwrap();
        let sigma = resum(&FormalGauge::identity(1, 1), &rep, None, 20).unwrap();
        let g = chart.point(c(0.3, 0.1), c(0.2, -0.1)).unwrap();
        let km1 = (k - 1) as f64;
        let psi = |z: Complex64| (0.5 / (km1 * z.powi(k as i32 - 1))).exp();
        let want = psi(chart.target(&g)) / psi(g.z);
        let got = sigma.psi.get(0, 0).eval_numeric(&[g.z, g.u]);
        assert!((got - want).norm() <= 1e-9, "k = {k}: {got} vs {want}");
    }
}

#[test]
fn representation_laws_for_the_demos() {
    for sigma in [demos::euler_sigma(8).unwrap(), demos::airy_sigma(8).unwrap()] {
        assert!(sigma.identity_check().unwrap());
        assert!(sigma.multiplicativity_check(8).unwrap());
    }
}

#[test]
fn truncation_locality() {
    for n in [4, 8] {
        for inputs in [demos::euler_inputs(n).unwrap(), demos::airy_inputs(n).unwrap()] {
            assert!(truncation_locality_check(&inputs, n, 11).unwrap());
            // the probe does see perturbations inside the window
            assert!(!locality_probe(&inputs, n, n, 11).unwrap());
        }
    }
}

fn small_scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3, -2i64..=2).prop_map(|(p, q, i)| &Scalar::ratio(p, q) + &(&Scalar::i() * &Scalar::from_int(i)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rank_one_representations_are_multiplicative(a in small_scalar(), k in 1u32..4, pair in any::<bool>()) {
        let kind = if pair && descends_to_pair(k, &a) { ChartKind::Pair } else { ChartKind::Sto };
        let chart = GroupoidChart::new(kind, k).unwrap();
        let rep = model_rep(&ExponentialModel::rank_one(k, a).unwrap(), &chart, 6).unwrap();
        let sigma = resum(&FormalGauge::identity(1, 1), &rep, None, 6).unwrap();
        prop_assert!(sigma.identity_check().unwrap());
        prop_assert!(sigma.multiplicativity_check(6).unwrap());
    }

    #[test]
    fn locality_for_random_seeds(seed in any::<u64>()) {
        let inputs = demos::euler_inputs(5).unwrap();
        prop_assert!(truncation_locality_check(&inputs, 5, seed).unwrap());
    }
}
