use num_complex::Complex64;
use proptest::prelude::*;
use stokes_resum::series::json::{series_from_str, series_to_string};
use stokes_resum::{MultiSeries, Scalar, VarSpec};

const PREC: i64 = 6;

fn vars() -> Vec<VarSpec> {
    vec![VarSpec::regular("x", PREC), VarSpec::regular("y", PREC)]
}

fn exact_vars() -> Vec<VarSpec> {
    vec![VarSpec::exact("x", 1), VarSpec::exact("y", 1)]
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| &Scalar::ratio(a, b) + &(&Scalar::i() * &Scalar::ratio(c, d)))
}

fn terms(max_deg: i64) -> impl Strategy<Value = Vec<(Vec<i64>, Scalar)>> {
    prop::collection::vec(((0..max_deg, 0..max_deg), scalar()), 0..6)
        .prop_map(|v| v.into_iter().map(|((a, b), c)| (vec![a, b], c)).collect())
}

fn series() -> impl Strategy<Value = MultiSeries> {
    terms(PREC).prop_map(|t| MultiSeries::from_terms(vars(), None, t).unwrap())
}

/// Series with zero constant term.
fn small() -> impl Strategy<Value = MultiSeries> {
    terms(PREC).prop_map(|t| {
        let t = t.into_iter().filter(|(e, _)| e[0] + e[1] > 0);
        MultiSeries::from_terms(vars(), None, t).unwrap()
    })
}

fn poly() -> impl Strategy<Value = MultiSeries> {
    terms(4).prop_map(|t| MultiSeries::from_terms(exact_vars(), None, t).unwrap())
}

fn same(a: &MultiSeries, b: &MultiSeries) -> bool {
    a.sub(b).unwrap().is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert!(same(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
        prop_assert!(same(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        prop_assert!(same(&a.add(&b).unwrap().add(&c).unwrap(), &a.add(&b.add(&c).unwrap()).unwrap()));
        prop_assert!(same(&a.mul(&b).unwrap().mul(&c).unwrap(), &a.mul(&b.mul(&c).unwrap()).unwrap()));
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert!(same(&a.mul(&a.unit_like()).unwrap(), &a));
    }

    #[test]
    fn invert_is_inverse(c in scalar(), x in small()) {
        prop_assume!(c != Scalar::from_int(0));
        let f = x.add(&MultiSeries::constant(vars(), c).unwrap()).unwrap();
        let g = f.invert().unwrap();
        prop_assert!(same(&f.mul(&g).unwrap(), &f.unit_like()));
    }

    #[test]
    fn invert_shifted(x in small(), a in 0i64..3, b in 0i64..3) {
        let f = x.add(&x.unit_like()).unwrap().mul_monomial(&[a, b], &Scalar::ratio(2, 3)).unwrap();
        let g = f.invert().unwrap();
        prop_assert!(same(&f.mul(&g).unwrap(), &f.unit_like()));
    }

    #[test]
    fn exp_is_a_homomorphism(a in small(), b in small()) {
        let lhs = a.add(&b).unwrap().exp_series().unwrap();
        let rhs = a.exp_series().unwrap().mul(&b.exp_series().unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn binom_adds_exponents(x in small(), p in -4i64..4, q in 1i64..4, r in -4i64..4) {
        let f = x.add(&x.unit_like()).unwrap();
        let (al, be) = (Scalar::ratio(p, q), Scalar::ratio(r, q));
        let lhs = f.binom_power(&(&al + &be)).unwrap();
        let rhs = f.binom_power(&al).unwrap().mul(&f.binom_power(&be).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        prop_assert!(same(&f.binom_power(&Scalar::from_int(2)).unwrap(), &f.mul(&f).unwrap()));
        prop_assert!(same(&f.binom_power(&Scalar::from_int(-1)).unwrap(), &f.invert().unwrap()));
    }

    #[test]
    fn substitution_is_a_homomorphism(f in series(), g in series(), s in small(), t in small()) {
        let subs = [("x", &s), ("y", &t)];
        let lhs = f.mul(&g).unwrap().substitute(&subs).unwrap();
        let rhs = f.substitute(&subs).unwrap().mul(&g.substitute(&subs).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        let lhs = f.add(&g).unwrap().substitute(&subs).unwrap();
        let rhs = f.substitute(&subs).unwrap().add(&g.substitute(&subs).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn evaluation_is_a_homomorphism(f in poly(), g in poly(), px in scalar(), py in scalar()) {
        let pt = [px, py];
        let prod = f.mul(&g).unwrap().eval_exact(&pt).unwrap();
        prop_assert_eq!(prod, &f.eval_exact(&pt).unwrap() * &g.eval_exact(&pt).unwrap());
        let zn: Vec<Complex64> = pt.iter().map(Scalar::to_complex64).collect();
        let exact = f.eval_exact(&pt).unwrap().to_complex64();
        prop_assert!((f.eval_numeric(&zn) - exact).norm() <= 1e-9 * (1.0 + exact.norm()));
    }

    #[test]
    fn json_roundtrip(f in series()) {
        let back = series_from_str(&series_to_string(&f)).unwrap();
        prop_assert_eq!(back, f);
    }
}
