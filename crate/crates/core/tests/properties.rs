mod common;

use polylyap::poly::rational::{int, rat};
use polylyap::poly::{lie_derivative, parse_polynomial, Monomial, Polynomial, VectorField};
use polylyap::reductions::{sat_to_quartic, CnfInstance};
use polylyap::sos::{check_sos, BasisMode, SosVerdict};
use proptest::prelude::*;

fn poly_strategy(nvars: usize, max_degree: u32) -> impl Strategy<Value = Polynomial> {
    let monos: Vec<Monomial> = (0..=max_degree).flat_map(|d| Monomial::all_of_degree(nvars, d)).collect();
    let len = monos.len();
    prop::collection::vec((-6i64..=6, prop::bool::weighted(0.4)), len).prop_map(move |cs| {
        let terms = monos
            .iter()
            .zip(cs)
            .filter(|(_, (_, keep))| *keep)
            .map(|(m, (c, _))| (m.clone(), int(c)));
        Polynomial::from_terms(nvars, terms).unwrap()
    })
}

fn form_strategy(nvars: usize, degree: u32) -> impl Strategy<Value = Polynomial> {
    let monos = Monomial::all_of_degree(nvars, degree);
    prop::collection::vec(-9i64..=9, monos.len()).prop_map(move |cs| {
        Polynomial::from_terms(nvars, monos.iter().cloned().zip(cs.into_iter().map(int))).unwrap()
    })
}

fn field_strategy(nvars: usize) -> impl Strategy<Value = VectorField> {
    prop::collection::vec(poly_strategy(nvars, 3), nvars).prop_map(|c| VectorField::new(c).unwrap())
}

fn instance_strategy() -> impl Strategy<Value = CnfInstance> {
    (3usize..=8).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        prop::collection::vec([lit.clone(), lit.clone(), lit], 1..=6)
            .prop_map(move |cl| CnfInstance::new(n, cl).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly_strategy(3, 3), b in poly_strategy(3, 3), c in poly_strategy(3, 2)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(3), a.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly_strategy(2, 4), b in poly_strategy(2, 4), x in -5i64..=5, y in -5i64..=5) {
        let pt = [int(x), rat(y, 3)];
        let ea = a.evaluate(&pt).unwrap();
        let eb = b.evaluate(&pt).unwrap();
        prop_assert_eq!((&a * &b).evaluate(&pt).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).evaluate(&pt).unwrap(), ea + eb);
    }

    #[test]
    fn euler_identity(p in form_strategy(3, 5)) {
        prop_assert!(p.euler_residual().unwrap().is_zero());
    }

    #[test]
    fn derivative_is_linear_and_leibniz(a in poly_strategy(2, 4), b in poly_strategy(2, 4), k in -4i64..=4) {
        for i in 0..2 {
            prop_assert_eq!((&a + &b.scale(&int(k))).partial(i), &a.partial(i) + &b.partial(i).scale(&int(k)));
            prop_assert_eq!((&a * &b).partial(i), &(&a.partial(i) * &b) + &(&a * &b.partial(i)));
        }
    }

    #[test]
    fn lie_derivative_is_linear_in_v(a in poly_strategy(2, 3), b in poly_strategy(2, 3), f in field_strategy(2)) {
        let lhs = lie_derivative(&(&a + &b), &f).unwrap();
        prop_assert_eq!(lhs, &lie_derivative(&a, &f).unwrap() + &lie_derivative(&b, &f).unwrap());
    }

    #[test]
    fn text_round_trip(p in poly_strategy(3, 4)) {
        prop_assert_eq!(parse_polynomial(&p.to_text(), Some(3)).unwrap(), p);
    }

    #[test]
    fn reduction_quartic_is_sos(inst in instance_strategy()) {
        let p = sat_to_quartic(&inst);
        prop_assert_eq!(p.degree(), 4);
        match check_sos(&p, BasisMode::default_for(&p)).unwrap() {
            SosVerdict::Sos(c) => prop_assert!(c.verify_float(&p, 1e-6)),
            v => prop_assert!(false, "expected SOS, got {:?}", v),
        }
    }
}
