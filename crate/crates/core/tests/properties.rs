use mcflow_core::koszul::{act, compose, inverse, koszul_epsilon};
use mcflow_core::rational::rat;
use mcflow_core::{Mode, Monomial, NovikovPolynomial, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn laurent() -> impl Strategy<Value = NovikovPolynomial> {
    prop::collection::vec(((-2i64..=2, -2i64..=2), rational()), 0..4).prop_map(|terms| {
        NovikovPolynomial::from_terms(
            2,
            Mode::Localized,
            terms.into_iter().map(|((a, b), c)| (Monomial::new(vec![a, b]), c)),
        )
        .unwrap()
    })
}

fn plus() -> impl Strategy<Value = NovikovPolynomial> {
    prop::collection::vec(((0i64..=3, 0i64..=3), rational()), 0..4).prop_map(|terms| {
        NovikovPolynomial::from_terms(
            2,
            Mode::Plus,
            terms.into_iter().map(|((a, b), c)| (Monomial::new(vec![a, b]), c)),
        )
        .unwrap()
    })
}

fn perm_and_parities(d: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<u8>)> {
    let p = Just((0..d).collect::<Vec<usize>>()).prop_shuffle();
    (p.clone(), p, prop::collection::vec(0u8..=1, d))
}

proptest! {
    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.mul(&NovikovPolynomial::one(2, Mode::Localized)).unwrap(), a.clone());
    }

    #[test]
    fn plus_ring_is_closed_and_truncation_is_a_ring_map(a in plus(), b in plus(), k in 1i64..=5) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.mode(), Mode::Plus);
        prop_assert!(ab.terms().all(|(m, _)| m.is_nonnegative()));
        let lhs = ab.truncate(k);
        let rhs = a.truncate(k).mul(&b.truncate(k)).unwrap().truncate(k);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.add(&b).unwrap().truncate(k), a.truncate(k).add(&b.truncate(k)).unwrap());
    }

    #[test]
    fn word_length_is_additive(a in plus(), b in plus()) {
        if let (Some(x), Some(y)) = (a.min_word_length(), b.min_word_length()) {
            prop_assert_eq!(a.mul(&b).unwrap().min_word_length(), Some(x + y));
        }
    }

    #[test]
    fn koszul_crossed_homomorphism_in_s6((s1, s2, p) in perm_and_parities(6)) {
        let lhs = koszul_epsilon(&compose(&s1, &s2), &p);
        let rhs = koszul_epsilon(&s1, &act(&s2, &p)) ^ koszul_epsilon(&s2, &p);
        prop_assert_eq!(lhs, rhs);
        // ε(s⁻¹; s·x) = ε(s; x)
        prop_assert_eq!(koszul_epsilon(&inverse(&s1), &act(&s1, &p)), koszul_epsilon(&s1, &p));
    }
}
