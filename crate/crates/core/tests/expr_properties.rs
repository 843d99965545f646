use heavenly_core::parse::parse;
use heavenly_core::{Expr, Rational, Symbol};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-5i64..=5).prop_map(Expr::int),
        (-4i64..=4, 1i64..=4).prop_map(|(p, q)| Expr::constant(Rational::new(p, q))),
        prop::sample::select(vec![
            Symbol::x(1),
            Symbol::x(3),
            Symbol::lambda(2),
            Symbol::u(&[2]),
            Symbol::v(&[1, 4]),
            Symbol::xi(0, 1),
            Symbol::Spectral,
        ])
        .prop_map(Expr::sym),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), inner).prop_map(|(a, b)| a.try_div(&b).unwrap_or(a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn addition_associates(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn multiplication_distributes(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn zero_test_is_exact(e in expr()) {
        prop_assert!((&e - &e).is_zero());
        prop_assert!(!(&(&e + &Expr::one()) - &e).is_zero());
    }

    #[test]
    fn partials_commute(e in expr()) {
        let (s, t) = (Symbol::x(1), Symbol::u(&[2]));
        prop_assert_eq!(e.formal_derivative(s).formal_derivative(t), e.formal_derivative(t).formal_derivative(s));
    }

    #[test]
    fn division_inverts_multiplication(a in expr(), b in expr()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).try_div(&b).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(e in expr()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(&back, &e);
        // Denominator factorizations need not survive, but one re-rendering
        // is a fixed point.
        let canon = back.to_string();
        prop_assert_eq!(parse(&canon).unwrap().to_string(), canon);
    }
}
