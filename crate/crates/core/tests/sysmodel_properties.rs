use heavenly_core::sysmodel::{build_system, SystemModel};
use heavenly_core::{Expr, Rational, Symbol};
use proptest::prelude::*;
use std::sync::OnceLock;

fn model() -> &'static SystemModel {
    static M: OnceLock<SystemModel> = OnceLock::new();
    M.get_or_init(|| build_system([0, 1, 2, 3].map(Rational::from_int)).unwrap())
}

fn jet() -> impl Strategy<Value = Expr> {
    let idx = prop::collection::vec(1u8..=4, 0..=4);
    (prop::bool::ANY, idx).prop_map(|(is_u, i)| Expr::sym(if is_u { Symbol::u(&i) } else { Symbol::v(&i) }))
}

/// Small polynomials in jets up to order four, principal ones included.
fn jet_poly() -> impl Strategy<Value = Expr> {
    let term = ((-3i64..=3), prop::collection::vec(jet(), 1..=2))
        .prop_map(|(c, js)| Expr::product(std::iter::once(Expr::int(c)).chain(js)));
    prop::collection::vec(term, 1..=3).prop_map(Expr::sum)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduce_is_idempotent(e in jet_poly()) {
        let m = model();
        let r = m.reduce(&e);
        prop_assert_eq!(m.reduce(&r), r);
    }

    #[test]
    fn reduce_respects_products(a in jet_poly(), b in jet_poly()) {
        let m = model();
        prop_assert_eq!(m.reduce(&(&a * &b)), m.reduce(&(&m.reduce(&a) * &m.reduce(&b))));
    }

    #[test]
    fn reduce_commutes_with_free_derivatives(e in jet_poly(), i in 1u8..=2) {
        let m = model();
        let lhs = m.reduce(&m.total_derivative(i, &m.reduce(&e)).unwrap());
        let rhs = m.reduce(&m.total_derivative(i, &e).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn translations_are_local_symmetries() {
    let m = model();
    for i in 1..=4u8 {
        let (ru, rv) = m.linearization_local(&Expr::sym(Symbol::u(&[i])), &Expr::sym(Symbol::v(&[i]))).unwrap();
        assert!(ru.is_zero() && rv.is_zero(), "translation {i}");
    }
}

#[test]
fn catalog_solves_system_symbolically() {
    for m in [model().clone(), SystemModel::symbolic()] {
        for sol in m.solution_catalog().unwrap() {
            for (name, r) in m.residuals(&sol).unwrap() {
                assert!(r.is_zero(), "{} {name}", sol.descriptor);
            }
        }
    }
}
