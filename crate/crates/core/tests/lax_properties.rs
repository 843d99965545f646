use heavenly_core::lax::{lie_bracket, LambdaVF};
use heavenly_core::sysmodel::{build_system, SystemModel};
use heavenly_core::{Expr, Rational, Symbol};
use proptest::prelude::*;
use std::sync::OnceLock;

fn model() -> &'static SystemModel {
    static M: OnceLock<SystemModel> = OnceLock::new();
    M.get_or_init(|| build_system([0, 1, 2, 3].map(Rational::from_int)).unwrap())
}

fn coeff() -> impl Strategy<Value = Expr> {
    let atom = prop::sample::select(vec![
        Symbol::x(1),
        Symbol::x(2),
        Symbol::x(4),
        Symbol::u(&[]),
        Symbol::u(&[2]),
        Symbol::v(&[1]),
        Symbol::v(&[3]),
    ]);
    ((-2i64..=2), prop::collection::vec(atom, 0..=2))
        .prop_map(|(c, s)| Expr::product(std::iter::once(Expr::int(c)).chain(s.into_iter().map(Expr::sym))))
}

fn field() -> impl Strategy<Value = LambdaVF> {
    prop::array::uniform4(prop::collection::vec(coeff(), 0..=3)).prop_map(LambdaVF::from_coefficients)
}

fn d(i: u8, e: &Expr) -> heavenly_core::Result<Expr> {
    model().total_derivative(i, e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_is_bilinear(p in field(), q in field(), r in field()) {
        let lhs = lie_bracket(&p.add(&q.scale(&Expr::int(3))), &r, &d).unwrap();
        let rhs = lie_bracket(&p, &r, &d).unwrap().add(&lie_bracket(&q, &r, &d).unwrap().scale(&Expr::int(3)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_antisymmetric(p in field(), q in field()) {
        let a = lie_bracket(&p, &q, &d).unwrap();
        let b = lie_bracket(&q, &p, &d).unwrap();
        prop_assert!(a.add(&b).is_zero());
    }

    #[test]
    fn jacobi_identity(p in field(), q in field(), r in field()) {
        let br = |a: &LambdaVF, b: &LambdaVF| lie_bracket(a, b, &d).unwrap();
        let sum = br(&p, &br(&q, &r)).add(&br(&q, &br(&r, &p))).add(&br(&r, &br(&p, &q)));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn split_round_trips(p in prop::array::uniform4(prop::collection::vec(coeff(), 0..=2))) {
        let f = LambdaVF::from_coefficients(p);
        let (a, b) = f.split().unwrap();
        prop_assert_eq!(LambdaVF::unsplit(&a, &b), f);
    }
}
