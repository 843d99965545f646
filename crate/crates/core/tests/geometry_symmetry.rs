use heavenly_core::geometry::{
    build_coframe, eval_coframe, metric_for, nullity_check, CoFrame, MetricChoice,
};
use heavenly_core::linalg::det;
use heavenly_core::symmetry::{
    build_covering, hierarchy_characteristic, named_characteristic, recursion_apply, verify_symmetry, Covering,
};
use heavenly_core::sysmodel::{build_system, SystemModel};
use heavenly_core::{Family, Rational};
use proptest::prelude::*;
use std::sync::OnceLock;

fn model() -> &'static SystemModel {
    static M: OnceLock<SystemModel> = OnceLock::new();
    M.get_or_init(|| build_system([0, 1, 2, 3].map(Rational::from_int)).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| Rational::new(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn frames_nondegenerate_off_locus(x in prop::array::uniform4(rational())) {
        let m = model();
        for name in ["linear-generic", "quadratic-generic"] {
            let sol = m.catalog_entry(name).unwrap();
            for cf in [build_coframe(m), CoFrame::web(m).unwrap()] {
                let d = det(&eval_coframe(m, &cf, &sol, &x).unwrap());
                prop_assert!(!d.is_zero());
            }
        }
    }

    #[test]
    fn web_leaves_are_null(x in prop::array::uniform4(rational()), l in rational()) {
        let m = model();
        let g = metric_for(m, MetricChoice::Web).unwrap();
        let sol = m.catalog_entry("quadratic-generic").unwrap();
        prop_assert!(nullity_check(m, &g, &sol, &[(x, l)]).is_ok());
    }
}

#[test]
fn covering_depth_three_compatible() {
    let cov = build_covering(model(), 3).unwrap();
    cov.check_compatibility(Family::Xi, 2).unwrap();
    for r in 0..=3 {
        assert!(verify_symmetry(&cov, &hierarchy_characteristic(r)).unwrap().accepted, "level {r}");
    }
}

#[test]
fn recursion_twice_on_every_translation() {
    let base = Covering::new(model());
    for i in 1..=4 {
        let seed = named_characteristic(&format!("translation-{i}")).unwrap();
        let (once, c1) = recursion_apply(&base, &seed).unwrap();
        assert!(verify_symmetry(&c1, &once).unwrap().accepted);
        let (twice, c2) = recursion_apply(&c1, &once).unwrap();
        assert!(verify_symmetry(&c2, &twice).unwrap().accepted);
        c2.check_compatibility(Family::Zeta, 1).unwrap();
    }
}

#[test]
fn recursion_on_hierarchy_member() {
    let cov = build_covering(model(), 1).unwrap();
    let (out, next) = recursion_apply(&cov, &hierarchy_characteristic(1)).unwrap();
    assert!(verify_symmetry(&next, &out).unwrap().accepted);
}
