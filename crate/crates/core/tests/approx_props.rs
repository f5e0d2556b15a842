//! Property tests for the approximation algebra: the definedness order is
//! an order, approximation sets are downward closed, `is_approx` coincides
//! with being below the exact injection, and exact injections are maximal.

use lazycost_core::approx::{
    demand_conses, exact, exact_tval, is_approx, is_defined, less_defined, less_defined_tval,
    size_x,
};
use lazycost_core::gen::Gen;
use lazycost_core::value::{AValue, PureValue, TVal};
use proptest::prelude::*;

fn pure_value() -> impl Strategy<Value = PureValue> {
    let leaf = prop_oneof![
        Just(PureValue::Unit),
        Just(PureValue::Nil),
        (0u64..10).prop_map(PureValue::Nat),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        (inner.clone(), inner)
            .prop_map(|(h, t)| PureValue::Cons(Box::new(h), Box::new(t)))
    })
}

fn avalue() -> impl Strategy<Value = AValue> {
    let leaf = prop_oneof![
        Just(AValue::Unit),
        Just(AValue::Nil),
        (0u64..10).prop_map(AValue::Nat),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        (tval_of(inner.clone()), tval_of(inner))
            .prop_map(|(h, t)| AValue::Cons(h, t))
    })
}

fn tval_of(inner: impl Strategy<Value = AValue>) -> impl Strategy<Value = TVal> {
    prop_oneof![
        2 => inner.prop_map(TVal::thunk),
        1 => Just(TVal::Undefined),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn less_defined_is_reflexive(a in avalue()) {
        prop_assert!(less_defined(&a, &a));
    }

    #[test]
    fn less_defined_is_antisymmetric(a in avalue(), b in avalue()) {
        if less_defined(&a, &b) && less_defined(&b, &a) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn less_defined_is_transitive(p in pure_value(), s1 in any::<u64>(), s2 in any::<u64>()) {
        // comparable chains come from repeated weakening
        let full = exact(&p);
        let mid = Gen::new(s1).weaken(&full);
        let low = Gen::new(s2).weaken(&mid);
        prop_assert!(less_defined(&mid, &full));
        prop_assert!(less_defined(&low, &mid));
        prop_assert!(less_defined(&low, &full));
    }

    #[test]
    fn exact_is_a_maximal_approximation(p in pure_value(), s in any::<u64>()) {
        let e = exact(&p);
        prop_assert!(is_approx(&e, &p));
        prop_assert!(e.fully_defined());
        // exact_max: anything above the exact injection is equal to it
        let a = Gen::new(s).approx_of(&p);
        if less_defined(&e, &a) {
            prop_assert_eq!(a, e);
        }
    }

    #[test]
    fn approx_coincides_with_below_exact(p in pure_value(), s in any::<u64>(), b in avalue()) {
        let a = Gen::new(s).approx_of(&p);
        prop_assert!(is_approx(&a, &p));
        prop_assert!(less_defined(&a, &exact(&p)));
        // and on arbitrary values the two routes agree, both ways
        prop_assert_eq!(is_approx(&b, &p), less_defined(&b, &exact(&p)));
    }

    #[test]
    fn approximation_sets_are_downward_closed(p in pure_value(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let ys = Gen::new(s1).approx_of(&p);
        let xs = Gen::new(s2).weaken(&ys);
        prop_assert!(is_approx(&ys, &p));
        prop_assert!(is_approx(&xs, &p));
        prop_assert!(less_defined(&xs, &ys));
    }

    #[test]
    fn size_x_is_monotone(p in pure_value(), s in any::<u64>()) {
        let full = exact_tval(&p);
        let sub = Gen::new(s).weaken_tval(&full);
        prop_assert!(size_x(0, &sub) <= size_x(0, &full));
        prop_assert!(size_x(1, &sub) <= size_x(1, &full));
    }

    #[test]
    fn exact_tval_is_defined(p in pure_value()) {
        prop_assert!(is_defined(&exact_tval(&p)));
    }

    #[test]
    fn literal_demands_are_approximations(p in pure_value()) {
        // a demand built from a pure value is itself a valid approximation
        // value sitting below the exact injection
        let d = lazycost_core::approx::demand_exact(&p);
        let t = d.to_tval().expect("literal demand");
        prop_assert!(less_defined_tval(&t, &exact_tval(&p)));
        prop_assert!(d.met_by_value(&exact(&p)));
    }

    #[test]
    fn conses_demand_matches_spine_length(n in 0u64..6, extra in 0u64..4) {
        let len = n + extra;
        let elems: Vec<u64> = (0..len).collect();
        let v = exact(&PureValue::list(&elems));
        prop_assert!(demand_conses(n).met_by_value(&v));
        if len > 0 {
            prop_assert!(!demand_conses(len + 1).met_by_value(&v));
        }
    }
}
