use std::cmp::Ordering;

use num_bigint::BigUint;
use proptest::prelude::*;

use cpds_core::bounds::{nexp_eval, order1_floor, tower_cmp, TowerNum};

fn tower() -> impl Strategy<Value = TowerNum> {
    prop_oneof![
        (0u64..1 << 40).prop_map(|v| TowerNum { height: 0, base: BigUint::from(v) }),
        (0u64..64).prop_map(|v| TowerNum { height: 1, base: BigUint::from(v) }),
        (0u64..8).prop_map(|v| TowerNum { height: 2, base: BigUint::from(v) }),
        (0u64..6).prop_map(|v| TowerNum { height: 3, base: BigUint::from(v) }),
        (0u64..6).prop_map(|v| TowerNum { height: 5, base: BigUint::from(v) }),
    ]
}

proptest! {
    #[test]
    fn comparison_is_antisymmetric(x in tower(), y in tower()) {
        prop_assert_eq!(tower_cmp(&x, &y), tower_cmp(&y, &x).reverse());
    }

    #[test]
    fn comparison_is_reflexive(x in tower()) {
        prop_assert_eq!(tower_cmp(&x, &x), Ordering::Equal);
    }

    #[test]
    fn flattening_keeps_the_value(x in tower()) {
        let flat = nexp_eval(x.height, x.base.clone(), 1 << 12);
        prop_assert_eq!(tower_cmp(&x, &flat), Ordering::Equal);
    }

    #[test]
    fn one_more_level_never_shrinks(v in 0u64..6, h in 0u32..4) {
        let lo = TowerNum { height: h, base: BigUint::from(v) };
        let hi = TowerNum { height: h + 1, base: BigUint::from(v) };
        prop_assert_ne!(tower_cmp(&lo, &hi), Ordering::Greater);
    }

    #[test]
    fn floor_grows_with_states(q in 1u64..50, s in 1u64..50, m in 1u32..5) {
        let a = order1_floor(&BigUint::from(q), &BigUint::from(s), m);
        let b = order1_floor(&BigUint::from(q + 1), &BigUint::from(s), m);
        prop_assert!(a < b);
    }
}

#[test]
fn small_towers() {
    let b = |x: u64| BigUint::from(x);
    assert_eq!(nexp_eval(1, b(10), 64), TowerNum::flat(b(1024)));
    assert_eq!(nexp_eval(2, b(3), 64), TowerNum::flat(b(256)));
    assert_eq!(nexp_eval(2, b(7), 64).to_string(), "nexp^2(7)");
}
