mod common;

use cpds_core::model::stack::parse_stack;
use cpds_core::{Op, Stack};
use proptest::prelude::*;

fn op_for(code: u8, n: u8) -> Op<String> {
    let k = code % n + 1;
    match code % 7 {
        0 => Op::Pop(k),
        1 if k >= 2 => Op::Push(k),
        1 | 2 => Op::PushChar("a".into()),
        3 => Op::PushChar("b".into()),
        4 => Op::Collapse,
        5 => Op::Rewrite("a".into()),
        _ => Op::Noop,
    }
}

fn run(n: u8, ca: u8, cb: u8, codes: &[u8]) -> Vec<Stack<String>> {
    let chorder = |x: &String| if x == "a" { ca } else { cb };
    let mut w = Stack::initial(n, "a".to_string(), ());
    let mut seen = vec![w.clone()];
    for &c in codes {
        let op = op_for(c, n);
        if let Op::Rewrite(x) = &op {
            if chorder(x) != chorder(&w.top_char().sym) {
                continue;
            }
        }
        if let Some(next) = w.apply(&op, chorder, ()) {
            w = next;
            seen.push(w.clone());
        }
    }
    seen
}

fn setup() -> impl Strategy<Value = (u8, u8, u8, Vec<u8>)> {
    (1u8..=3).prop_flat_map(|n| (Just(n), 1..=n, 1..=n, prop::collection::vec(any::<u8>(), 0..40)))
}

proptest! {
    #[test]
    fn reachable_stacks_are_well_formed((n, ca, cb, codes) in setup()) {
        for w in run(n, ca, cb, &codes) {
            prop_assert!(w.well_formed(), "{}", w);
            prop_assert_eq!(w.order(), n);
        }
    }

    #[test]
    fn text_form_roundtrips((n, ca, cb, codes) in setup()) {
        for w in run(n, ca, cb, &codes) {
            prop_assert_eq!(parse_stack(&w.to_string()).unwrap(), w);
        }
    }

    #[test]
    fn push_then_pop_is_identity((n, ca, cb, codes) in setup()) {
        for w in run(n, ca, cb, &codes) {
            for k in 2..=n {
                prop_assert_eq!(w.push(k, ()).unwrap().pop(k), Some(w.clone()));
            }
        }
    }

    #[test]
    fn collapse_undoes_char_push((n, ca, cb, codes) in setup()) {
        for w in run(n, ca, cb, &codes) {
            for o in 1..=n {
                let v = w.push_char("b".to_string(), o, ()).unwrap();
                prop_assert_eq!(v.collapse(o), w.pop(o));
            }
        }
    }

    #[test]
    fn pop_and_top_recompose((n, ca, cb, codes) in setup()) {
        for w in run(n, ca, cb, &codes) {
            for k in 1..=n {
                if let Some(p) = w.pop(k) {
                    prop_assert_eq!(Stack::compose(w.top(k).unwrap(), k, &p), Ok(w.clone()));
                }
            }
        }
    }
}

#[test]
fn example_stack_parses_and_prints() {
    let w = common::example1();
    assert_eq!(w.to_string(), "[[[a^1 b^1]_1 [b^1]_1]_2 [[b^0]_1]_2]_3");
    assert_eq!(w.char_count(), 4);
    assert_eq!(w.len(), 2);
}

#[test]
fn malformed_literals_are_rejected() {
    for bad in ["", "[a^1", "[a^x]_1", "[[a^0]_1 b^0]_2", "[a^0]_2"] {
        assert!(parse_stack(bad).is_err(), "{bad}");
    }
}

#[test]
fn pop_of_last_element_is_undefined() {
    let w = Stack::initial(2, "a".to_string(), ());
    assert_eq!(w.pop(1), None);
    assert_eq!(w.pop(2), None);
    assert_eq!(w.collapse(2), None);
}
