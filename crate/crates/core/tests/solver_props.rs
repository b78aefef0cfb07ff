mod common;

use cpds_core::solver::{brute_force, expand_arena, solve, solve_parity, solve_safety, Arena, BruteCaps, Limits, SolveError};
use cpds_core::{Condition, Player};
use proptest::prelude::*;

fn arena(max: usize) -> impl Strategy<Value = Arena> {
    (1..=max).prop_flat_map(|n| {
        let node = (any::<bool>(), 0u32..=3, prop::collection::vec(0..n as u32, 1..=3));
        prop::collection::vec(node, n).prop_map(move |nodes| {
            let owner = nodes.iter().map(|(e, _, _)| if *e { Player::E } else { Player::A }).collect();
            let rank = nodes.iter().map(|(_, r, _)| *r).collect();
            let succ = nodes
                .into_iter()
                .map(|(_, _, mut s)| {
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect();
            Arena::from_graph(owner, rank, succ, 0, Condition::Parity)
        })
    })
}

fn as_safety(a: &Arena) -> Arena {
    let rank = a.rank.iter().map(|r| if r % 2 == 1 { 1 } else { 2 }).collect();
    Arena::from_graph(a.owner.clone(), rank, a.succ.clone(), a.initial, Condition::Safety)
}

/// Every node of a region has a strategy edge (own nodes) or only edges (opponent
/// nodes) staying inside the region. `only_e` restricts the check to E's region.
fn closed(a: &Arena, win_e: &[bool], strategy: &[Option<u32>], only_e: bool) -> bool {
    (0..a.len()).filter(|&v| !only_e || win_e[v]).all(|v| {
        let mine = if win_e[v] { Player::E } else { Player::A };
        let succ = &a.succ[v];
        if a.owner[v] == mine {
            strategy[v].is_some_and(|w| succ.contains(&w) && win_e[w as usize] == win_e[v])
        } else {
            succ.iter().all(|&w| win_e[w as usize] == win_e[v])
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parity_matches_brute_force(a in arena(7)) {
        let fast = solve_parity(&a);
        prop_assert_eq!(&fast.win_e, &brute_force(&a, BruteCaps::default()).unwrap());
        prop_assert!(closed(&a, &fast.win_e, &fast.strategy, false));
    }

    #[test]
    fn safety_matches_brute_force(a in arena(7)) {
        let s = as_safety(&a);
        let fast = solve_safety(&s).unwrap();
        prop_assert_eq!(&fast.win_e, &brute_force(&s, BruteCaps::default()).unwrap());
        prop_assert!(closed(&s, &fast.win_e, &fast.strategy, true));
        prop_assert!((0..s.len()).all(|v| !fast.win_e[v] || s.rank[v] == 2));
    }
}

#[test]
fn safety_solver_rejects_parity_ranks() {
    let a = Arena::from_graph(vec![Player::E], vec![3], vec![vec![0]], 0, Condition::Safety);
    assert!(matches!(solve_safety(&a), Err(SolveError::NotSafety { node: 0, rank: 3 })));
}

#[test]
fn brute_force_refuses_large_arenas() {
    let n = 12;
    let a = Arena::from_graph(vec![Player::E; n], vec![0; n], (0..n as u32).map(|v| vec![(v + 1) % n as u32]).collect(), 0, Condition::Parity);
    assert!(brute_force(&a, BruteCaps::default()).is_err());
}

#[test]
fn expansion_is_deterministic_and_bounded() {
    let g = common::odd_pusher();
    let a = expand_arena(&*g, common::limits()).unwrap();
    let b = expand_arena(&*g, common::limits()).unwrap();
    assert_eq!(a.succ, b.succ);
    assert_eq!(solve(&a).unwrap().winner, Player::E);
    let tight = Limits { max_nodes: 2, ..Limits::default() };
    assert!(expand_arena(&*g, tight).is_err());
}

#[test]
fn adversarial_fixture_is_won_by_e() {
    let a = expand_arena(&*common::adversarial(), common::limits()).unwrap();
    assert_eq!(solve(&a).unwrap().winner, Player::E);
}
