//! Explicit-state arenas and their solvers.

pub mod arena;
pub mod brute;
pub mod zielonka;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::model::game::{Condition, Game, Player};

pub use arena::{expand_arena, expand_from, Arena, ExpandError, ExpandOptions, Limits};
pub use brute::{brute_force, BruteCaps};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("safety solver needs ranks in {{1,2}}; node {node} has rank {rank}")]
    NotSafety { node: u32, rank: u32 },
    #[error("unsolvable: {0}")]
    Unsolvable(#[from] ExpandError),
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub winner: Player,
    pub win_e: Vec<bool>,
    /// Positional strategy: chosen successor for nodes owned by the player
    /// winning there.
    pub strategy: Vec<Option<u32>>,
    pub nodes: usize,
    pub edges: usize,
    pub elapsed: Duration,
}

impl SolveResult {
    /// `(node, successor)` pairs of the winner's strategy inside its region.
    pub fn winner_strategy(&self, arena: &Arena) -> Vec<(u32, u32)> {
        (0..arena.len())
            .filter(|&v| arena.owner[v] == self.winner && self.win_e[v] == (self.winner == Player::E))
            .filter_map(|v| self.strategy[v].map(|w| (v as u32, w)))
            .collect()
    }

    pub fn render(&self, arena: &Arena, with_strategy: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "winner: {}", self.winner);
        let _ = writeln!(s, "nodes: {}", self.nodes);
        let _ = writeln!(s, "edges: {}", self.edges);
        if with_strategy {
            let mut lines: Vec<String> = self
                .winner_strategy(arena)
                .into_iter()
                .map(|(v, w)| format!("  {} -> {}", arena.label(v), arena.label(w)))
                .collect();
            lines.sort();
            s.push_str("strategy:\n");
            for l in lines {
                s.push_str(&l);
                s.push('\n');
            }
        }
        s
    }
}

fn finish(arena: &Arena, win_e: Vec<bool>, strategy: Vec<Option<u32>>, start: Instant) -> SolveResult {
    let winner = if win_e[arena.initial as usize] { Player::E } else { Player::A };
    SolveResult { winner, win_e, strategy, nodes: arena.len(), edges: arena.edge_count(), elapsed: start.elapsed() }
}

/// A wins iff its attractor to the rank-1 nodes contains the initial node.
pub fn solve_safety(arena: &Arena) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    if let Some(v) = (0..arena.len()).find(|&v| arena.rank[v] != 1 && arena.rank[v] != 2) {
        return Err(SolveError::NotSafety { node: v as u32, rank: arena.rank[v] });
    }
    let pred = arena.predecessors();
    let all = vec![true; arena.len()];
    let bad: Vec<bool> = arena.rank.iter().map(|&r| r == 1).collect();
    let (attr, a_strat) = zielonka::attractor(arena, &pred, &all, &bad, Player::A);
    let mut strategy = vec![None; arena.len()];
    for v in 0..arena.len() {
        strategy[v] = match (arena.owner[v], attr[v]) {
            (Player::A, true) => a_strat[v].or_else(|| arena.succ[v].first().copied()),
            (Player::E, false) => arena.succ[v].iter().copied().find(|&w| !attr[w as usize]),
            _ => None,
        };
    }
    let win_e = attr.iter().map(|&b| !b).collect();
    Ok(finish(arena, win_e, strategy, start))
}

pub fn solve_parity(arena: &Arena) -> SolveResult {
    let start = Instant::now();
    let pred = arena.predecessors();
    let all = vec![true; arena.len()];
    let r = zielonka::zielonka(arena, &pred, &all);
    finish(arena, r.win_e, r.strategy, start)
}

pub fn solve(arena: &Arena) -> Result<SolveResult, SolveError> {
    match arena.condition {
        Condition::Safety => solve_safety(arena),
        Condition::Parity => Ok(solve_parity(arena)),
    }
}

/// Expands the reachable arena (stuck configurations move to their owner's
/// losing sink) and solves it.
pub fn winner_of(game: &dyn Game, limits: Limits) -> Result<Player, SolveError> {
    let arena = expand_arena(game, limits)?;
    Ok(solve(&arena)?.winner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::game::Condition::*;
    use crate::model::game::Player::*;

    #[test]
    fn tiny_parity() {
        let a = Arena::from_graph(vec![E], vec![2], vec![vec![0]], 0, Parity);
        assert_eq!(solve_parity(&a).winner, E);
        let a = Arena::from_graph(vec![E], vec![1], vec![vec![0]], 0, Parity);
        assert_eq!(solve_parity(&a).winner, A);
        let a = Arena::from_graph(vec![E, A], vec![1, 2], vec![vec![1], vec![0]], 0, Parity);
        assert_eq!(solve_parity(&a).winner, A);
    }

    #[test]
    fn tiny_safety() {
        let a = Arena::from_graph(vec![E], vec![2], vec![vec![0]], 0, Safety);
        assert_eq!(solve_safety(&a).unwrap().winner, E);
        let a = Arena::from_graph(vec![A, E], vec![2, 1], vec![vec![1], vec![1]], 0, Safety);
        assert_eq!(solve_safety(&a).unwrap().winner, A);
        let a = Arena::from_graph(vec![E], vec![3], vec![vec![0]], 0, Safety);
        assert!(solve_safety(&a).is_err());
    }
}
