use crate::model::game::{Condition, Player};

use super::arena::Arena;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BruteError {
    #[error("arena exceeds brute-force caps ({nodes} nodes, {strategies} strategies)")]
    Caps { nodes: usize, strategies: u128 },
}

#[derive(Clone, Copy, Debug)]
pub struct BruteCaps {
    pub max_nodes: usize,
    pub max_strategies: u128,
}

impl Default for BruteCaps {
    fn default() -> Self {
        BruteCaps { max_nodes: 10, max_strategies: 1 << 20 }
    }
}

fn closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut r = adj.to_vec();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                let rk = r[k].clone();
                for (x, y) in r[i].iter_mut().zip(rk) {
                    *x |= y;
                }
            }
        }
    }
    r
}

/// Nodes from which A, alone in the graph `adj`, can enforce an E-losing play.
fn a_wins_one_player(arena: &Arena, adj: &[Vec<bool>]) -> Vec<bool> {
    let n = arena.len();
    let reach = closure(adj);
    let mut bad = vec![false; n];
    match arena.condition {
        Condition::Safety => {
            for (b, &r) in bad.iter_mut().zip(&arena.rank) {
                *b = r == 1;
            }
        }
        Condition::Parity => {
            for (x, &r) in arena.rank.iter().enumerate() {
                if r.is_multiple_of(2) {
                    continue;
                }
                let sub: Vec<Vec<bool>> = (0..n)
                    .map(|i| (0..n).map(|j| adj[i][j] && arena.rank[i] >= r && arena.rank[j] >= r).collect())
                    .collect();
                if closure(&sub)[x][x] {
                    bad[x] = true;
                }
            }
        }
    }
    (0..n).map(|v| bad[v] || (0..n).any(|w| bad[w] && reach[v][w])).collect()
}

/// Winning region of E, by enumerating every positional strategy of E.
pub fn brute_force(arena: &Arena, caps: BruteCaps) -> Result<Vec<bool>, BruteError> {
    let n = arena.len();
    let e_nodes: Vec<usize> = (0..n).filter(|&v| arena.owner[v] == Player::E).collect();
    let total: u128 = e_nodes.iter().map(|&v| arena.succ[v].len().max(1) as u128).product();
    if n > caps.max_nodes || total > caps.max_strategies {
        return Err(BruteError::Caps { nodes: n, strategies: total });
    }
    let mut win = vec![false; n];
    let mut choice = vec![0usize; e_nodes.len()];
    loop {
        let mut adj = vec![vec![false; n]; n];
        for (v, row) in adj.iter_mut().enumerate() {
            if arena.owner[v] == Player::A {
                for &w in &arena.succ[v] {
                    row[w as usize] = true;
                }
            }
        }
        for (i, &v) in e_nodes.iter().enumerate() {
            adj[v][arena.succ[v][choice[i]] as usize] = true;
        }
        let a_wins = a_wins_one_player(arena, &adj);
        for v in 0..n {
            win[v] |= !a_wins[v];
        }
        let mut i = 0;
        loop {
            if i == e_nodes.len() {
                return Ok(win);
            }
            choice[i] += 1;
            if choice[i] < arena.succ[e_nodes[i]].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
