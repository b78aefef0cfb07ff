use crate::model::game::Player;

use super::arena::Arena;

/// Attractor of `target` for `player` inside the subgame `sub`.
///
/// Returns the attractor and, for the player's nodes outside `target`, a
/// successor that decreases the distance to `target`.
pub fn attractor(
    arena: &Arena,
    pred: &[Vec<u32>],
    sub: &[bool],
    target: &[bool],
    player: Player,
) -> (Vec<bool>, Vec<Option<u32>>) {
    let n = arena.len();
    let mut attr = vec![false; n];
    let mut strat = vec![None; n];
    let mut count: Vec<usize> =
        (0..n).map(|v| if sub[v] { arena.succ[v].iter().filter(|&&w| sub[w as usize]).count() } else { 0 }).collect();
    let mut queue = Vec::new();
    for v in 0..n {
        if sub[v] && target[v] {
            attr[v] = true;
            queue.push(v as u32);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &p in &pred[u as usize] {
            let pi = p as usize;
            if !sub[pi] || attr[pi] {
                continue;
            }
            if arena.owner[pi] == player {
                attr[pi] = true;
                strat[pi] = Some(u);
                queue.push(p);
            } else {
                count[pi] -= 1;
                if count[pi] == 0 {
                    attr[pi] = true;
                    queue.push(p);
                }
            }
        }
    }
    (attr, strat)
}

/// Winning regions of a parity game restricted to `sub` (min-parity: the
/// smallest rank seen infinitely often decides, even favours E).
pub struct Regions {
    pub win_e: Vec<bool>,
    pub strategy: Vec<Option<u32>>,
}

/// Solves the given parity game using the Zielonka algorithm.
pub fn zielonka(arena: &Arena, pred: &[Vec<u32>], sub0: &[bool]) -> Regions {
    let n = arena.len();
    let mut sub = sub0.to_vec();
    let mut win_e = vec![false; n];
    let mut strategy = vec![None; n];
    while let Some(p) = (0..n).filter(|&v| sub[v]).map(|v| arena.rank[v]).min() {
        let alpha = if p % 2 == 0 { Player::E } else { Player::A };
        let top: Vec<bool> = (0..n).map(|v| sub[v] && arena.rank[v] == p).collect();
        let (a, a_strat) = attractor(arena, pred, &sub, &top, alpha);
        let rest: Vec<bool> = (0..n).map(|v| sub[v] && !a[v]).collect();
        let inner = zielonka(arena, pred, &rest);
        let opp_wins: Vec<bool> =
            (0..n).map(|v| rest[v] && (inner.win_e[v] != (alpha == Player::E))).collect();
        if !opp_wins.iter().any(|&b| b) {
            for v in 0..n {
                if !sub[v] {
                    continue;
                }
                win_e[v] = alpha == Player::E;
                if arena.owner[v] != alpha {
                    continue;
                }
                strategy[v] = if rest[v] {
                    inner.strategy[v]
                } else if top[v] {
                    arena.succ[v].iter().copied().find(|&w| sub[w as usize])
                } else {
                    a_strat[v]
                };
            }
            break;
        }
        let beta = alpha.opponent();
        let (b, b_strat) = attractor(arena, pred, &sub, &opp_wins, beta);
        for v in 0..n {
            if !b[v] {
                continue;
            }
            win_e[v] = beta == Player::E;
            if arena.owner[v] == beta {
                strategy[v] = if opp_wins[v] { inner.strategy[v] } else { b_strat[v] };
            }
            sub[v] = false;
        }
    }
    Regions { win_e, strategy }
}
