//! Inputs shared by the benchmarks.

use std::sync::Arc;

use cpds_core::corpus::{generate, random_game, CorpusSpec};
use cpds_core::solver::Arena;
use cpds_core::{Condition, GameRef, Player};

/// The first `count` games of the seed-42 corpus of the given order.
pub fn corpus(order: u8, count: usize) -> Vec<GameRef> {
    let spec = CorpusSpec { count, order, ..CorpusSpec::default() };
    generate(&spec).expect("corpus").into_iter().map(|e| e.game_ref()).collect()
}

/// An unfiltered random game with `size` states and symbols.
pub fn sized_game(size: usize) -> GameRef {
    let spec = CorpusSpec { states: (size, size), symbols: (size, size), max_rank: (3, 3), ..CorpusSpec::default() };
    Arc::new(random_game(&spec, 42 + size as u64))
}

/// A ring of `n` nodes with chords, alternating owners, ranks `0..=3`.
pub fn ring_arena(n: usize) -> Arena {
    let owner = (0..n).map(|v| if v % 2 == 0 { Player::E } else { Player::A }).collect();
    let rank = (0..n).map(|v| (v * 7 % 4) as u32).collect();
    let succ = (0..n).map(|v| vec![((v + 1) % n) as u32, ((v * 5 + 3) % n) as u32]).collect();
    Arena::from_graph(owner, rank, succ, 0, Condition::Parity)
}
