//! Seeded random games, kept only when their arenas are finite within limits.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::explicit::{ExplicitGame, StateDecl, SymDecl};
use crate::model::game::{Condition, GameRef, Player, Role, Rule};
use crate::model::ids::{State, Sym};
use crate::model::op::Op;
use crate::solver::arena::{expand_arena, Arena};
use crate::solver::{solve, Limits};

#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub order: u8,
    pub states: (usize, usize),
    pub symbols: (usize, usize),
    /// Range of the largest rank.
    pub max_rank: (u32, u32),
    /// Probability of each additional rule at a `(state, symbol)` pair.
    pub density: f64,
    pub condition: Condition,
    pub limits: Limits,
    /// Smallest accepted arena.
    pub min_nodes: usize,
    /// Attempts per game before giving up.
    pub retries: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 42,
            count: 30,
            order: 2,
            states: (2, 4),
            symbols: (1, 3),
            max_rank: (1, 2),
            density: 0.35,
            condition: Condition::Parity,
            limits: Limits { max_nodes: 2_000, max_stack_len: 256, max_steps: 200_000 },
            min_nodes: 8,
            retries: 2_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("empty range for {0}")]
    EmptyRange(&'static str),
    #[error("no solvable game for entry {index} after {retries} attempts")]
    Exhausted { index: usize, retries: usize },
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    /// Seed of the accepted attempt.
    pub seed: u64,
    pub name: String,
    pub game: ExplicitGame,
    pub winner: Player,
}

impl CorpusEntry {
    pub fn game_ref(&self) -> GameRef {
        Arc::new(self.game.clone())
    }
}

fn pick(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

/// One random game drawn from `spec` with the given seed (not filtered).
pub fn random_game(spec: &CorpusSpec, seed: u64) -> ExplicitGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.order.max(1);
    let nq = pick(&mut rng, spec.states).max(1);
    let ns = pick(&mut rng, spec.symbols).max(1);
    let mr = rng.gen_range(spec.max_rank.0..=spec.max_rank.1);
    let states: Vec<StateDecl> = (0..nq)
        .map(|i| {
            let owner = if rng.gen_bool(0.5) { Player::E } else { Player::A };
            let rank = match spec.condition {
                Condition::Safety => {
                    if rng.gen_bool(0.25) {
                        1
                    } else {
                        2
                    }
                }
                Condition::Parity => rng.gen_range(0..=mr),
            };
            StateDecl { state: State::named(&format!("q{i}")), owner, rank, role: Role::Plain }
        })
        .collect();
    let symbols: Vec<SymDecl> = (0..ns)
        .map(|j| {
            let order = if j == 0 { 1 } else { rng.gen_range(1..=n) };
            SymDecl { sym: Sym::named(&format!("a{j}")), order, rank_fn: None, counter: None }
        })
        .collect();
    let mut rules = Vec::new();
    for q in &states {
        for a in &symbols {
            let mut k = 1;
            while k < 3 && rng.gen_bool(spec.density) {
                k += 1;
            }
            for _ in 0..k {
                let op = random_op(&mut rng, n, a, &symbols);
                let t = states[rng.gen_range(0..nq)].state.clone();
                rules.push((q.state.clone(), a.sym.clone(), Rule::new(op, t)));
            }
        }
    }
    let q0 = states[0].state.clone();
    let a0 = symbols[0].sym.clone();
    ExplicitGame::new(n, spec.condition, states, symbols, q0, a0, rules, false, None).expect("consistent by construction")
}

fn random_op(rng: &mut ChaCha8Rng, n: u8, a: &SymDecl, symbols: &[SymDecl]) -> Op<Sym> {
    loop {
        let op = match rng.gen_range(0..12) {
            0..=2 => Op::Noop,
            3 | 4 => {
                let same: Vec<&SymDecl> = symbols.iter().filter(|d| d.order == a.order).collect();
                Op::Rewrite(same[rng.gen_range(0..same.len())].sym.clone())
            }
            5 | 6 => Op::PushChar(symbols[rng.gen_range(0..symbols.len())].sym.clone()),
            7 | 8 => Op::Pop(1),
            9 if n >= 2 => Op::Push(rng.gen_range(2..=n)),
            10 if n >= 2 => Op::Pop(rng.gen_range(2..=n)),
            11 => Op::Collapse,
            _ => continue,
        };
        return op;
    }
}

/// Derives the seed of attempt `attempt` for entry `index`.
pub fn attempt_seed(seed: u64, index: usize, attempt: usize) -> u64 {
    let mut x = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1);
    x = x.wrapping_add((attempt as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    x ^= x >> 31;
    x.wrapping_mul(0x94D0_49BB_1331_11EB)
}

/// At least `min_nodes` positions, and some reachable stack of order `n >= 2`
/// holding two or more stacks.
fn nontrivial(arena: &Arena, spec: &CorpusSpec) -> bool {
    arena.owner.len() >= spec.min_nodes
        && (spec.order < 2 || (0..arena.owner.len() as u32).any(|v| arena.stack_of(v).is_some_and(|s| s.len() >= 2)))
}

/// Draws `spec.count` games whose arenas expand within `spec.limits`.
pub fn generate(spec: &CorpusSpec) -> Result<Vec<CorpusEntry>, GenError> {
    if spec.states.0 > spec.states.1 || spec.states.1 == 0 {
        return Err(GenError::EmptyRange("states"));
    }
    if spec.symbols.0 > spec.symbols.1 || spec.symbols.1 == 0 {
        return Err(GenError::EmptyRange("symbols"));
    }
    if spec.max_rank.0 > spec.max_rank.1 {
        return Err(GenError::EmptyRange("ranks"));
    }
    let mut out = Vec::with_capacity(spec.count);
    for index in 0..spec.count {
        let mut found = None;
        for attempt in 0..spec.retries {
            let seed = attempt_seed(spec.seed, index, attempt);
            let game = random_game(spec, seed);
            let Ok(arena) = expand_arena(&game, spec.limits) else { continue };
            if !nontrivial(&arena, spec) {
                continue;
            }
            if let Ok(res) = solve(&arena) {
                found = Some(CorpusEntry { seed, name: format!("g{index:03}"), game, winner: res.winner });
                break;
            }
        }
        match found {
            Some(e) => out.push(e),
            None => return Err(GenError::Exhausted { index, retries: spec.retries }),
        }
    }
    Ok(out)
}

/// Manifest lines: seed, file name, order, states, symbols.
pub fn manifest(entries: &[CorpusEntry]) -> String {
    entries
        .iter()
        .map(|e| {
            format!("{} {}.cpg {} {} {}\n", e.seed, e.name, e.game.order, e.game.states.len(), e.game.symbols.len())
        })
        .collect()
}
