//! Stacks, operations, games and plays.

pub mod cpg;
pub mod explicit;
pub mod game;
pub mod ids;
pub mod op;
pub mod play;
pub mod stack;

use std::sync::Arc;

use num_bigint::BigUint;

use crate::poly::{EncChar, EncodingParams};
use crate::rank_aware::RankFn;
use crate::solver::arena::losing_sink_rank;
use game::{Condition, Game, GameRef, Player, Role, Rule};
use ids::{State, Sym};
use op::Op;

/// A game with two extra sinks. Pairs `(q, a)` without rules move to the sink
/// losing for the owner of `q`; stack-dependent dead ends are handled the same
/// way during arena expansion.
pub struct Totalized {
    inner: GameRef,
}

pub fn totalize(game: GameRef) -> GameRef {
    Arc::new(Totalized { inner: game })
}

impl Game for Totalized {
    fn order(&self) -> u8 {
        self.inner.order()
    }

    fn condition(&self) -> Condition {
        self.inner.condition()
    }

    fn initial_state(&self) -> State {
        self.inner.initial_state()
    }

    fn initial_symbol(&self) -> Sym {
        self.inner.initial_symbol()
    }

    fn owner(&self, q: &State) -> Player {
        match q {
            State::Sink(_) => Player::E,
            _ => self.inner.owner(q),
        }
    }

    fn rank(&self, q: &State) -> u32 {
        match q {
            State::Sink(p) => losing_sink_rank(*p, self.condition()),
            _ => self.inner.rank(q),
        }
    }

    fn max_rank(&self) -> u32 {
        self.inner.max_rank().max(losing_sink_rank(Player::A, self.condition())).max(1)
    }

    fn link_order(&self, a: &Sym) -> u8 {
        self.inner.link_order(a)
    }

    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule> {
        if let State::Sink(_) = q {
            return vec![Rule::new(Op::Noop, q.clone())];
        }
        let rs = self.inner.rules(q, a);
        if rs.is_empty() {
            return vec![Rule::new(Op::Noop, State::Sink(self.inner.owner(q)))];
        }
        rs
    }

    fn state_count(&self) -> BigUint {
        self.inner.state_count() + 2u32
    }

    fn symbol_count(&self) -> BigUint {
        self.inner.symbol_count()
    }

    fn is_rank_aware(&self) -> bool {
        self.inner.is_rank_aware()
    }

    fn rank_fn(&self, a: &Sym) -> Option<RankFn> {
        self.inner.rank_fn(a)
    }

    fn role(&self, q: &State) -> Role {
        self.inner.role(q)
    }

    fn counter_char(&self, a: &Sym) -> Option<EncChar> {
        self.inner.counter_char(a)
    }

    fn encoding(&self) -> Option<EncodingParams> {
        self.inner.encoding()
    }

    fn ra_depth(&self) -> u8 {
        self.inner.ra_depth()
    }
}
