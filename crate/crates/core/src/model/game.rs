use std::fmt;

use num_bigint::BigUint;

use super::ids::{State, Sym};
use super::op::Op;
use super::stack::Stack;
use crate::poly::{EncChar, EncodingParams};
use crate::rank_aware::RankFn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    E,
    A,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::E => Player::A,
            Player::A => Player::E,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::E => "E",
            Player::A => "A",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Safety,
    Parity,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Safety => "safety",
            Condition::Parity => "parity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub op: Op<Sym>,
    pub target: State,
}

impl Rule {
    pub fn new(op: Op<Sym>, target: State) -> Rule {
        Rule { op, target }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    Encoding,
    Equals,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Encoding => "encoding",
            CheckKind::Equals => "equals",
        })
    }
}

/// Extra meaning attached to a control state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Plain,
    /// Intermediate state of a rank-awareness fixup; the top character may lag.
    Transient,
    /// Leaf resolved by a stack predicate (poly reduction).
    Check { kind: CheckKind, rank: u32 },
    /// A pushes counter characters of the given rank here (poly reduction).
    Phase { rank: u32 },
}

/// A game over a CPDS. Rules are produced on demand.
pub trait Game: Send + Sync {
    fn order(&self) -> u8;
    fn condition(&self) -> Condition;
    fn initial_state(&self) -> State;
    fn initial_symbol(&self) -> Sym;
    fn owner(&self, q: &State) -> Player;
    fn rank(&self, q: &State) -> u32;
    /// Largest rank of a declared state.
    fn max_rank(&self) -> u32;
    fn link_order(&self, a: &Sym) -> u8;
    /// Rules `(q, a, op, q')` in declaration order.
    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule>;
    fn state_count(&self) -> BigUint;
    fn symbol_count(&self) -> BigUint;

    fn size(&self) -> BigUint {
        self.state_count() + self.symbol_count()
    }

    fn is_rank_aware(&self) -> bool {
        false
    }

    fn rank_fn(&self, a: &Sym) -> Option<RankFn> {
        a.intrinsic_rank_fn().cloned()
    }

    fn role(&self, _q: &State) -> Role {
        Role::Plain
    }

    fn counter_char(&self, a: &Sym) -> Option<EncChar> {
        match a {
            Sym::Enc(e) => Some(*e),
            _ => None,
        }
    }

    fn encoding(&self) -> Option<EncodingParams> {
        None
    }

    /// Number of nested rank-awareness layers whose intermediate states occur here.
    fn ra_depth(&self) -> u8 {
        0
    }
}

pub type GameRef = std::sync::Arc<dyn Game>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config<T = ()> {
    pub state: State,
    pub stack: Stack<Sym, T>,
}

impl Config {
    pub fn initial(game: &dyn Game) -> Config {
        Config { state: game.initial_state(), stack: Stack::initial(game.order(), game.initial_symbol(), ()) }
    }
}

impl<T> fmt::Display for Config<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.state, self.stack)
    }
}

/// All applicable rules from `c`, with the resulting configurations.
pub fn successors<T: Clone>(game: &dyn Game, c: &Config<T>, tag: T) -> Vec<(Rule, Config<T>)> {
    let top = &c.stack.top_char().sym;
    game.rules(&c.state, top)
        .into_iter()
        .filter_map(|r| {
            let s = c.stack.apply(&r.op, |b| game.link_order(b), tag.clone())?;
            let next = Config { state: r.target.clone(), stack: s };
            Some((r, next))
        })
        .collect()
}

/// The rank used for intermediate states: even and at least every rank of `game`.
pub fn neutral_rank(max_rank: u32) -> u32 {
    if max_rank.is_multiple_of(2) {
        max_rank
    } else {
        max_rank + 1
    }
}
