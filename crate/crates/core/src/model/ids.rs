use std::fmt;
use std::sync::Arc;

use super::game::Player;
use crate::counter_reduction::{CountedSym, CrState};
use crate::order_reduction::{ClaimedSym, OrState};
use crate::poly::{EncChar, PrState};
use crate::rank_aware::{AwareSym, RaState, RankFn};

/// A stack character. Transformations wrap the characters of their input.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Named(Arc<str>),
    Aware(Arc<AwareSym>),
    Claimed(Arc<ClaimedSym>),
    Counted(Arc<CountedSym>),
    Enc(EncChar),
    Link(u8),
}

impl Sym {
    pub fn named(s: &str) -> Sym {
        Sym::Named(Arc::from(s))
    }

    pub fn as_aware(&self) -> Option<&AwareSym> {
        match self {
            Sym::Aware(a) => Some(a),
            _ => None,
        }
    }

    pub fn intrinsic_rank_fn(&self) -> Option<&RankFn> {
        self.as_aware().map(|a| &a.ranks)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Named(s) => f.write_str(s),
            Sym::Aware(a) => a.fmt(f),
            Sym::Claimed(c) => c.fmt(f),
            Sym::Counted(c) => c.fmt(f),
            Sym::Enc(e) => e.fmt(f),
            Sym::Link(o) => write!(f, "$L{o}"),
        }
    }
}

/// A control state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Named(Arc<str>),
    /// Self-looping sink that is losing for the given player.
    Sink(Player),
    Ra(Arc<RaState>),
    Or(Arc<OrState>),
    Cr(Arc<CrState>),
    Pr(Arc<PrState>),
}

impl State {
    pub fn named(s: &str) -> State {
        State::Named(Arc::from(s))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Named(s) => f.write_str(s),
            State::Sink(p) => write!(f, "$sink{p}"),
            State::Ra(s) => s.fmt(f),
            State::Or(s) => s.fmt(f),
            State::Cr(s) => s.fmt(f),
            State::Pr(s) => s.fmt(f),
        }
    }
}
