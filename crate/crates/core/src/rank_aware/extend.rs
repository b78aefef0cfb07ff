use std::sync::Arc;

use num_bigint::BigUint;

use super::{AwareSym, RaState, RankFn};
use crate::model::game::{neutral_rank, Condition, Game, GameRef, Player, Role, Rule};
use crate::model::ids::{State, Sym};
use crate::model::op::Op;
use crate::poly::{EncChar, EncodingParams};

/// Adds the order-1 entry to the characters of a higher-rank-aware game.
pub struct Order1Ext {
    inner: GameRef,
    hold: u32,
    depth: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("input is not higher-rank-aware: initial character `{0}`")]
pub struct NotHigherAware(pub String);

pub fn extend_order1(game: GameRef) -> Result<GameRef, NotHigherAware> {
    let a0 = game.initial_symbol();
    match game.rank_fn(&a0) {
        Some(f) if !f.is_full() => {}
        _ => return Err(NotHigherAware(a0.to_string())),
    }
    let hold = neutral_rank(game.max_rank());
    let depth = game.ra_depth();
    Ok(Arc::new(Order1Ext { inner: game, hold, depth }))
}

impl Order1Ext {
    /// Splits an output character into its input character and order-1 value.
    fn split(&self, a: &Sym) -> Option<(Sym, u32)> {
        let aw = a.as_aware()?;
        let r = aw.ranks.level(1)?;
        let inner = AwareSym {
            base: aw.base.clone(),
            ranks: RankFn::higher(aw.ranks.levels[1..].to_vec(), aw.ranks.link),
            shadow: aw.shadow,
        };
        Some((Sym::Aware(Arc::new(inner)), r))
    }

    fn ext(&self, b: &Sym, r: u32) -> Sym {
        match b.as_aware() {
            Some(aw) => Sym::Aware(Arc::new(AwareSym { base: aw.base.clone(), ranks: aw.ranks.ext(r), shadow: aw.shadow })),
            None => b.clone(),
        }
    }

    fn own_hold<'a>(&self, q: &'a State) -> Option<(&'a State, u32)> {
        match q {
            State::Ra(s) => match &**s {
                RaState::Hold { target, r, depth } if *depth == self.depth => Some((target, *r)),
                _ => None,
            },
            _ => None,
        }
    }

    fn hold_state(&self, target: State, r: u32) -> State {
        State::Ra(Arc::new(RaState::Hold { target, r, depth: self.depth }))
    }
}

impl Game for Order1Ext {
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
        self.ext(&self.inner.initial_symbol(), self.inner.rank(&self.inner.initial_state()))
    }

    fn owner(&self, q: &State) -> Player {
        match self.own_hold(q) {
            Some((t, _)) => self.inner.owner(t),
            None => self.inner.owner(q),
        }
    }

    fn rank(&self, q: &State) -> u32 {
        match self.own_hold(q) {
            Some(_) => self.hold,
            None => self.inner.rank(q),
        }
    }

    fn max_rank(&self) -> u32 {
        self.hold.max(self.inner.max_rank())
    }

    fn link_order(&self, a: &Sym) -> u8 {
        match self.split(a) {
            Some((b, _)) => self.inner.link_order(&b),
            None => 1,
        }
    }

    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule> {
        let Some((b, r)) = self.split(a) else { return Vec::new() };
        if let Some((target, r0)) = self.own_hold(q) {
            let r2 = r.min(r0);
            let op = if r2 == r { Op::Noop } else { Op::Rewrite(self.ext(&b, r2)) };
            return vec![Rule::new(op, target.clone())];
        }
        let eta = self.inner.rank_fn(&b).expect("higher-aware character");
        let mut out = Vec::new();
        for rule in self.inner.rules(q, &b) {
            let rho = self.inner.rank(&rule.target);
            let low = r.min(rho);
            let rule = match rule.op {
                Op::PushChar(c) => Rule::new(Op::PushChar(self.ext(&c, rho)), rule.target),
                Op::Rewrite(c) => Rule::new(Op::Rewrite(self.ext(&c, low)), rule.target),
                Op::Noop if low == r => Rule::new(Op::Noop, rule.target),
                Op::Noop => Rule::new(Op::Rewrite(self.ext(&b, low)), rule.target),
                Op::Push(k) => Rule::new(Op::Push(k), self.hold_state(rule.target, low)),
                Op::Pop(1) => Rule::new(Op::Pop(1), self.hold_state(rule.target, low)),
                Op::Pop(k) => {
                    let w = eta.level(k).unwrap_or(0).min(rho);
                    Rule::new(Op::Pop(k), self.hold_state(rule.target, w))
                }
                Op::Collapse => {
                    let w = eta.link().min(rho);
                    Rule::new(Op::Collapse, self.hold_state(rule.target, w))
                }
            };
            out.push(rule);
        }
        out
    }

    fn state_count(&self) -> BigUint {
        self.inner.state_count() * BigUint::from(self.hold + 2)
    }

    fn symbol_count(&self) -> BigUint {
        self.inner.symbol_count() * BigUint::from(self.inner.max_rank() + 1)
    }

    fn is_rank_aware(&self) -> bool {
        true
    }

    fn role(&self, q: &State) -> Role {
        match self.own_hold(q) {
            Some(_) => Role::Transient,
            None => self.inner.role(q),
        }
    }

    fn counter_char(&self, a: &Sym) -> Option<EncChar> {
        self.split(a).and_then(|(b, _)| self.inner.counter_char(&b))
    }

    fn encoding(&self) -> Option<EncodingParams> {
        self.inner.encoding()
    }

    fn ra_depth(&self) -> u8 {
        self.depth
    }
}
