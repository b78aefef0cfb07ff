//! Parity to safety by bounded counters of odd ranks stored in the characters.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::model::game::{Condition, Game, GameRef, Player, Role, Rule};
use crate::model::ids::{State, Sym};
use crate::model::op::Op;
use crate::poly::{EncChar, EncodingParams};

/// Counter values for the odd ranks `1, 3, ..`; entry `i` belongs to rank `2i+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CounterVec(pub Vec<BigUint>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IncResult {
    Ok(CounterVec),
    Overflow,
}

impl CounterVec {
    /// Zero counters for all odd ranks up to `m`.
    pub fn zeros(m: u32) -> CounterVec {
        CounterVec(vec![BigUint::zero(); m.div_ceil(2) as usize])
    }

    pub fn from_u64(v: &[u64]) -> CounterVec {
        CounterVec(v.iter().map(|&x| BigUint::from(x)).collect())
    }

    pub fn get(&self, r: u32) -> Option<&BigUint> {
        if r.is_multiple_of(2) {
            return None;
        }
        self.0.get((r / 2) as usize)
    }

    /// `inc_r`: counters below `r` stay, an odd `r` is incremented, higher ones reset.
    pub fn inc(&self, r: u32, bound: &BigUint) -> IncResult {
        let mut out = self.0.clone();
        for (i, c) in out.iter_mut().enumerate() {
            let s = 2 * i as u32 + 1;
            if s == r {
                let next = &*c + 1u32;
                if &next > bound {
                    return IncResult::Overflow;
                }
                *c = next;
            } else if s > r {
                c.set_zero();
            }
        }
        IncResult::Ok(CounterVec(out))
    }
}

impl fmt::Display for CounterVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().enumerate().map(|(i, c)| format!("c[{}]={c}", 2 * i + 1)).collect();
        f.write_str(&parts.join(";"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountedSym {
    pub base: Sym,
    pub counters: CounterVec,
}

impl fmt::Display for CountedSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.base, self.counters)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CrState {
    /// `(q, r)`: apply `inc_r`, then continue in `q`.
    Inc { q: State, r: u32 },
    Over,
}

impl fmt::Display for CrState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrState::Inc { q, r } => write!(f, "inc({q},{r})"),
            CrState::Over => f.write_str("$eover"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CounterError {
    #[error("counter reduction needs a parity game")]
    NotParity,
    #[error("counter reduction needs a rank-aware game")]
    NotRankAware,
}

pub struct CounterGame {
    inner: GameRef,
    bound: BigUint,
    m: u32,
}

/// The safety game tracking odd-rank counters bounded by `bound`.
pub fn reduce_counter(game: GameRef, bound: BigUint) -> Result<Arc<CounterGame>, CounterError> {
    if game.condition() != Condition::Parity {
        return Err(CounterError::NotParity);
    }
    if !game.is_rank_aware() {
        return Err(CounterError::NotRankAware);
    }
    let m = game.max_rank();
    Ok(Arc::new(CounterGame { inner: game, bound, m }))
}

impl CounterGame {
    pub fn bound(&self) -> &BigUint {
        &self.bound
    }

    pub fn inner(&self) -> &GameRef {
        &self.inner
    }

    fn split<'a>(&self, a: &'a Sym) -> Option<&'a CountedSym> {
        match a {
            Sym::Counted(c) => Some(c),
            _ => None,
        }
    }

    fn counted(&self, base: Sym, counters: &CounterVec) -> Sym {
        Sym::Counted(Arc::new(CountedSym { base, counters: counters.clone() }))
    }

    fn inc_state(&self, q: State, r: u32) -> State {
        State::Cr(Arc::new(CrState::Inc { q, r }))
    }

    fn own<'a>(&self, q: &'a State) -> Option<&'a CrState> {
        match q {
            State::Cr(s) => Some(s),
            _ => None,
        }
    }

    /// The translation of one input rule read on `(a, c)`.
    pub fn translate(&self, a: &CountedSym, rule: &Rule) -> Rule {
        let c = &a.counters;
        let xi = self.inner.rank_fn(&a.base);
        let r2 = self.inner.rank(&rule.target);
        let t = rule.target.clone();
        match &rule.op {
            Op::Push(k) => Rule::new(Op::Push(*k), self.inc_state(t, r2)),
            Op::PushChar(b) => Rule::new(Op::PushChar(self.counted(b.clone(), c)), self.inc_state(t, r2)),
            Op::Rewrite(b) => Rule::new(Op::Rewrite(self.counted(b.clone(), c)), self.inc_state(t, r2)),
            Op::Noop => Rule::new(Op::Noop, self.inc_state(t, r2)),
            Op::Pop(k) => {
                let r = xi.and_then(|f| f.level(*k)).map_or(r2, |x| x.min(r2));
                Rule::new(Op::Pop(*k), self.inc_state(t, r))
            }
            Op::Collapse => {
                let r = xi.map_or(r2, |f| f.link().min(r2));
                Rule::new(Op::Collapse, self.inc_state(t, r))
            }
        }
    }
}

impl Game for CounterGame {
    fn order(&self) -> u8 {
        self.inner.order()
    }

    fn condition(&self) -> Condition {
        Condition::Safety
    }

    fn initial_state(&self) -> State {
        self.inner.initial_state()
    }

    fn initial_symbol(&self) -> Sym {
        self.counted(self.inner.initial_symbol(), &CounterVec::zeros(self.m))
    }

    fn owner(&self, q: &State) -> Player {
        match self.own(q) {
            Some(_) => Player::E,
            None => self.inner.owner(q),
        }
    }

    fn rank(&self, q: &State) -> u32 {
        match self.own(q) {
            Some(CrState::Over) => 1,
            _ => 2,
        }
    }

    fn max_rank(&self) -> u32 {
        2
    }

    fn link_order(&self, a: &Sym) -> u8 {
        self.split(a).map_or(1, |c| self.inner.link_order(&c.base))
    }

    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule> {
        let Some(ca) = self.split(a) else { return Vec::new() };
        match self.own(q) {
            Some(CrState::Over) => vec![Rule::new(Op::Noop, q.clone())],
            Some(CrState::Inc { q: q2, r }) => match ca.counters.inc(*r, &self.bound) {
                IncResult::Ok(c2) => vec![Rule::new(Op::Rewrite(self.counted(ca.base.clone(), &c2)), q2.clone())],
                IncResult::Overflow => vec![Rule::new(Op::Noop, State::Cr(Arc::new(CrState::Over)))],
            },
            None => self.inner.rules(q, &ca.base).iter().map(|r| self.translate(ca, r)).collect(),
        }
    }

    fn state_count(&self) -> BigUint {
        self.inner.state_count() * BigUint::from(self.m + 2) + 1u32
    }

    fn symbol_count(&self) -> BigUint {
        let per = &self.bound + BigUint::one();
        self.inner.symbol_count() * per.pow(self.m.div_ceil(2))
    }

    fn role(&self, q: &State) -> Role {
        match self.own(q) {
            Some(_) => Role::Plain,
            None => self.inner.role(q),
        }
    }

    fn counter_char(&self, _a: &Sym) -> Option<EncChar> {
        None
    }

    fn encoding(&self) -> Option<EncodingParams> {
        None
    }

    fn ra_depth(&self) -> u8 {
        self.inner.ra_depth()
    }
}

/// The rule families of the counter reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrFamily {
    Push,
    CharPush,
    Rewrite,
    Pop,
    Collapse,
    Update { overflow: bool },
    SinkLoop,
}

/// Assigns a rule of `cr` read at `(q, a)` to its family; `None` if it fits none.
pub fn classify_counter(cr: &CounterGame, q: &State, a: &Sym, rule: &Rule) -> Option<CrFamily> {
    let ca = cr.split(a)?;
    match cr.own(q) {
        Some(CrState::Over) => {
            (rule.op == Op::Noop && rule.target == *q).then_some(CrFamily::SinkLoop)
        }
        Some(CrState::Inc { q: q2, r }) => match ca.counters.inc(*r, &cr.bound) {
            IncResult::Ok(c2) => (rule.op == Op::Rewrite(cr.counted(ca.base.clone(), &c2)) && rule.target == *q2)
                .then_some(CrFamily::Update { overflow: false }),
            IncResult::Overflow => (rule.op == Op::Noop && matches!(cr.own(&rule.target), Some(CrState::Over)))
                .then_some(CrFamily::Update { overflow: true }),
        },
        None => {
            let src = cr.inner.rules(q, &ca.base).into_iter().find(|r| cr.translate(ca, r) == *rule)?;
            Some(match src.op {
                Op::Push(_) => CrFamily::Push,
                Op::PushChar(_) => CrFamily::CharPush,
                Op::Rewrite(_) | Op::Noop => CrFamily::Rewrite,
                Op::Pop(_) => CrFamily::Pop,
                Op::Collapse => CrFamily::Collapse,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inc_examples() {
        let b = BigUint::from(5u32);
        let v = CounterVec::from_u64(&[2, 1, 4]);
        assert_eq!(v.inc(3, &b), IncResult::Ok(CounterVec::from_u64(&[2, 2, 0])));
        assert_eq!(CounterVec::from_u64(&[2, 5, 0]).inc(3, &b), IncResult::Overflow);
        assert_eq!(v.inc(0, &b), IncResult::Ok(CounterVec::from_u64(&[0, 0, 0])));
        assert_eq!(v.inc(2, &b), IncResult::Ok(CounterVec::from_u64(&[2, 0, 0])));
        assert_eq!(CounterVec::zeros(0).inc(0, &b), IncResult::Ok(CounterVec::zeros(0)));
        assert_eq!(v.to_string(), "c[1]=2;c[3]=1;c[5]=4");
    }
}
