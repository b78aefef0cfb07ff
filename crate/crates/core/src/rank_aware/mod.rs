//! Rank-aware games: the top character reports the level ranks and link rank.

mod check;
mod extend;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::model::game::{neutral_rank, Condition, Game, GameRef, Player, Role, Rule};
use crate::model::ids::{State, Sym};
use crate::model::op::Op;
use crate::poly::{EncChar, EncodingParams};

pub use check::{check_awareness, RankKey, Violation};
pub use extend::{extend_order1, Order1Ext};

/// Ranks stored in a character, for orders `first..=n` and the link.
///
/// `first` is 1 for full rank functions and 2 for higher ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankFn {
    first: u8,
    levels: Vec<u32>,
    link: u32,
}

impl RankFn {
    pub fn full(levels: Vec<u32>, link: u32) -> RankFn {
        assert!(!levels.is_empty());
        RankFn { first: 1, levels, link }
    }

    /// Ranks for orders `2..=n`; `levels` is empty for order 1.
    pub fn higher(levels: Vec<u32>, link: u32) -> RankFn {
        RankFn { first: 2, levels, link }
    }

    pub fn uniform(n: u8, r: u32) -> RankFn {
        RankFn::full(vec![r; n as usize], r)
    }

    pub fn is_full(&self) -> bool {
        self.first == 1
    }

    pub fn order(&self) -> u8 {
        self.first + self.levels.len() as u8 - 1
    }

    pub fn level(&self, k: u8) -> Option<u32> {
        if k < self.first {
            return None;
        }
        self.levels.get((k - self.first) as usize).copied()
    }

    pub fn link(&self) -> u32 {
        self.link
    }

    /// `ext_r`: the full rank function with order-1 value `r`.
    pub fn ext(&self, r: u32) -> RankFn {
        let mut levels = vec![r];
        levels.extend(self.levels.iter().skip(if self.is_full() { 1 } else { 0 }));
        RankFn::full(levels, self.link)
    }

    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if !self.is_full() {
            parts.push("-".into());
        }
        parts.extend(self.levels.iter().map(u32::to_string));
        format!("{}|{}", parts.join(","), self.link)
    }

    pub fn from_text(s: &str) -> Option<RankFn> {
        let (lv, link) = s.split_once('|')?;
        let link = link.parse().ok()?;
        let mut it = lv.split(',').peekable();
        let higher = it.peek() == Some(&"-");
        if higher {
            it.next();
        }
        let levels: Option<Vec<u32>> = it.map(|x| x.parse().ok()).collect();
        let levels = levels?;
        if higher {
            Some(RankFn::higher(levels, link))
        } else if levels.is_empty() {
            None
        } else {
            Some(RankFn::full(levels, link))
        }
    }
}

impl fmt::Display for RankFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_text())
    }
}

/// A character paired with its rank function. Higher-aware characters also
/// carry the order-1 value privately in `shadow`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AwareSym {
    pub base: Sym,
    pub ranks: RankFn,
    pub shadow: Option<u32>,
}

impl fmt::Display for AwareSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.base, self.ranks)?;
        if let Some(s) = self.shadow {
            write!(f, "~{s}")?;
        }
        Ok(())
    }
}

/// Pending repair of the top character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Patch {
    /// After `push_k`: entry k restarts, the others take the min with the new rank.
    Push(u8),
    /// After a pop or collapse exposing an older character: entries up to
    /// `upto` and the link take the min with `w`; higher entries become `upper`.
    Expose { upto: u8, w: u32, upper: Vec<u32> },
}

impl fmt::Display for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Patch::Push(k) => write!(f, "p{k}"),
            Patch::Expose { upto, w, upper } => {
                write!(f, "x{upto}w{w}")?;
                for u in upper {
                    write!(f, ".{u}")?;
                }
                Ok(())
            }
        }
    }
}

/// Intermediate states of the rank-awareness constructions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RaState {
    Fix { target: State, patch: Patch, depth: u8 },
    /// Order-1 repair: rewrite the order-1 entry with the min against `r`.
    Hold { target: State, r: u32, depth: u8 },
}

impl fmt::Display for RaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RaState::Fix { target, patch, depth } => write!(f, "{target}{}{patch}", "!".repeat(*depth as usize)),
            RaState::Hold { target, r, depth } => write!(f, "{target}{}r{r}", "!".repeat(*depth as usize)),
        }
    }
}

/// Nesting depth of the rank-awareness layer that introduced `q` (0 for other states).
pub fn state_depth(q: &State) -> u8 {
    match q {
        State::Ra(s) => match &**s {
            RaState::Fix { depth, .. } | RaState::Hold { depth, .. } => *depth,
        },
        _ => 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Full,
    Higher,
}

/// Lazy rank-aware version of a game. Every character stores the complete
/// vector of level ranks; in higher mode the order-1 entry is kept as a shadow.
pub struct RankAware {
    inner: GameRef,
    mode: Mode,
    n: u8,
    hold: u32,
    depth: u8,
}

/// Makes `game` rank-aware in one pass.
pub fn make_rank_aware(game: GameRef) -> GameRef {
    Arc::new(RankAware::new(game, Mode::Full))
}

/// Higher-rank-aware version of `game` (orders `2..=n` and the link).
pub fn make_higher_aware(game: GameRef) -> GameRef {
    Arc::new(RankAware::new(game, Mode::Higher))
}

/// The two-stage route: `extend_order1` after `make_higher_aware`.
pub fn make_rank_aware_two_stage(game: GameRef) -> GameRef {
    extend_order1(make_higher_aware(game)).expect("higher-aware by construction")
}

impl RankAware {
    fn new(inner: GameRef, mode: Mode) -> Self {
        let n = inner.order();
        let hold = neutral_rank(inner.max_rank());
        let depth = inner.ra_depth() + 1;
        RankAware { inner, mode, n, hold, depth }
    }

    /// Values for orders `1..=n` followed by the link value.
    fn vec_of(&self, a: &AwareSym) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.n as usize + 1);
        if self.mode == Mode::Higher {
            v.push(a.shadow.unwrap_or(0));
        }
        v.extend(a.ranks.levels.iter().copied());
        v.push(a.ranks.link);
        v
    }

    fn make_char(&self, base: Sym, mut v: Vec<u32>) -> Sym {
        let link = v.pop().expect("link entry");
        let aw = match self.mode {
            Mode::Full => AwareSym { base, ranks: RankFn::full(v, link), shadow: None },
            Mode::Higher => {
                let shadow = v.remove(0);
                AwareSym { base, ranks: RankFn::higher(v, link), shadow: Some(shadow) }
            }
        };
        Sym::Aware(Arc::new(aw))
    }

    fn own_fix<'a>(&self, q: &'a State) -> Option<(&'a State, &'a Patch)> {
        match q {
            State::Ra(s) => match &**s {
                RaState::Fix { target, patch, depth } if *depth == self.depth => Some((target, patch)),
                _ => None,
            },
            _ => None,
        }
    }

    fn fix(&self, target: State, patch: Patch) -> State {
        State::Ra(Arc::new(RaState::Fix { target, patch, depth: self.depth }))
    }

    fn apply_patch(&self, v: &[u32], patch: &Patch, rho: u32) -> Vec<u32> {
        let n = self.n as usize;
        let mut out = v.to_vec();
        match patch {
            Patch::Push(k) => {
                for (i, x) in out.iter_mut().enumerate() {
                    *x = if i + 1 == *k as usize { rho } else { (*x).min(rho) };
                }
            }
            Patch::Expose { upto, w, upper } => {
                for x in out.iter_mut().take(*upto as usize) {
                    *x = (*x).min(*w);
                }
                out[n] = out[n].min(*w);
                for (j, u) in upper.iter().enumerate() {
                    out[*upto as usize + j] = *u;
                }
            }
        }
        out
    }

    fn exposing(&self, v: &[u32], upto: u8, w: u32, rho: u32) -> Patch {
        let upper = (upto as usize..self.n as usize).map(|i| v[i].min(rho)).collect();
        Patch::Expose { upto, w, upper }
    }

    fn patch_count(&self) -> BigUint {
        let m1 = BigUint::from(self.inner.max_rank() + 1);
        let mut c = BigUint::from(self.n.saturating_sub(1));
        for k in 1..=self.n {
            c += m1.pow(1 + (self.n - k) as u32);
        }
        c
    }
}

impl Game for RankAware {
    fn order(&self) -> u8 {
        self.n
    }

    fn condition(&self) -> Condition {
        self.inner.condition()
    }

    fn initial_state(&self) -> State {
        self.inner.initial_state()
    }

    fn initial_symbol(&self) -> Sym {
        let r = self.inner.rank(&self.inner.initial_state());
        self.make_char(self.inner.initial_symbol(), vec![r; self.n as usize + 1])
    }

    fn owner(&self, q: &State) -> Player {
        match self.own_fix(q) {
            Some((t, _)) => self.inner.owner(t),
            None => self.inner.owner(q),
        }
    }

    fn rank(&self, q: &State) -> u32 {
        match self.own_fix(q) {
            Some(_) => self.hold,
            None => self.inner.rank(q),
        }
    }

    fn max_rank(&self) -> u32 {
        self.hold.max(self.inner.max_rank())
    }

    fn link_order(&self, a: &Sym) -> u8 {
        match a.as_aware() {
            Some(aw) => self.inner.link_order(&aw.base),
            None => 1,
        }
    }

    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule> {
        let Some(aw) = a.as_aware() else { return Vec::new() };
        let v = self.vec_of(aw);
        if let Some((target, patch)) = self.own_fix(q) {
            let v2 = self.apply_patch(&v, patch, self.inner.rank(target));
            let op = if v2 == v { Op::Noop } else { Op::Rewrite(self.make_char(aw.base.clone(), v2)) };
            return vec![Rule::new(op, target.clone())];
        }
        let n = self.n as usize;
        let mut out = Vec::new();
        for r in self.inner.rules(q, &aw.base) {
            let rho = self.inner.rank(&r.target);
            let low: Vec<u32> = v.iter().map(|&x| x.min(rho)).collect();
            let rule = match r.op {
                Op::Noop if low == v => Rule::new(Op::Noop, r.target),
                Op::Noop => Rule::new(Op::Rewrite(self.make_char(aw.base.clone(), low)), r.target),
                Op::Rewrite(b) => Rule::new(Op::Rewrite(self.make_char(b, low)), r.target),
                Op::PushChar(b) => {
                    let kb = self.inner.link_order(&b) as usize;
                    let mut g = low.clone();
                    g[0] = rho;
                    g[n] = low[kb - 1];
                    Rule::new(Op::PushChar(self.make_char(b, g)), r.target)
                }
                Op::Push(k) => Rule::new(Op::Push(k), self.fix(r.target, Patch::Push(k))),
                Op::Pop(k) => {
                    let w = low[k as usize - 1];
                    Rule::new(Op::Pop(k), self.fix(r.target, self.exposing(&v, k, w, rho)))
                }
                Op::Collapse => {
                    let k = self.inner.link_order(&aw.base);
                    let w = low[n];
                    Rule::new(Op::Collapse, self.fix(r.target, self.exposing(&v, k, w, rho)))
                }
            };
            out.push(rule);
        }
        out
    }

    fn state_count(&self) -> BigUint {
        self.inner.state_count() * (BigUint::from(1u32) + self.patch_count())
    }

    fn symbol_count(&self) -> BigUint {
        let m1 = BigUint::from(self.inner.max_rank() + 1);
        self.inner.symbol_count() * m1.pow(self.n as u32 + 1)
    }

    fn is_rank_aware(&self) -> bool {
        self.mode == Mode::Full
    }

    fn role(&self, q: &State) -> Role {
        match self.own_fix(q) {
            Some(_) => Role::Transient,
            None => self.inner.role(q),
        }
    }

    fn counter_char(&self, a: &Sym) -> Option<EncChar> {
        a.as_aware().and_then(|aw| self.inner.counter_char(&aw.base))
    }

    fn encoding(&self) -> Option<EncodingParams> {
        self.inner.encoding()
    }

    fn ra_depth(&self) -> u8 {
        self.depth
    }
}
