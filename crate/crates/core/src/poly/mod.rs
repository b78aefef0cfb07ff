//! Compact simulation of the counter reduction: counters live on the order-1
//! stack as nested binary encodings.

pub mod encoding;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::model::game::{CheckKind, Condition, Game, GameRef, Player, Role, Rule};
use crate::model::ids::{State, Sym};
use crate::model::op::Op;
use crate::model::stack::Stack;
use crate::rank_aware::RankFn;

pub use encoding::{
    check_encoding, check_equals, decode_counter, encode_counter, is_template_suffix, top_block, EncChar, EncKind,
    EncodeError, EncodingParams, Malformed, Slot,
};

/// Which input operation a descent through the encodings simulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PopKind {
    Pop1,
    Collapse,
    /// An order-1 collapse also removed the character below; finish its block.
    CollapseTail,
}

/// Steps of the literal check games.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Probe {
    /// E chooses what to inspect.
    Pick,
    Scan { pos: u32 },
    Seek1 { p: u32, i: u32 },
    /// Rest of the first block; `p`/`c` are `None` when the second block is scanned.
    Skip1 { p: Option<u32>, c: Option<EncKind> },
    Gap { p: Option<u32>, c: Option<EncKind> },
    Seek2 { p: u32, i: u32, c: EncKind },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrState {
    IncStart { r: u32, q: State },
    Inc { r: u32, a: Sym, q: State },
    Zero { r: u32, a: Sym, q: State },
    ZeroTest { r: u32, a: Sym, q: State },
    Copy { r: u32, a: Sym, q: State },
    CopyTest { r: u32, a: Sym, q: State },
    PopSim { kind: PopKind, player: Player, r: u32, q: State },
    Check { kind: CheckKind, r: u32 },
    Probe { r: u32, probe: Probe },
    EOver,
    AOver,
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |x: Option<u32>| x.map_or("-".to_string(), |v| v.to_string());
        let kind = |c: Option<EncKind>| match c {
            None => "-".to_string(),
            Some(k) => EncChar { rank: 0, kind: k }.to_string(),
        };
        match self {
            Probe::Pick => f.write_str("pick"),
            Probe::Scan { pos } => write!(f, "scan{pos}"),
            Probe::Seek1 { p, i } => write!(f, "seek{p}.{i}"),
            Probe::Skip1 { p, c } => write!(f, "skip{}.{}", opt(*p), kind(*c)),
            Probe::Gap { p, c } => write!(f, "gap{}.{}", opt(*p), kind(*c)),
            Probe::Seek2 { p, i, c } => write!(f, "seekb{p}.{i}.{}", kind(Some(*c))),
        }
    }
}

impl fmt::Display for PrState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrState::IncStart { r, q } => write!(f, "%inc({r},{q})"),
            PrState::Inc { r, a, q } => write!(f, "%inc({r},{a},{q})"),
            PrState::Zero { r, a, q } => write!(f, "%zero({r},{a},{q})"),
            PrState::ZeroTest { r, a, q } => write!(f, "%zerotest({r},{a},{q})"),
            PrState::Copy { r, a, q } => write!(f, "%copy({r},{a},{q})"),
            PrState::CopyTest { r, a, q } => write!(f, "%copytest({r},{a},{q})"),
            PrState::PopSim { kind, player, r, q } => {
                let k = match kind {
                    PopKind::Pop1 => "pop",
                    PopKind::Collapse => "collapse",
                    PopKind::CollapseTail => "collapsetail",
                };
                write!(f, "%{k}({player},{r},{q})")
            }
            PrState::Check { kind: CheckKind::Encoding, r } => write!(f, "%countercheck{r}"),
            PrState::Check { kind: CheckKind::Equals, r } => write!(f, "%equalscheck{r}"),
            PrState::Probe { r, probe } => write!(f, "%probe{r}.{probe}"),
            PrState::EOver => f.write_str("$eover"),
            PrState::AOver => f.write_str("$aover"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("poly reduction needs a parity game")]
    NotParity,
    #[error("poly reduction needs a rank-aware game")]
    NotRankAware,
    #[error("encoding width {0} exceeds 63 bits")]
    TooWide(u32),
}

/// The verdict at a leaf state: checks are won by A iff their predicate
/// holds; a push phase whose block can no longer become an encoding is lost
/// by A.
pub fn leaf_verdict(role: Role, params: &EncodingParams, top: &[Option<EncChar>]) -> Option<Player> {
    let win = |ok: bool| Some(if ok { Player::A } else { Player::E });
    match role {
        Role::Check { kind: CheckKind::Encoding, rank } => win(check_encoding(top, rank, params)),
        Role::Check { kind: CheckKind::Equals, rank } => win(check_equals(top, rank, params)),
        Role::Phase { rank } => (!is_template_suffix(&top_block(top, rank), params)).then_some(Player::E),
        Role::Plain | Role::Transient => None,
    }
}

/// Winner at a check state of `game` with the given stack; `None` elsewhere.
pub fn resolve_check(game: &dyn Game, q: &State, stack: &Stack<Sym>) -> Option<Player> {
    let role = game.role(q);
    if !matches!(role, Role::Check { .. }) {
        return None;
    }
    let params = game.encoding()?;
    let top: Vec<Option<EncChar>> = stack.top_chars().map(|c| game.counter_char(&c.sym)).collect();
    leaf_verdict(role, &params, &top)
}

pub struct PolyGame {
    inner: GameRef,
    params: EncodingParams,
    template: Vec<Slot>,
    /// Odd ranks carrying counters, ascending.
    odd: Vec<u32>,
    gadget: bool,
}

/// The safety game simulating the counter reduction with counters of `params.width` bits.
/// With `gadget`, checks are played out as explicit games instead of leaves.
pub fn reduce_poly(game: GameRef, params: EncodingParams, gadget: bool) -> Result<Arc<PolyGame>, PolyError> {
    if game.condition() != Condition::Parity {
        return Err(PolyError::NotParity);
    }
    if !game.is_rank_aware() {
        return Err(PolyError::NotRankAware);
    }
    if params.width > 63 {
        return Err(PolyError::TooWide(params.width));
    }
    let odd = (1..=game.max_rank()).filter(|r| r % 2 == 1).collect();
    let template = params.template();
    Ok(Arc::new(PolyGame { inner: game, params, template, odd, gadget }))
}

impl PolyGame {
    pub fn params(&self) -> EncodingParams {
        self.params
    }

    pub fn inner(&self) -> &GameRef {
        &self.inner
    }

    fn st(s: PrState) -> State {
        State::Pr(Arc::new(s))
    }

    fn own<'a>(&self, q: &'a State) -> Option<&'a PrState> {
        match q {
            State::Pr(s) => Some(s),
            _ => None,
        }
    }

    fn enc(&self, a: &Sym) -> Option<EncChar> {
        match a {
            Sym::Enc(e) => Some(*e),
            _ => None,
        }
    }

    fn is_counter(&self, a: &Sym) -> bool {
        matches!(a, Sym::Enc(_))
    }

    fn is_link(&self, a: &Sym) -> bool {
        matches!(a, Sym::Link(_))
    }

    fn next_odd(&self, r: u32) -> Option<u32> {
        self.odd.iter().copied().find(|&x| x >= r)
    }

    /// The state that pushes zero counters from rank `r` upward, then `a`.
    fn zero_from(&self, r: u32, a: Sym, q: State) -> State {
        Self::st(PrState::Zero { r, a, q })
    }

    fn check(&self, kind: CheckKind, r: u32) -> State {
        if self.gadget {
            let probe = match kind {
                CheckKind::Encoding => Probe::Scan { pos: 0 },
                CheckKind::Equals => Probe::Pick,
            };
            Self::st(PrState::Probe { r, probe })
        } else {
            Self::st(PrState::Check { kind, r })
        }
    }

    fn inc_start(&self, r: u32, q: State) -> State {
        Self::st(PrState::IncStart { r, q })
    }

    /// Translation of one input rule read at `(q, a)`.
    fn simulate(&self, q: &State, a: &Sym, rule: Rule) -> Rule {
        let rho = self.inner.rank(&rule.target);
        let xi: Option<RankFn> = self.inner.rank_fn(a);
        let t = rule.target;
        match rule.op {
            Op::Push(k) => Rule::new(Op::Push(k), self.inc_start(rho, t)),
            Op::Rewrite(b) => Rule::new(Op::Rewrite(b), self.inc_start(rho, t)),
            Op::Noop => Rule::new(Op::Noop, self.inc_start(rho, t)),
            Op::Pop(k) if k > 1 => {
                let r = xi.and_then(|f| f.level(k)).map_or(rho, |x| x.min(rho));
                Rule::new(Op::Pop(k), self.inc_start(r, t))
            }
            Op::PushChar(b) => {
                let o = self.inner.link_order(&b);
                Rule::new(Op::PushChar(Sym::Link(o)), Self::st(PrState::Copy { r: 1, a: b, q: t }))
            }
            Op::Pop(_) | Op::Collapse => {
                let (kind, w) = match rule.op {
                    Op::Collapse => (PopKind::Collapse, xi.map(|f| f.link())),
                    _ => (PopKind::Pop1, xi.and_then(|f| f.level(1))),
                };
                let r = w.map_or(rho, |x| x.min(rho));
                let s = PrState::PopSim { kind, player: self.inner.owner(q), r, q: t };
                Rule::new(Op::Pop(1), Self::st(s))
            }
        }
    }

    fn over(&self, p: Player) -> State {
        Self::st(match p {
            Player::E => PrState::EOver,
            Player::A => PrState::AOver,
        })
    }

    fn pr_rules(&self, s: &PrState, me: &State, x: &Sym) -> Vec<Rule> {
        let e = self.enc(x);
        match s {
            PrState::EOver | PrState::AOver => vec![Rule::new(Op::Noop, me.clone())],
            PrState::Check { .. } => Vec::new(),
            PrState::IncStart { r, q } => {
                if self.is_counter(x) || self.is_link(x) {
                    return Vec::new();
                }
                vec![Rule::new(Op::Pop(1), Self::st(PrState::Inc { r: *r, a: x.clone(), q: q.clone() }))]
            }
            PrState::Inc { r, a, q } => {
                let r = *r;
                let below = match e {
                    Some(c) if c.rank > r => return vec![Rule::new(Op::Pop(1), me.clone())],
                    Some(c) if c.rank == r => {
                        return match c.kind {
                            EncKind::Bit { level: 0, one: false } => vec![Rule::new(
                                Op::Rewrite(Sym::Enc(EncChar::bit(r, 0, true))),
                                self.zero_from(r, a.clone(), q.clone()),
                            )],
                            _ => vec![Rule::new(Op::Pop(1), me.clone())],
                        }
                    }
                    Some(_) => true,
                    None => self.is_link(x),
                };
                if !below {
                    return Vec::new();
                }
                if r % 2 == 0 {
                    vec![Rule::new(Op::Noop, self.zero_from(r + 1, a.clone(), q.clone()))]
                } else {
                    vec![Rule::new(Op::Noop, self.over(Player::E))]
                }
            }
            PrState::Zero { r, a, q } => match self.next_odd(*r) {
                Some(r2) if r2 != *r => vec![Rule::new(Op::Noop, self.zero_from(r2, a.clone(), q.clone()))],
                Some(r) => {
                    let mut out: Vec<Rule> = self
                        .params
                        .alphabet(r)
                        .into_iter()
                        .filter(|c| !matches!(c.kind, EncKind::Bit { level: 0, one: true }))
                        .map(|c| Rule::new(Op::PushChar(Sym::Enc(c)), me.clone()))
                        .collect();
                    out.push(Rule::new(Op::Noop, Self::st(PrState::ZeroTest { r, a: a.clone(), q: q.clone() })));
                    out
                }
                None => vec![Rule::new(Op::PushChar(a.clone()), q.clone())],
            },
            PrState::ZeroTest { r, a, q } => {
                let accept = match self.next_odd(r + 2) {
                    Some(r2) => Rule::new(Op::Noop, self.zero_from(r2, a.clone(), q.clone())),
                    None => Rule::new(Op::PushChar(a.clone()), q.clone()),
                };
                vec![Rule::new(Op::Noop, self.check(CheckKind::Encoding, *r)), accept]
            }
            PrState::Copy { r, a, q } => match self.next_odd(*r) {
                Some(r2) if r2 != *r => vec![Rule::new(Op::Noop, Self::st(PrState::Copy { r: r2, a: a.clone(), q: q.clone() }))],
                Some(r) => {
                    let mut out: Vec<Rule> = self
                        .params
                        .alphabet(r)
                        .into_iter()
                        .map(|c| Rule::new(Op::PushChar(Sym::Enc(c)), me.clone()))
                        .collect();
                    out.push(Rule::new(Op::Noop, Self::st(PrState::CopyTest { r, a: a.clone(), q: q.clone() })));
                    out
                }
                None => vec![Rule::new(Op::Noop, self.inc_after_copy(a, q))],
            },
            PrState::CopyTest { r, a, q } => {
                let accept = match self.next_odd(r + 2) {
                    Some(r2) => Self::st(PrState::Copy { r: r2, a: a.clone(), q: q.clone() }),
                    None => self.inc_after_copy(a, q),
                };
                vec![Rule::new(Op::Noop, self.check(CheckKind::Equals, *r)), Rule::new(Op::Noop, accept)]
            }
            PrState::PopSim { kind, player, r, q } => {
                if self.is_counter(x) {
                    return vec![Rule::new(Op::Pop(1), me.clone())];
                }
                let Sym::Link(o) = x else { return Vec::new() };
                let next = self.inc_start(*r, q.clone());
                let op = match kind {
                    PopKind::Pop1 | PopKind::CollapseTail => Rule::new(Op::Pop(1), next),
                    PopKind::Collapse if *o >= 2 => Rule::new(Op::Collapse, next),
                    PopKind::Collapse => {
                        let s = PrState::PopSim { kind: PopKind::CollapseTail, player: *player, r: *r, q: q.clone() };
                        Rule::new(Op::Collapse, Self::st(s))
                    }
                };
                vec![op, Rule::new(Op::Noop, self.over(*player))]
            }
            PrState::Probe { r, probe } => self.probe_rules(*r, probe, me, e),
        }
    }

    fn inc_after_copy(&self, a: &Sym, q: &State) -> State {
        Self::st(PrState::Inc { r: self.inner.rank(q), a: a.clone(), q: q.clone() })
    }

    fn probe_rules(&self, r: u32, probe: &Probe, me: &State, e: Option<EncChar>) -> Vec<Rule> {
        let mine = e.filter(|c| c.rank == r).map(|c| c.kind);
        let len = self.template.len() as u32;
        let go = |p: Probe| Self::st(PrState::Probe { r, probe: p });
        let fits = |i: u32| mine.is_some_and(|k| self.template.get(i as usize).is_some_and(|s| s.admits(k)));
        let refuted = vec![Rule::new(Op::Noop, self.over(Player::A))];
        let upheld = vec![Rule::new(Op::Noop, self.over(Player::E))];
        match probe {
            Probe::Pick => {
                let mut out = vec![
                    Rule::new(Op::Noop, go(Probe::Scan { pos: 0 })),
                    Rule::new(Op::Noop, go(Probe::Skip1 { p: None, c: None })),
                ];
                out.extend((0..len).map(|p| Rule::new(Op::Noop, go(Probe::Seek1 { p, i: 0 }))));
                out
            }
            Probe::Scan { pos } if *pos == len => {
                if mine.is_some() {
                    refuted
                } else {
                    upheld
                }
            }
            Probe::Scan { pos } => {
                if fits(*pos) {
                    vec![Rule::new(Op::Pop(1), go(Probe::Scan { pos: pos + 1 }))]
                } else {
                    refuted
                }
            }
            Probe::Seek1 { p, i } => match mine {
                Some(k) if fits(*i) && i == p => vec![Rule::new(Op::Pop(1), go(Probe::Skip1 { p: Some(*p), c: Some(k) }))],
                Some(_) if fits(*i) => vec![Rule::new(Op::Pop(1), go(Probe::Seek1 { p: *p, i: i + 1 }))],
                _ => refuted,
            },
            Probe::Skip1 { p, c } => match mine {
                Some(_) => vec![Rule::new(Op::Pop(1), me.clone())],
                None => vec![Rule::new(Op::Noop, go(Probe::Gap { p: *p, c: *c }))],
            },
            Probe::Gap { p, c } => match (mine, p, c) {
                (None, _, _) => vec![Rule::new(Op::Pop(1), me.clone())],
                (Some(_), Some(p), Some(c)) => vec![Rule::new(Op::Noop, go(Probe::Seek2 { p: *p, i: 0, c: *c }))],
                (Some(_), _, _) => vec![Rule::new(Op::Noop, go(Probe::Scan { pos: 0 }))],
            },
            Probe::Seek2 { p, i, c } => match mine {
                Some(k) if fits(*i) && i == p => {
                    if k == *c {
                        upheld
                    } else {
                        refuted
                    }
                }
                Some(_) if fits(*i) => vec![Rule::new(Op::Pop(1), go(Probe::Seek2 { p: *p, i: i + 1, c: *c }))],
                _ => refuted,
            },
        }
    }
}

impl Game for PolyGame {
    fn order(&self) -> u8 {
        self.inner.order()
    }

    fn condition(&self) -> Condition {
        Condition::Safety
    }

    fn initial_state(&self) -> State {
        self.zero_from(1, self.inner.initial_symbol(), self.inner.initial_state())
    }

    fn initial_symbol(&self) -> Sym {
        Sym::Link(self.inner.link_order(&self.inner.initial_symbol()))
    }

    fn owner(&self, q: &State) -> Player {
        match self.own(q) {
            None => self.inner.owner(q),
            Some(PrState::PopSim { player, .. }) => *player,
            Some(PrState::Probe { probe: Probe::Gap { .. }, .. }) => Player::A,
            Some(PrState::IncStart { .. } | PrState::Inc { .. } | PrState::Zero { .. } | PrState::Copy { .. }) => {
                Player::A
            }
            Some(_) => Player::E,
        }
    }

    fn rank(&self, q: &State) -> u32 {
        match self.own(q) {
            Some(PrState::EOver) => 1,
            _ => 2,
        }
    }

    fn max_rank(&self) -> u32 {
        2
    }

    fn link_order(&self, a: &Sym) -> u8 {
        match a {
            Sym::Link(o) => *o,
            _ => 1,
        }
    }

    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule> {
        match self.own(q) {
            Some(s) => self.pr_rules(s, q, a),
            None => {
                if self.is_counter(a) || self.is_link(a) {
                    return Vec::new();
                }
                self.inner.rules(q, a).into_iter().map(|r| self.simulate(q, a, r)).collect()
            }
        }
    }

    fn state_count(&self) -> BigUint {
        let q = self.inner.state_count();
        let s = self.inner.symbol_count();
        let m1 = BigUint::from(self.inner.max_rank() + 1);
        let checks = BigUint::from(2 * self.odd.len());
        let probes = if self.gadget {
            let l = self.template.len() as u64;
            let kinds = 2 * self.params.depth as u64 + self.params.index_range() as u64;
            BigUint::from(self.odd.len() as u64 * (2 + l + 1 + l * l + 2 * (l * kinds + 1) + l * l * kinds))
        } else {
            BigUint::from(0u32)
        };
        &q + &q * &m1 * (BigUint::from(1u32 + 6) + BigUint::from(4u32) * &s) + checks + probes + 2u32
    }

    fn symbol_count(&self) -> BigUint {
        let per: usize = self.params.alphabet(1).len();
        self.inner.symbol_count() + BigUint::from(per * self.odd.len() + self.inner.order() as usize)
    }

    fn role(&self, q: &State) -> Role {
        match self.own(q) {
            Some(PrState::Check { kind, r }) => Role::Check { kind: *kind, rank: *r },
            Some(PrState::Zero { r, .. } | PrState::Copy { r, .. }) if self.odd.contains(r) => Role::Phase { rank: *r },
            Some(_) => Role::Plain,
            None => self.inner.role(q),
        }
    }

    fn encoding(&self) -> Option<EncodingParams> {
        Some(self.params)
    }

    fn ra_depth(&self) -> u8 {
        self.inner.ra_depth()
    }
}

/// The rule families of the poly reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrFamily {
    Push,
    CharPush,
    Rewrite,
    PopHigher,
    PopStart,
    PopDescend,
    PopApply,
    PopFail,
    Sink,
    CopyPush,
    CopyDone,
    CopyChallenge,
    CopyNext,
    CopyFinish,
    IncSave,
    IncPopHigher,
    IncEvenDone,
    IncPopLow,
    IncFlip,
    IncOverflow,
    ZeroPush,
    ZeroDone,
    ZeroChallenge,
    ZeroNext,
    ZeroFinish,
    /// Skipping ranks without counters.
    Advance,
    Probe,
}

/// Assigns a rule of `g` read at `(q, a)` to its family; `None` if it fits none.
pub fn classify_poly(g: &PolyGame, q: &State, a: &Sym, rule: &Rule) -> Option<PrFamily> {
    if !g.rules(q, a).contains(rule) {
        return None;
    }
    let t = g.own(&rule.target);
    let Some(s) = g.own(q) else {
        let src = g.inner.rules(q, a).into_iter().find(|r| g.simulate(q, a, r.clone()) == *rule)?;
        return Some(match src.op {
            Op::Push(_) => PrFamily::Push,
            Op::PushChar(_) => PrFamily::CharPush,
            Op::Rewrite(_) | Op::Noop => PrFamily::Rewrite,
            Op::Pop(k) if k > 1 => PrFamily::PopHigher,
            Op::Pop(_) | Op::Collapse => PrFamily::PopStart,
        });
    };
    use PrFamily::*;
    Some(match (s, &rule.op, t) {
        (PrState::EOver | PrState::AOver, _, _) => Sink,
        (PrState::Probe { .. }, _, _) => Probe,
        (PrState::IncStart { .. }, _, _) => IncSave,
        (PrState::Inc { .. }, Op::Rewrite(_), _) => IncFlip,
        (PrState::Inc { .. }, Op::Noop, Some(PrState::EOver)) => IncOverflow,
        (PrState::Inc { .. }, Op::Noop, _) => IncEvenDone,
        (PrState::Inc { r, .. }, Op::Pop(1), _) => match g.enc(a) {
            Some(c) if c.rank > *r => IncPopHigher,
            _ => IncPopLow,
        },
        (PrState::Zero { .. }, Op::PushChar(Sym::Enc(_)), _) => ZeroPush,
        (PrState::Zero { .. }, Op::PushChar(_), _) => ZeroFinish,
        (PrState::Zero { .. }, Op::Noop, Some(PrState::ZeroTest { .. })) => ZeroDone,
        (PrState::Zero { .. }, Op::Noop, _) => Advance,
        (PrState::ZeroTest { .. }, Op::PushChar(_), _) => ZeroFinish,
        (PrState::ZeroTest { .. }, Op::Noop, Some(PrState::Zero { .. })) => ZeroNext,
        (PrState::ZeroTest { .. }, _, _) => ZeroChallenge,
        (PrState::Copy { .. }, Op::PushChar(_), _) => CopyPush,
        (PrState::Copy { .. }, Op::Noop, Some(PrState::CopyTest { .. })) => CopyDone,
        (PrState::Copy { .. }, Op::Noop, Some(PrState::Copy { .. })) => Advance,
        (PrState::Copy { .. }, Op::Noop, _) => CopyFinish,
        (PrState::CopyTest { .. }, _, Some(PrState::Copy { .. })) => CopyNext,
        (PrState::CopyTest { .. }, _, Some(PrState::Inc { .. })) => CopyFinish,
        (PrState::CopyTest { .. }, _, _) => CopyChallenge,
        (PrState::PopSim { .. }, Op::Noop, _) => PopFail,
        (PrState::PopSim { .. }, _, _) if g.is_counter(a) => PopDescend,
        (PrState::PopSim { .. }, _, _) => PopApply,
        _ => return None,
    })
}
