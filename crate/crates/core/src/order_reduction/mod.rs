//! Order reduction: an order-n game becomes an order-(n-1) game in which
//! E claims where each `push_n` returns and A either checks or skips.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::model::explicit::{materialize, MaterializeError};
use crate::model::game::{Condition, Game, GameRef, Player, Role, Rule};
use crate::model::ids::{State, Sym};
use crate::model::op::Op;
use crate::rank_aware::RankFn;

/// A claim: per rank, the states a `pop_n` may return to. `Undef` marks the
/// bottom level, where no `pop_n` is possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guess {
    Undef,
    Sets(Arc<Vec<Vec<State>>>),
}

impl Guess {
    pub fn contains(&self, rank: u32, q: &State) -> bool {
        match self {
            Guess::Undef => false,
            Guess::Sets(s) => s.get(rank as usize).is_some_and(|v| v.binary_search(q).is_ok()),
        }
    }

    pub fn sets(&self) -> Option<&[Vec<State>]> {
        match self {
            Guess::Undef => None,
            Guess::Sets(s) => Some(s),
        }
    }
}

impl fmt::Display for Guess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guess::Undef => f.write_str("_"),
            Guess::Sets(s) => {
                let parts: Vec<String> = s
                    .iter()
                    .enumerate()
                    .map(|(r, v)| {
                        let mut names: Vec<String> = v.iter().map(State::to_string).collect();
                        names.sort();
                        if names.is_empty() {
                            format!("{r}:-")
                        } else {
                            format!("{r}:{}", names.join(","))
                        }
                    })
                    .collect();
                write!(f, "R{{{}}}", parts.join("|"))
            }
        }
    }
}

/// An order-n character annotated with the claim in force when it was pushed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClaimedSym {
    pub base: Sym,
    pub guess: Guess,
}

impl fmt::Display for ClaimedSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.base, self.guess)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrState {
    Base { q: State, guess: Guess },
    /// E is about to claim the outcome of a `push_n` leading to `target`.
    Start { q: State, guess: Guess, target: State },
    /// A chooses between entering the push and skipping to a claimed state.
    Claim { q: State, guess: Guess, target: State, claim: Guess },
    Skip { q: State, guess: Guess, theta: u32 },
    Win,
    Lose,
}

impl fmt::Display for OrState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrState::Base { q, guess } => write!(f, "({q},{guess})"),
            OrState::Start { q, guess, target } => write!(f, "({q},{guess}>{target})"),
            OrState::Claim { q, guess, target, claim } => write!(f, "({q},{guess}>{target},{claim})"),
            OrState::Skip { q, guess, theta } => write!(f, "({q},{guess}:{theta})"),
            OrState::Win => f.write_str("$ewin"),
            OrState::Lose => f.write_str("$elose"),
        }
    }
}

/// Which `(rank, state)` pairs claims may mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimDomain {
    /// Pairs some `pop_n` or order-n collapse of the input can evaluate.
    Relevant,
    /// Every state at every rank.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("order reduction needs order at least 2")]
    OrderOne,
    #[error("order reduction needs a rank-aware game")]
    NotRankAware,
    #[error("{0} claim pairs exceed the limit of {1}")]
    TooManyClaims(usize, usize),
    #[error(transparent)]
    Closure(#[from] MaterializeError),
}

#[derive(Clone, Debug)]
pub struct OrderOptions {
    pub domain: ClaimDomain,
    /// Claims are listed up front when the pair count is at most this.
    pub eager_bits: usize,
    pub max_bits: usize,
    pub max_closure: usize,
}

impl Default for OrderOptions {
    fn default() -> Self {
        OrderOptions { domain: ClaimDomain::Relevant, eager_bits: 12, max_bits: 22, max_closure: 200_000 }
    }
}

pub struct OrderGame {
    inner: GameRef,
    n: u8,
    m: u32,
    pairs: Vec<(u32, State)>,
    eager: Option<Vec<Guess>>,
    win_rank: u32,
}

pub fn reduce_order(game: GameRef) -> Result<Arc<OrderGame>, OrderError> {
    reduce_order_with(game, &OrderOptions::default())
}

pub fn reduce_order_with(game: GameRef, opts: &OrderOptions) -> Result<Arc<OrderGame>, OrderError> {
    let n = game.order();
    if n < 2 {
        return Err(OrderError::OrderOne);
    }
    if !game.is_rank_aware() {
        return Err(OrderError::NotRankAware);
    }
    let closure = materialize(&*game, opts.max_closure)?;
    let m = game.max_rank();
    let mut pairs = BTreeSet::new();
    match opts.domain {
        ClaimDomain::Full => {
            for d in &closure.states {
                for r in 0..=m {
                    pairs.insert((r, d.state.clone()));
                }
            }
        }
        ClaimDomain::Relevant => {
            for (_, a, rule) in &closure.rules {
                let f = game.rank_fn(a);
                let theta = match rule.op {
                    Op::Pop(k) if k == n => f.and_then(|f| f.level(n)),
                    Op::Collapse if game.link_order(a) == n => f.map(|f| f.link()),
                    _ => None,
                };
                if let Some(t) = theta {
                    pairs.insert((t, rule.target.clone()));
                }
            }
        }
    }
    let pairs: Vec<(u32, State)> = pairs.into_iter().collect();
    if pairs.len() > opts.max_bits {
        return Err(OrderError::TooManyClaims(pairs.len(), opts.max_bits));
    }
    let win_rank = match game.condition() {
        Condition::Safety => 2,
        Condition::Parity => closure.states.iter().map(|d| d.rank).filter(|r| r % 2 == 0).min().unwrap_or(0),
    };
    let mut g = OrderGame { inner: game, n, m, pairs, eager: None, win_rank };
    if g.pairs.len() <= opts.eager_bits {
        g.eager = Some((0..g.claim_count()).map(|i| g.claim(i)).collect());
    }
    Ok(Arc::new(g))
}

impl OrderGame {
    pub fn claim_pairs(&self) -> &[(u32, State)] {
        &self.pairs
    }

    fn claim_count(&self) -> u64 {
        1u64 << self.pairs.len()
    }

    /// The claim whose pairs are selected by the bits of `mask`.
    fn claim(&self, mask: u64) -> Guess {
        let mut sets = vec![Vec::new(); self.m as usize + 1];
        for (i, (r, q)) in self.pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sets[*r as usize].push(q.clone());
            }
        }
        for s in &mut sets {
            s.sort();
        }
        Guess::Sets(Arc::new(sets))
    }

    fn claims(&self) -> Vec<Guess> {
        match &self.eager {
            Some(v) => v.clone(),
            None => (0..self.claim_count()).map(|i| self.claim(i)).collect(),
        }
    }

    fn st(s: OrState) -> State {
        State::Or(Arc::new(s))
    }

    fn own<'a>(&self, q: &'a State) -> Option<&'a OrState> {
        match q {
            State::Or(s) => Some(s),
            _ => None,
        }
    }

    fn split<'a>(&self, a: &'a Sym) -> (&'a Sym, Option<&'a Guess>) {
        match a {
            Sym::Claimed(c) => (&c.base, Some(&c.guess)),
            _ => (a, None),
        }
    }

    fn tagged(&self, b: Sym, g: &Guess) -> Sym {
        Sym::Claimed(Arc::new(ClaimedSym { base: b, guess: g.clone() }))
    }

    fn verdict(&self, g: &Guess, rank: Option<u32>, target: &State) -> State {
        let win = rank.is_some_and(|r| g.contains(r, target));
        Self::st(if win { OrState::Win } else { OrState::Lose })
    }

    fn base_rules(&self, q: &State, guess: &Guess, a: &Sym) -> Vec<Rule> {
        let (base, tag) = self.split(a);
        let xi: Option<RankFn> = self.inner.rank_fn(base);
        let n = self.n;
        let mut out = Vec::new();
        for rule in self.inner.rules(q, base) {
            let next = Self::st(OrState::Base { q: rule.target.clone(), guess: guess.clone() });
            let r = match rule.op {
                Op::Push(k) if k == n => Rule::new(
                    Op::Noop,
                    Self::st(OrState::Start { q: q.clone(), guess: guess.clone(), target: rule.target }),
                ),
                Op::Pop(k) if k == n => {
                    if *guess == Guess::Undef {
                        continue;
                    }
                    Rule::new(Op::Noop, self.verdict(guess, xi.as_ref().and_then(|f| f.level(n)), &rule.target))
                }
                Op::PushChar(b) if self.inner.link_order(&b) == n => Rule::new(Op::PushChar(self.tagged(b, guess)), next),
                Op::Rewrite(b) => match tag {
                    Some(g) => Rule::new(Op::Rewrite(self.tagged(b, g)), next),
                    None => Rule::new(Op::Rewrite(b), next),
                },
                Op::Collapse => match tag {
                    Some(Guess::Undef) => continue,
                    Some(g) => Rule::new(Op::Noop, self.verdict(g, xi.as_ref().map(|f| f.link()), &rule.target)),
                    None => Rule::new(Op::Collapse, next),
                },
                op => Rule::new(op, next),
            };
            out.push(r);
        }
        out
    }
}

impl Game for OrderGame {
    fn order(&self) -> u8 {
        self.n - 1
    }

    fn condition(&self) -> Condition {
        self.inner.condition()
    }

    fn initial_state(&self) -> State {
        Self::st(OrState::Base { q: self.inner.initial_state(), guess: Guess::Undef })
    }

    fn initial_symbol(&self) -> Sym {
        self.inner.initial_symbol()
    }

    fn owner(&self, q: &State) -> Player {
        match self.own(q) {
            Some(OrState::Base { q, .. }) => self.inner.owner(q),
            Some(OrState::Claim { .. }) => Player::A,
            _ => Player::E,
        }
    }

    fn rank(&self, q: &State) -> u32 {
        match self.own(q) {
            Some(OrState::Base { q, .. } | OrState::Start { q, .. } | OrState::Claim { q, .. }) => self.inner.rank(q),
            Some(OrState::Skip { theta, .. }) => *theta,
            Some(OrState::Win) => self.win_rank,
            _ => 1,
        }
    }

    fn max_rank(&self) -> u32 {
        self.inner.max_rank().max(self.win_rank).max(1)
    }

    fn link_order(&self, a: &Sym) -> u8 {
        match self.split(a) {
            (_, Some(_)) => 1,
            (b, None) => {
                let k = self.inner.link_order(b);
                if k >= self.n {
                    1
                } else {
                    k
                }
            }
        }
    }

    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule> {
        let Some(s) = self.own(q) else { return Vec::new() };
        match s {
            OrState::Win | OrState::Lose => vec![Rule::new(Op::Noop, q.clone())],
            OrState::Base { q, guess } => self.base_rules(q, guess, a),
            OrState::Start { q, guess, target } => self
                .claims()
                .into_iter()
                .map(|claim| {
                    let c = OrState::Claim { q: q.clone(), guess: guess.clone(), target: target.clone(), claim };
                    Rule::new(Op::Noop, Self::st(c))
                })
                .collect(),
            OrState::Claim { guess, target, claim, .. } => {
                let mut out =
                    vec![Rule::new(Op::Noop, Self::st(OrState::Base { q: target.clone(), guess: claim.clone() }))];
                for (theta, set) in claim.sets().unwrap_or(&[]).iter().enumerate() {
                    for q2 in set {
                        let s = OrState::Skip { q: q2.clone(), guess: guess.clone(), theta: theta as u32 };
                        out.push(Rule::new(Op::Noop, Self::st(s)));
                    }
                }
                out
            }
            OrState::Skip { q, guess, .. } => {
                vec![Rule::new(Op::Noop, Self::st(OrState::Base { q: q.clone(), guess: guess.clone() }))]
            }
        }
    }

    fn state_count(&self) -> BigUint {
        let q = self.inner.state_count();
        let claims = BigUint::from(1u32) << self.pairs.len();
        let guesses = &claims + 1u32;
        let per = BigUint::from(1u32) + &q + &q * &claims + BigUint::from(self.m + 1);
        q * guesses * per + 2u32
    }

    fn symbol_count(&self) -> BigUint {
        let s = self.inner.symbol_count();
        let guesses = (BigUint::from(1u32) << self.pairs.len()) + 1u32;
        &s + &s * guesses
    }

    fn rank_fn(&self, _a: &Sym) -> Option<RankFn> {
        None
    }

    fn role(&self, _q: &State) -> Role {
        Role::Plain
    }
}

/// The rule families of the order reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrFamily {
    Operation,
    Rewrite,
    Start,
    Claim,
    Skip1,
    Skip2,
    Push,
    CharPush,
    Pop,
    Collapse,
    Sink,
}

/// Assigns a rule of `g` read at `(q, a)` to its family; `None` if it fits none.
pub fn classify_order(g: &OrderGame, q: &State, a: &Sym, rule: &Rule) -> Option<OrFamily> {
    let s = g.own(q)?;
    let t = g.own(&rule.target)?;
    let noop = rule.op == Op::Noop;
    match (s, t) {
        (OrState::Win, OrState::Win) | (OrState::Lose, OrState::Lose) if noop => Some(OrFamily::Sink),
        (OrState::Base { .. }, OrState::Start { .. }) if noop => Some(OrFamily::Start),
        (OrState::Start { q, guess, target }, OrState::Claim { q: q2, guess: g2, target: t2, .. }) => {
            (noop && q == q2 && guess == g2 && target == t2).then_some(OrFamily::Claim)
        }
        (OrState::Claim { guess, claim, .. }, OrState::Skip { q: q2, guess: g2, theta }) => {
            (noop && guess == g2 && claim.contains(*theta, q2)).then_some(OrFamily::Skip1)
        }
        (OrState::Claim { target, claim, .. }, OrState::Base { q: q2, guess: g2 }) => {
            (noop && target == q2 && claim == g2).then_some(OrFamily::Push)
        }
        (OrState::Skip { q, guess, .. }, OrState::Base { q: q2, guess: g2 }) => {
            (noop && q == q2 && guess == g2).then_some(OrFamily::Skip2)
        }
        (OrState::Base { q, guess }, OrState::Win | OrState::Lose) if noop => {
            let (base, tag) = g.split(a);
            let xi = g.inner.rank_fn(base)?;
            let ok = |src: &Rule, fam: OrFamily, gs: &Guess, r: u32| {
                let win = gs.contains(r, &src.target);
                (win == (*t == OrState::Win)).then_some(fam)
            };
            g.inner.rules(q, base).iter().find_map(|src| match (&src.op, tag) {
                (Op::Pop(k), _) if *k == g.n && *guess != Guess::Undef => ok(src, OrFamily::Pop, guess, xi.level(g.n)?),
                (Op::Collapse, Some(gs)) if *gs != Guess::Undef => ok(src, OrFamily::Collapse, gs, xi.link()),
                _ => None,
            })
        }
        (OrState::Base { q, guess }, OrState::Base { q: q2, guess: g2 }) if guess == g2 => {
            let (base, tag) = g.split(a);
            g.inner.rules(q, base).iter().filter(|src| src.target == *q2).find_map(|src| match (&src.op, &rule.op) {
                (Op::Rewrite(b), Op::Rewrite(b2)) => {
                    let want = match tag {
                        Some(gs) => g.tagged(b.clone(), gs),
                        None => b.clone(),
                    };
                    (want == *b2).then_some(OrFamily::Rewrite)
                }
                (Op::PushChar(b), Op::PushChar(b2)) if g.inner.link_order(b) == g.n => {
                    (g.tagged(b.clone(), guess) == *b2).then_some(OrFamily::CharPush)
                }
                (Op::Collapse, Op::Collapse) if tag.is_none() => Some(OrFamily::Operation),
                (Op::Push(k), _) | (Op::Pop(k), _) if *k == g.n => None,
                (Op::Collapse, _) | (Op::Rewrite(_), _) => None,
                (o, o2) => (o == o2).then_some(OrFamily::Operation),
            })
        }
        _ => None,
    }
}

/// Sizes of an order reduction against the closed-form bounds.
#[derive(Clone, Debug)]
pub struct SizeReport {
    pub states: BigUint,
    pub symbols: BigUint,
    pub state_bound_log2: f64,
    pub symbol_bound_log2: f64,
}

impl SizeReport {
    pub fn states_ok(&self) -> bool {
        log2(&self.states) <= self.state_bound_log2 + 1e-9
    }

    pub fn symbols_ok(&self) -> bool {
        log2(&self.symbols) <= self.symbol_bound_log2 + 1e-9
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "states {} (log2 {:.2} <= {:.2}) symbols {} (log2 {:.2} <= {:.2})",
            self.states,
            log2(&self.states),
            self.state_bound_log2,
            self.symbols,
            log2(&self.symbols),
            self.symbol_bound_log2
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AuditError {
    #[error("state count bound violated: {0}")]
    States(String),
    #[error("alphabet bound violated: {0}")]
    Symbols(String),
}

pub fn log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(53);
    let top: BigUint = x >> shift;
    let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
    top.log2() + shift as f64
}

/// Checks `|states| <= 4 s^2 m'^2 2^(2 s m')` and `|alphabet| <= s + s 2^(s m')`
/// where `s` is the input size and `m'` the number of ranks.
pub fn audit_sizes(input: &dyn Game, output: &dyn Game) -> Result<SizeReport, AuditError> {
    let s = input.size();
    let ls = log2(&s);
    let sf = 2f64.powf(ls);
    let mp = (input.max_rank() + 1) as f64;
    let state_bound_log2 = 2.0 + 2.0 * ls + 2.0 * mp.log2() + 2.0 * sf * mp;
    let symbol_bound_log2 = ls + (1.0 + 2f64.powf(sf * mp).max(1.0)).log2().max(sf * mp);
    let report =
        SizeReport { states: output.state_count(), symbols: output.symbol_count(), state_bound_log2, symbol_bound_log2 };
    if !report.states_ok() {
        return Err(AuditError::States(report.to_string()));
    }
    if !report.symbols_ok() {
        return Err(AuditError::Symbols(report.to_string()));
    }
    Ok(report)
}
