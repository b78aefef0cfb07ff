use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use super::game::{CheckKind, Condition, Game, Player, Role, Rule};
use super::ids::{State, Sym};
use super::op::Op;
use crate::poly::{EncChar, EncodingParams};
use crate::rank_aware::RankFn;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDecl {
    pub state: State,
    pub owner: Player,
    pub rank: u32,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymDecl {
    pub sym: Sym,
    pub order: u8,
    pub rank_fn: Option<RankFn>,
    pub counter: Option<EncChar>,
}

/// A game whose components are listed explicitly (parsed or materialized).
#[derive(Clone, Debug)]
pub struct ExplicitGame {
    pub order: u8,
    pub condition: Condition,
    pub states: Vec<StateDecl>,
    pub symbols: Vec<SymDecl>,
    pub initial_state: State,
    pub initial_symbol: Sym,
    /// All rules `(q, a, rule)` in declaration order.
    pub rules: Vec<(State, Sym, Rule)>,
    pub rank_aware: bool,
    pub encoding: Option<EncodingParams>,
    state_index: HashMap<State, usize>,
    sym_index: HashMap<Sym, usize>,
    rule_index: HashMap<(usize, usize), Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("undeclared state `{0}`")]
    UnknownState(String),
    #[error("undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("empty {0} block")]
    Empty(&'static str),
}

impl ExplicitGame {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        order: u8,
        condition: Condition,
        states: Vec<StateDecl>,
        symbols: Vec<SymDecl>,
        initial_state: State,
        initial_symbol: Sym,
        rules: Vec<(State, Sym, Rule)>,
        rank_aware: bool,
        encoding: Option<EncodingParams>,
    ) -> Result<Self, BuildError> {
        if states.is_empty() {
            return Err(BuildError::Empty("states"));
        }
        if symbols.is_empty() {
            return Err(BuildError::Empty("alphabet"));
        }
        let mut state_index = HashMap::new();
        for (i, d) in states.iter().enumerate() {
            if state_index.insert(d.state.clone(), i).is_some() {
                return Err(BuildError::Duplicate(d.state.to_string()));
            }
        }
        let mut sym_index = HashMap::new();
        for (i, d) in symbols.iter().enumerate() {
            if sym_index.insert(d.sym.clone(), i).is_some() {
                return Err(BuildError::Duplicate(d.sym.to_string()));
            }
        }
        let find_state = |q: &State| state_index.get(q).copied().ok_or_else(|| BuildError::UnknownState(q.to_string()));
        let find_sym = |a: &Sym| sym_index.get(a).copied().ok_or_else(|| BuildError::UnknownSymbol(a.to_string()));
        find_state(&initial_state)?;
        find_sym(&initial_symbol)?;
        let mut rule_index: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, (q, a, r)) in rules.iter().enumerate() {
            let key = (find_state(q)?, find_sym(a)?);
            find_state(&r.target)?;
            if let Some(b) = r.op.symbol() {
                find_sym(b)?;
            }
            rule_index.entry(key).or_default().push(i);
        }
        Ok(ExplicitGame {
            order,
            condition,
            states,
            symbols,
            initial_state,
            initial_symbol,
            rules,
            rank_aware,
            encoding,
            state_index,
            sym_index,
            rule_index,
        })
    }

    pub fn state_decl(&self, q: &State) -> Option<&StateDecl> {
        self.state_index.get(q).map(|&i| &self.states[i])
    }

    pub fn sym_decl(&self, a: &Sym) -> Option<&SymDecl> {
        self.sym_index.get(a).map(|&i| &self.symbols[i])
    }

    /// Static well-formedness diagnostics.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let n = self.order;
        if n == 0 {
            out.push(Diagnostic::new(DiagKind::OpOrder, "order must be at least 1".into()));
        }
        for d in &self.symbols {
            if d.order == 0 || d.order > n {
                out.push(Diagnostic::new(
                    DiagKind::SymbolOrder,
                    format!("symbol `{}` has link order {} outside [1, {n}]", d.sym, d.order),
                ));
            }
        }
        if self.condition == Condition::Safety {
            for d in &self.states {
                if d.rank != 1 && d.rank != 2 {
                    out.push(Diagnostic::new(
                        DiagKind::SafetyRank,
                        format!("safety game state `{}` has rank {} outside {{1,2}}", d.state, d.rank),
                    ));
                }
            }
        }
        for (q, a, r) in &self.rules {
            let bad = match &r.op {
                Op::Push(k) => *k < 2 || *k > n,
                Op::Pop(k) => *k < 1 || *k > n,
                _ => false,
            };
            if bad {
                out.push(Diagnostic::new(DiagKind::OpOrder, format!("rule `{q} {a} {} {}`: order out of range", r.op, r.target)));
            }
            if let Op::Rewrite(b) = &r.op {
                let oa = self.sym_decl(a).map(|d| d.order);
                let ob = self.sym_decl(b).map(|d| d.order);
                if oa != ob {
                    out.push(Diagnostic::new(
                        DiagKind::RewriteOrder,
                        format!("rule `{q} {a} {} {}` changes link order", r.op, r.target),
                    ));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagKind {
    RewriteOrder,
    OpOrder,
    SymbolOrder,
    SafetyRank,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagKind,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagKind, message: String) -> Self {
        Diagnostic { kind, message }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl Game for ExplicitGame {
    fn order(&self) -> u8 {
        self.order
    }

    fn condition(&self) -> Condition {
        self.condition
    }

    fn initial_state(&self) -> State {
        self.initial_state.clone()
    }

    fn initial_symbol(&self) -> Sym {
        self.initial_symbol.clone()
    }

    fn owner(&self, q: &State) -> Player {
        match q {
            State::Sink(_) => Player::E,
            _ => self.state_decl(q).map_or(Player::E, |d| d.owner),
        }
    }

    fn rank(&self, q: &State) -> u32 {
        self.state_decl(q).map_or(0, |d| d.rank)
    }

    fn max_rank(&self) -> u32 {
        self.states.iter().map(|d| d.rank).max().unwrap_or(0)
    }

    fn link_order(&self, a: &Sym) -> u8 {
        self.sym_decl(a).map_or(1, |d| d.order)
    }

    fn rules(&self, q: &State, a: &Sym) -> Vec<Rule> {
        let (Some(&qi), Some(&ai)) = (self.state_index.get(q), self.sym_index.get(a)) else {
            return Vec::new();
        };
        self.rule_index
            .get(&(qi, ai))
            .map(|ix| ix.iter().map(|&i| self.rules[i].2.clone()).collect())
            .unwrap_or_default()
    }

    fn state_count(&self) -> BigUint {
        BigUint::from(self.states.len())
    }

    fn symbol_count(&self) -> BigUint {
        BigUint::from(self.symbols.len())
    }

    fn is_rank_aware(&self) -> bool {
        self.rank_aware
    }

    fn rank_fn(&self, a: &Sym) -> Option<RankFn> {
        self.sym_decl(a).and_then(|d| d.rank_fn.clone())
    }

    fn role(&self, q: &State) -> Role {
        self.state_decl(q).map_or(Role::Plain, |d| d.role)
    }

    fn counter_char(&self, a: &Sym) -> Option<EncChar> {
        self.sym_decl(a).and_then(|d| d.counter)
    }

    fn encoding(&self) -> Option<EncodingParams> {
        self.encoding
    }

    fn ra_depth(&self) -> u8 {
        self.states.iter().map(|d| crate::rank_aware::state_depth(&d.state)).max().unwrap_or(0)
    }
}

/// Convenience builder over plain names.
pub struct GameBuilder {
    order: u8,
    condition: Condition,
    states: Vec<StateDecl>,
    symbols: Vec<SymDecl>,
    initial: Option<(State, Sym)>,
    rules: Vec<(State, Sym, Rule)>,
}

impl GameBuilder {
    pub fn new(order: u8, condition: Condition) -> Self {
        GameBuilder { order, condition, states: Vec::new(), symbols: Vec::new(), initial: None, rules: Vec::new() }
    }

    pub fn symbol(&mut self, name: &str, order: u8) -> &mut Self {
        self.symbols.push(SymDecl { sym: Sym::named(name), order, rank_fn: None, counter: None });
        self
    }

    pub fn state(&mut self, name: &str, owner: Player, rank: u32) -> &mut Self {
        self.states.push(StateDecl { state: State::named(name), owner, rank, role: Role::Plain });
        self
    }

    pub fn initial(&mut self, q: &str, a: &str) -> &mut Self {
        self.initial = Some((State::named(q), Sym::named(a)));
        self
    }

    pub fn rule(&mut self, q: &str, a: &str, op: Op<&str>, q2: &str) -> &mut Self {
        let op = op.map(|s| Sym::named(s));
        self.rules.push((State::named(q), Sym::named(a), Rule::new(op, State::named(q2))));
        self
    }

    pub fn build(&self) -> Result<ExplicitGame, BuildError> {
        let (q0, a0) = match &self.initial {
            Some(x) => x.clone(),
            None => (
                self.states.first().ok_or(BuildError::Empty("states"))?.state.clone(),
                self.symbols.first().ok_or(BuildError::Empty("alphabet"))?.sym.clone(),
            ),
        };
        ExplicitGame::new(
            self.order,
            self.condition,
            self.states.clone(),
            self.symbols.clone(),
            q0,
            a0,
            self.rules.clone(),
            false,
            None,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MaterializeError {
    #[error("closure exceeds {0} state/symbol pairs")]
    TooLarge(usize),
}

/// Collects every state and symbol reachable syntactically from the initial
/// pair together with all their rules.
pub fn materialize(game: &dyn Game, max_pairs: usize) -> Result<ExplicitGame, MaterializeError> {
    let mut states: Vec<State> = vec![game.initial_state()];
    let mut syms: Vec<Sym> = vec![game.initial_symbol()];
    let mut sidx: HashMap<State, usize> = HashMap::from([(states[0].clone(), 0)]);
    let mut aidx: HashMap<Sym, usize> = HashMap::from([(syms[0].clone(), 0)]);
    let mut rules_of: HashMap<(usize, usize), Vec<Rule>> = HashMap::new();
    // pairs (i, j) with i < done_states or j < done_syms processed in waves
    let mut done_s = 0usize;
    let mut done_a = 0usize;
    while done_s < states.len() || done_a < syms.len() {
        let (ns, na) = (states.len(), syms.len());
        let mut pairs = Vec::new();
        for i in 0..ns {
            for j in 0..na {
                if i >= done_s || j >= done_a {
                    pairs.push((i, j));
                }
            }
        }
        done_s = ns;
        done_a = na;
        for (i, j) in pairs {
            if rules_of.len() >= max_pairs {
                return Err(MaterializeError::TooLarge(max_pairs));
            }
            let rs = game.rules(&states[i], &syms[j]);
            for r in &rs {
                if !sidx.contains_key(&r.target) {
                    sidx.insert(r.target.clone(), states.len());
                    states.push(r.target.clone());
                }
                if let Some(b) = r.op.symbol() {
                    if !aidx.contains_key(b) {
                        aidx.insert(b.clone(), syms.len());
                        syms.push(b.clone());
                    }
                }
            }
            rules_of.insert((i, j), rs);
        }
    }
    let q0 = game.initial_state();
    let a0 = game.initial_symbol();
    let mut s_order: Vec<usize> = (0..states.len()).collect();
    s_order.sort_by_cached_key(|&i| (states[i] != q0, states[i].to_string()));
    let mut a_order: Vec<usize> = (0..syms.len()).collect();
    a_order.sort_by_cached_key(|&j| (syms[j] != a0, syms[j].to_string()));
    let aware = game.is_rank_aware();
    let state_decls = s_order
        .iter()
        .map(|&i| {
            let q = &states[i];
            StateDecl { state: q.clone(), owner: game.owner(q), rank: game.rank(q), role: game.role(q) }
        })
        .collect();
    let sym_decls = a_order
        .iter()
        .map(|&j| {
            let a = &syms[j];
            SymDecl {
                sym: a.clone(),
                order: game.link_order(a),
                rank_fn: if aware { game.rank_fn(a) } else { None },
                counter: game.counter_char(a),
            }
        })
        .collect();
    let mut rules = Vec::new();
    for &i in &s_order {
        for &j in &a_order {
            if let Some(rs) = rules_of.get(&(i, j)) {
                for r in rs {
                    rules.push((states[i].clone(), syms[j].clone(), r.clone()));
                }
            }
        }
    }
    Ok(ExplicitGame::new(game.order(), game.condition(), state_decls, sym_decls, q0, a0, rules, aware, game.encoding())
        .expect("closure is consistent"))
}

/// Check states and phase states of a materialized game, for serialization.
pub fn role_label(role: Role) -> Option<String> {
    match role {
        Role::Plain => None,
        Role::Transient => Some("transient".into()),
        Role::Check { kind: CheckKind::Encoding, rank } => Some(format!("check encoding {rank}")),
        Role::Check { kind: CheckKind::Equals, rank } => Some(format!("check equals {rank}")),
        Role::Phase { rank } => Some(format!("phase {rank}")),
    }
}
