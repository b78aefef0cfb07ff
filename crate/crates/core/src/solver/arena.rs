use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use rayon::prelude::*;

use crate::model::game::{Condition, Config, Game, Player, Role, Rule};
use crate::model::ids::{State, Sym};
use crate::model::op::Op;
use crate::model::stack::Stack;
use crate::poly::{self, EncChar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_stack_len: usize,
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 200_000, max_stack_len: 4096, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpandError {
    #[error("arena too large: {reason} (frontier {frontier}, nodes {nodes})")]
    TooLarge { reason: &'static str, frontier: usize, nodes: usize },
}

/// Leaf override used to cut an expansion at chosen configurations.
pub type LeafFn<'a> = &'a (dyn Fn(&State, &Stack<Sym>) -> Option<Player> + Sync);

#[derive(Clone, Copy, Default)]
pub struct ExpandOptions<'a> {
    pub parallel: bool,
    pub leaf: Option<LeafFn<'a>>,
}

/// Finite game graph over reachable configurations.
#[derive(Clone, Debug)]
pub struct Arena {
    pub owner: Vec<Player>,
    pub rank: Vec<u32>,
    pub succ: Vec<Vec<u32>>,
    pub initial: u32,
    pub condition: Condition,
    states: Vec<State>,
    syms: Vec<Sym>,
    node_state: Vec<u32>,
    node_stack: Vec<Option<Stack<u32>>>,
}

impl Arena {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn state_of(&self, v: u32) -> &State {
        &self.states[self.node_state[v as usize] as usize]
    }

    pub fn stack_of(&self, v: u32) -> Option<Stack<Sym>> {
        self.node_stack[v as usize].as_ref().map(|s| s.map(&|&i: &u32| self.syms[i as usize].clone(), &|_| ()))
    }

    pub fn label(&self, v: u32) -> String {
        match self.stack_of(v) {
            Some(s) => format!("{} {}", self.state_of(v), s),
            None => self.state_of(v).to_string(),
        }
    }

    /// Builds an arena directly from adjacency data (used by tests and oracles).
    pub fn from_graph(owner: Vec<Player>, rank: Vec<u32>, succ: Vec<Vec<u32>>, initial: u32, condition: Condition) -> Arena {
        let n = owner.len();
        Arena {
            owner,
            rank,
            succ,
            initial,
            condition,
            states: (0..n).map(|i| State::named(&format!("v{i}"))).collect(),
            syms: Vec::new(),
            node_state: (0..n as u32).collect(),
            node_stack: vec![None; n],
        }
    }

    pub fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (u, ss) in self.succ.iter().enumerate() {
            for &v in ss {
                pred[v as usize].push(u as u32);
            }
        }
        pred
    }
}

struct Interner<T> {
    items: Vec<T>,
    index: HashMap<T, u32>,
}

impl<T: Clone + Eq + Hash> Interner<T> {
    fn new() -> Self {
        Interner { items: Vec::new(), index: HashMap::new() }
    }

    fn id(&mut self, x: &T) -> (u32, bool) {
        if let Some(&i) = self.index.get(x) {
            return (i, false);
        }
        let i = self.items.len() as u32;
        self.items.push(x.clone());
        self.index.insert(x.clone(), i);
        (i, true)
    }
}

type RuleList = Arc<Vec<(Op<u32>, u32)>>;

fn encode(s: &Stack<u32>, out: &mut Vec<u32>) {
    match s {
        Stack::Leaf { ch, .. } => {
            out.push(ch.sym);
            out.push(ch.link);
        }
        Stack::Seq { items, .. } => {
            out.push(items.len() as u32);
            for it in items.iter() {
                encode(it, out);
            }
        }
    }
}

fn sink_rank(cond: Condition) -> u32 {
    match cond {
        Condition::Safety => 2,
        Condition::Parity => 0,
    }
}

/// Rank of the sink that is losing for `p`.
pub fn losing_sink_rank(p: Player, cond: Condition) -> u32 {
    match p {
        Player::E => 1,
        Player::A => sink_rank(cond),
    }
}

struct Expander<'a> {
    game: &'a dyn Game,
    limits: Limits,
    opts: ExpandOptions<'a>,
    states: Interner<State>,
    syms: Interner<Sym>,
    state_owner: Vec<Player>,
    state_rank: Vec<u32>,
    state_role: Vec<Role>,
    sym_order: Vec<u8>,
    sym_counter: Vec<Option<EncChar>>,
    rule_cache: HashMap<(u32, u32), RuleList>,
    nodes: HashMap<(u32, Vec<u32>), u32>,
    node_state: Vec<u32>,
    node_stack: Vec<Option<Stack<u32>>>,
    succ: Vec<Vec<u32>>,
    steps: usize,
}

enum Expansion {
    Leaf(Player),
    Moves(Vec<(u32, Stack<u32>)>),
}

impl<'a> Expander<'a> {
    fn state_id(&mut self, q: &State) -> u32 {
        let (i, fresh) = self.states.id(q);
        if fresh {
            let (owner, rank, role) = match q {
                State::Sink(p) => (Player::E, losing_sink_rank(*p, self.game.condition()), Role::Plain),
                _ => (self.game.owner(q), self.game.rank(q), self.game.role(q)),
            };
            self.state_owner.push(owner);
            self.state_rank.push(rank);
            self.state_role.push(role);
        }
        i
    }

    fn sym_id(&mut self, a: &Sym) -> u32 {
        let (i, fresh) = self.syms.id(a);
        if fresh {
            self.sym_order.push(self.game.link_order(a));
            self.sym_counter.push(self.game.counter_char(a));
        }
        i
    }

    fn node(&mut self, state: u32, stack: Option<Stack<u32>>) -> Result<u32, ExpandError> {
        let mut key = Vec::new();
        if let Some(s) = &stack {
            encode(s, &mut key);
            if key.len() > self.limits.max_stack_len {
                return Err(self.too_large("stack length limit"));
            }
        }
        let k = (state, key);
        if let Some(&v) = self.nodes.get(&k) {
            return Ok(v);
        }
        if self.node_state.len() >= self.limits.max_nodes {
            return Err(self.too_large("node limit"));
        }
        let v = self.node_state.len() as u32;
        self.nodes.insert(k, v);
        self.node_state.push(state);
        self.node_stack.push(stack);
        self.succ.push(Vec::new());
        Ok(v)
    }

    fn too_large(&self, reason: &'static str) -> ExpandError {
        let done = self.succ.iter().filter(|s| !s.is_empty()).count();
        ExpandError::TooLarge { reason, frontier: self.node_state.len() - done, nodes: self.node_state.len() }
    }

    fn sink(&mut self, loser: Player) -> Result<u32, ExpandError> {
        let s = self.state_id(&State::Sink(loser));
        self.node(s, None)
    }

    fn sym_stack(&self, s: &Stack<u32>) -> Stack<Sym> {
        s.map(&|&i: &u32| self.syms.items[i as usize].clone(), &|_| ())
    }

    /// Verdict for leaf configurations (check states, hopeless push phases, overrides).
    fn verdict(&self, q: u32, stack: &Stack<u32>) -> Option<Player> {
        if let Some(f) = self.opts.leaf {
            if let Some(p) = f(&self.states.items[q as usize], &self.sym_stack(stack)) {
                return Some(p);
            }
        }
        let role = self.state_role[q as usize];
        if role == Role::Plain || role == Role::Transient {
            return None;
        }
        let params = self.game.encoding()?;
        let top: Vec<Option<EncChar>> =
            stack.top_chars().map(|c| self.sym_counter[c.sym as usize]).collect();
        poly::leaf_verdict(role, &params, &top)
    }

    fn rules_for(&self, q: u32, a: u32) -> Vec<Rule> {
        self.game.rules(&self.states.items[q as usize], &self.syms.items[a as usize])
    }

    fn expand_layer(&mut self, lo: usize, hi: usize) -> Result<(), ExpandError> {
        let mut needed = Vec::new();
        for v in lo..hi {
            let q = self.node_state[v];
            if let Some(s) = &self.node_stack[v] {
                let key = (q, s.top_char().sym);
                if !self.rule_cache.contains_key(&key) && !needed.contains(&key) {
                    needed.push(key);
                }
            }
        }
        let computed: Vec<Vec<Rule>> = if self.opts.parallel {
            needed.par_iter().map(|&(q, a)| self.rules_for(q, a)).collect()
        } else {
            needed.iter().map(|&(q, a)| self.rules_for(q, a)).collect()
        };
        // intern targets and pushed symbols in a fixed order
        for (key, rl) in needed.into_iter().zip(computed) {
            let mut ops = Vec::with_capacity(rl.len());
            for r in rl {
                let t = self.state_id(&r.target);
                let op = match &r.op {
                    Op::PushChar(b) => Op::PushChar(self.sym_id(b)),
                    Op::Rewrite(b) => Op::Rewrite(self.sym_id(b)),
                    Op::Push(k) => Op::Push(*k),
                    Op::Pop(k) => Op::Pop(*k),
                    Op::Collapse => Op::Collapse,
                    Op::Noop => Op::Noop,
                };
                ops.push((op, t));
            }
            self.rule_cache.insert(key, Arc::new(ops));
        }
        let this = &*self;
        let work = |v: usize| -> Expansion {
            let q = this.node_state[v];
            let Some(stack) = &this.node_stack[v] else {
                return Expansion::Moves(Vec::new());
            };
            if let Some(p) = this.verdict(q, stack) {
                return Expansion::Leaf(p);
            }
            let ops = &this.rule_cache[&(q, stack.top_char().sym)];
            let order = |b: &u32| this.sym_order[*b as usize];
            Expansion::Moves(ops.iter().filter_map(|(op, t)| Some((*t, stack.apply(op, order, ())?))).collect())
        };
        let results: Vec<Expansion> =
            if self.opts.parallel { (lo..hi).into_par_iter().map(work).collect() } else { (lo..hi).map(work).collect() };
        for (v, res) in (lo..hi).zip(results) {
            self.steps += 1;
            if self.steps > self.limits.max_steps {
                return Err(self.too_large("step limit"));
            }
            let q = self.node_state[v];
            let mut out = Vec::new();
            match res {
                Expansion::Leaf(winner) => out.push(self.sink(winner.opponent())?),
                Expansion::Moves(moves) => {
                    if self.node_stack[v].is_none() {
                        out.push(v as u32);
                    } else {
                        for (t, s) in moves {
                            let t_node = match &self.states.items[t as usize] {
                                State::Sink(p) => self.sink(*p)?,
                                _ => self.node(t, Some(s))?,
                            };
                            out.push(t_node);
                        }
                        if out.is_empty() {
                            let owner = self.state_owner[q as usize];
                            out.push(self.sink(owner)?);
                        }
                    }
                }
            }
            self.succ[v] = out;
        }
        Ok(())
    }
}

/// Breadth-first closure of reachable configurations from `root`.
///
/// Stuck configurations get an edge to the sink losing for their owner.
pub fn expand_from(game: &dyn Game, root: &Config, limits: Limits, opts: ExpandOptions) -> Result<Arena, ExpandError> {
    let mut ex = Expander {
        game,
        limits,
        opts,
        states: Interner::new(),
        syms: Interner::new(),
        state_owner: Vec::new(),
        state_rank: Vec::new(),
        state_role: Vec::new(),
        sym_order: Vec::new(),
        sym_counter: Vec::new(),
        rule_cache: HashMap::new(),
        nodes: HashMap::new(),
        node_state: Vec::new(),
        node_stack: Vec::new(),
        succ: Vec::new(),
        steps: 0,
    };
    let q0 = ex.state_id(&root.state);
    let stack = root.stack.map(&|a: &Sym| a.clone(), &|_| ());
    let mut ids = Vec::new();
    collect_syms(&stack, &mut ids);
    for a in &ids {
        ex.sym_id(a);
    }
    let s0 = stack.map(&|a: &Sym| ex.syms.index[a], &|_| ());
    let root_node = match &root.state {
        State::Sink(p) => ex.sink(*p)?,
        _ => ex.node(q0, Some(s0))?,
    };
    let mut lo = 0;
    while lo < ex.node_state.len() {
        let hi = ex.node_state.len();
        ex.expand_layer(lo, hi)?;
        lo = hi;
    }
    let owner = ex.node_state.iter().map(|&q| ex.state_owner[q as usize]).collect();
    let rank = ex.node_state.iter().map(|&q| ex.state_rank[q as usize]).collect();
    Ok(Arena {
        owner,
        rank,
        succ: ex.succ,
        initial: root_node,
        condition: game.condition(),
        states: ex.states.items,
        syms: ex.syms.items,
        node_state: ex.node_state,
        node_stack: ex.node_stack,
    })
}

fn collect_syms(s: &Stack<Sym>, out: &mut Vec<Sym>) {
    match s {
        Stack::Leaf { ch, .. } => out.push(ch.sym.clone()),
        Stack::Seq { items, .. } => items.iter().for_each(|i| collect_syms(i, out)),
    }
}

pub fn expand_arena(game: &dyn Game, limits: Limits) -> Result<Arena, ExpandError> {
    expand_from(game, &Config::initial(game), limits, ExpandOptions::default())
}
