use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::game::{successors, Config, Game, Rule};
use super::stack::Stack;

/// Play index at which a substack was created. Substacks of the initial
/// configuration carry `Initial`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Initial,
    At(usize),
}

impl Origin {
    pub fn index(self) -> usize {
        match self {
            Origin::Initial => 0,
            Origin::At(i) => i,
        }
    }
}

/// A finite play whose substacks are annotated with their creation index.
#[derive(Clone, Debug)]
pub struct AnnotatedPlay {
    pub configs: Vec<Config<Origin>>,
    pub ranks: Vec<u32>,
    pub rules: Vec<Rule>,
    top_orders: Vec<u8>,
    mins: RangeMin,
}

impl AnnotatedPlay {
    pub fn start(game: &dyn Game) -> Self {
        let stack = Stack::initial(game.order(), game.initial_symbol(), Origin::Initial);
        let c = Config { state: game.initial_state(), stack };
        let mut p = AnnotatedPlay { configs: Vec::new(), ranks: Vec::new(), rules: Vec::new(), top_orders: Vec::new(), mins: RangeMin::default() };
        p.record(game, c);
        p
    }

    fn record(&mut self, game: &dyn Game, c: Config<Origin>) {
        self.ranks.push(game.rank(&c.state));
        self.top_orders.push(game.link_order(&c.stack.top_char().sym));
        self.mins.push(*self.ranks.last().unwrap());
        self.configs.push(c);
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn last(&self) -> &Config<Origin> {
        self.configs.last().expect("plays are non-empty")
    }

    /// Successors of the last configuration, annotated for the next index.
    pub fn options(&self, game: &dyn Game) -> Vec<(Rule, Config<Origin>)> {
        successors(game, self.last(), Origin::At(self.len() - 1))
    }

    pub fn extend(&mut self, game: &dyn Game, rule: Rule, next: Config<Origin>) {
        self.rules.push(rule);
        self.record(game, next);
    }

    /// Plays `steps` moves choosing uniformly among available rules.
    pub fn random(game: &dyn Game, seed: u64, steps: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut play = AnnotatedPlay::start(game);
        for _ in 0..steps {
            let opts = play.options(game);
            let Some((r, c)) = opts.choose(&mut rng).cloned() else { break };
            play.extend(game, r, c);
        }
        play
    }

    /// Annotation of the topmost order-(k-1) stack of `c_i`.
    pub fn k_ancestor(&self, i: usize, k: u8) -> Origin {
        *self.configs[i].stack.top(k).expect("k within order").tag()
    }

    /// The k'-ancestor of the 1-ancestor, k' being the top character's link order.
    pub fn link_ancestor(&self, i: usize) -> Origin {
        match self.k_ancestor(i, 1) {
            Origin::Initial => Origin::Initial,
            Origin::At(t) => self.k_ancestor(t, self.top_orders[i]),
        }
    }

    fn window_min(&self, from: Origin, i: usize) -> u32 {
        let lo = match from {
            Origin::Initial => 0,
            Origin::At(j) => j + 1,
        };
        self.mins.min(lo, i)
    }

    pub fn level_rank(&self, i: usize, k: u8) -> u32 {
        self.window_min(self.k_ancestor(i, k), i)
    }

    pub fn link_rank(&self, i: usize) -> u32 {
        self.window_min(self.link_ancestor(i), i)
    }
}

/// Sparse table for range minima over a growing sequence.
#[derive(Clone, Debug, Default)]
struct RangeMin {
    levels: Vec<Vec<u32>>,
}

impl RangeMin {
    fn push(&mut self, v: u32) {
        if self.levels.is_empty() {
            self.levels.push(Vec::new());
        }
        self.levels[0].push(v);
        let n = self.levels[0].len();
        let mut k = 1;
        while (1 << k) <= n {
            if self.levels.len() <= k {
                self.levels.push(Vec::new());
            }
            let start = n - (1 << k);
            let half = 1 << (k - 1);
            let m = self.levels[k - 1][start].min(self.levels[k - 1][start + half]);
            self.levels[k].push(m);
            k += 1;
        }
    }

    /// Minimum over the inclusive range `[lo, hi]`.
    fn min(&self, lo: usize, hi: usize) -> u32 {
        assert!(lo <= hi, "empty window");
        let len = hi - lo + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        self.levels[k][lo].min(self.levels[k][hi + 1 - (1 << k)])
    }
}
