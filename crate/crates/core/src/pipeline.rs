//! Runs every reduction on one game and cross-checks the winners.

use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;

use crate::counter_reduction::reduce_counter;
use crate::model::game::{Condition, Game, GameRef, Player};
use crate::order_reduction::{audit_sizes, log2, reduce_order};
use crate::poly::encoding::EncodingParams;
use crate::poly::reduce_poly;
use crate::rank_aware::make_rank_aware;
use crate::solver::{winner_of, Limits};

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub limits: Limits,
    /// The sweep covers `0..=sweep`.
    pub sweep: u32,
    pub commute_bounds: Vec<u32>,
    pub poly: EncodingParams,
    pub gadget: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            limits: Limits::default(),
            sweep: 8,
            commute_bounds: vec![1, 2, 3],
            poly: EncodingParams::new(1, 2),
            gadget: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Skipped(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::Skipped(_) => "skipped",
        }
    }

    pub fn detail(&self) -> Option<&str> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(s) | Verdict::Skipped(s) => Some(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub name: String,
    pub states: Option<BigUint>,
    pub symbols: Option<BigUint>,
    /// `Err` holds the reason the stage was not solved.
    pub winner: Result<Player, String>,
    pub millis: u128,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub tag: char,
    pub name: &'static str,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default)]
pub struct PipelineReport {
    pub stages: Vec<Stage>,
    pub checks: Vec<Check>,
    pub sweep: Vec<(u32, Result<Player, String>)>,
    pub b_star: Option<u32>,
}

impl PipelineReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| matches!(c.verdict, Verdict::Fail(_)))
    }

    pub fn winner(&self) -> Option<Player> {
        self.stages.first().and_then(|s| s.winner.clone().ok())
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn render(&self, timings: bool) -> String {
        let mut out = String::new();
        for s in &self.stages {
            let sz = |x: &Option<BigUint>| x.as_ref().map_or("-".to_string(), |v| v.to_string());
            let w = match &s.winner {
                Ok(p) => p.to_string(),
                Err(e) => format!("unsolved ({e})"),
            };
            out += &format!("stage {}: states={} symbols={} winner={}", s.name, sz(&s.states), sz(&s.symbols), w);
            if timings {
                out += &format!(" ms={}", s.millis);
            }
            out.push('\n');
        }
        if !self.sweep.is_empty() {
            let row: Vec<String> = self
                .sweep
                .iter()
                .map(|(b, w)| format!("{b}:{}", w.as_ref().map_or("?".to_string(), |p| p.to_string())))
                .collect();
            out += &format!("sweep: {}\n", row.join(" "));
            out += &format!("b_star: {}\n", self.b_star.map_or("-".to_string(), |b| b.to_string()));
        }
        for c in &self.checks {
            out += &format!("check ({}) {}: {}", c.tag, c.name, c.verdict.label());
            if let Some(d) = c.verdict.detail() {
                out += &format!(" [{d}]");
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

struct Runner<'a> {
    opts: &'a PipelineOptions,
    report: PipelineReport,
}

impl Runner<'_> {
    fn run(&mut self, name: String, game: Result<GameRef, String>) -> Result<Player, String> {
        let t = Instant::now();
        let (states, symbols, winner) = match game {
            Ok(g) => {
                let w = winner_of(&*g, self.opts.limits).map_err(|e| e.to_string());
                (Some(g.state_count()), Some(g.symbol_count()), w)
            }
            Err(e) => (None, None, Err(e)),
        };
        self.report.stages.push(Stage { name, states, symbols, winner: winner.clone(), millis: t.elapsed().as_millis() });
        winner
    }

    fn check(&mut self, tag: char, name: &'static str, verdict: Verdict) {
        self.report.checks.push(Check { tag, name, verdict });
    }
}

fn equal(a: &Result<Player, String>, b: &Result<Player, String>, what: &str) -> Verdict {
    match (a, b) {
        (Ok(x), Ok(y)) if x == y => Verdict::Pass,
        (Ok(x), Ok(y)) => Verdict::Fail(format!("{what}: {x} vs {y}")),
        (Err(e), _) | (_, Err(e)) => Verdict::Skipped(e.clone()),
    }
}

fn counter(g: &GameRef, b: u64) -> Result<GameRef, String> {
    reduce_counter(g.clone(), BigUint::from(b)).map(|x| x as GameRef).map_err(|e| e.to_string())
}

fn order(g: &GameRef) -> Result<GameRef, String> {
    reduce_order(g.clone()).map(|x| x as GameRef).map_err(|e| e.to_string())
}

/// Sweep verdict: E-monotone, A-wins bound-independent, and a stabilization
/// point with the original winner. Unsolved bounds are ignored.
pub fn judge_sweep(base: Player, sweep: &[(u32, Result<Player, String>)]) -> (Verdict, Option<u32>) {
    let solved: Vec<(u32, Player)> = sweep.iter().filter_map(|(b, w)| w.as_ref().ok().map(|p| (*b, *p))).collect();
    if solved.is_empty() {
        return (Verdict::Skipped("no bound solved".into()), None);
    }
    if let Some(w) = solved.windows(2).find(|w| w[0].1 == Player::E && w[1].1 == Player::A) {
        return (Verdict::Fail(format!("E wins at {} but not at {}", w[0].0, w[1].0)), None);
    }
    if base == Player::A {
        if let Some((b, _)) = solved.iter().find(|(_, p)| *p == Player::E) {
            return (Verdict::Fail(format!("A wins the game but E wins at bound {b}")), None);
        }
    }
    let start = solved.iter().rposition(|(_, p)| *p != base).map_or(0, |i| i + 1);
    match solved.get(start) {
        Some((b, _)) => (Verdict::Pass, Some(*b)),
        None => (Verdict::Fail(format!("{base} never wins within the sweep")), None),
    }
}

/// Polynomial budget for the simulation: `16 (|G| m' L)^3` with `L` the encoding length.
pub fn poly_size_ok(input: &dyn Game, output: &dyn Game, params: &EncodingParams) -> bool {
    let base = input.size() * BigUint::from(input.max_rank() + 1) * BigUint::from(params.len() as u64 + 1);
    log2(&output.size()) <= 4.0 + 3.0 * log2(&base)
}

pub fn verify_pipeline(game: GameRef, opts: &PipelineOptions) -> PipelineReport {
    let mut r = Runner { opts, report: PipelineReport::default() };
    let base = r.run("input".into(), Ok(game.clone()));
    let ra = make_rank_aware(game.clone());
    let ra_w = r.run("rank-aware".into(), Ok(ra.clone()));
    let v = equal(&base, &ra_w, "rank-aware");
    r.check('a', "rank-aware preserves winner", v);

    let ord = (game.order() >= 2).then(|| order(&ra));
    match &ord {
        Some(o) => {
            let w = r.run("order".into(), o.clone());
            let v = equal(&base, &w, "order");
            r.check('b', "order reduction preserves winner", v);
        }
        None => r.check('b', "order reduction preserves winner", Verdict::Skipped("order 1".into())),
    }

    let parity = game.condition() == Condition::Parity;
    if parity {
        for b in 0..=opts.sweep {
            let w = r.run(format!("counter {b}"), counter(&ra, b as u64));
            r.report.sweep.push((b, w));
        }
        let v = match &base {
            Ok(p) => {
                let (v, star) = judge_sweep(*p, &r.report.sweep);
                r.report.b_star = star;
                v
            }
            Err(e) => Verdict::Skipped(e.clone()),
        };
        r.check('c', "counter sweep", v);
    } else {
        r.check('c', "counter sweep", Verdict::Skipped("safety input".into()));
    }

    match (&ord, parity) {
        (Some(Ok(o)), true) => {
            let mut v = Verdict::Pass;
            for &b in &opts.commute_bounds {
                let lhs = counter(&make_rank_aware(o.clone()), b as u64);
                let lw = r.run(format!("counter {b} after order"), lhs);
                let rhs = counter(&ra, b as u64).and_then(|c| order(&make_rank_aware(c)));
                let rw = r.run(format!("order after counter {b}"), rhs);
                match equal(&lw, &rw, &format!("bound {b}")) {
                    Verdict::Pass => {}
                    f @ Verdict::Fail(_) => {
                        v = f;
                        break;
                    }
                    s @ Verdict::Skipped(_) => {
                        if v == Verdict::Pass {
                            v = s;
                        }
                    }
                }
            }
            r.check('d', "counter and order reductions commute", v);
        }
        (Some(Err(e)), true) => r.check('d', "counter and order reductions commute", Verdict::Skipped(e.clone())),
        (None, _) => r.check('d', "counter and order reductions commute", Verdict::Skipped("order 1".into())),
        (_, false) => r.check('d', "counter and order reductions commute", Verdict::Skipped("safety input".into())),
    }

    let p = opts.poly;
    let pr = reduce_poly(ra.clone(), p, opts.gadget);
    let poly_game = pr.as_ref().ok().map(|g| g.clone() as GameRef);
    let pw = r.run(format!("poly {} {}", p.depth, p.width), pr.map(|g| g as GameRef).map_err(|e| e.to_string()));
    let full = 1u64 << p.width.min(62);
    let cw = r.run(format!("counter {full} for poly"), counter(&ra, full));
    let _ = r.run(format!("counter {} for poly", full - 1), counter(&ra, full - 1));
    let v = equal(&pw, &cw, "poly vs counter");
    r.check('e', "poly reduction matches counter reduction", v);

    let mut notes = Vec::new();
    if let Some(Ok(o)) = &ord {
        if let Err(e) = audit_sizes(&*ra, &**o) {
            notes.push(e.to_string());
        }
    }
    if let Some(g) = &poly_game {
        if !poly_size_ok(&*ra, &**g, &p) {
            notes.push(format!("poly size {} exceeds budget", g.size()));
        }
    }
    let v = if notes.is_empty() { Verdict::Pass } else { Verdict::Fail(notes.join("; ")) };
    r.check('f', "size audits", v);
    r.report
}
