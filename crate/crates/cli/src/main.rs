use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Value};

use cpds_core::corpus::{generate, manifest, CorpusSpec};
use cpds_core::counter_reduction::reduce_counter;
use cpds_core::model::cpg::{parse_cpg, write_cpg};
use cpds_core::model::play::AnnotatedPlay;
use cpds_core::order_reduction::reduce_order;
use cpds_core::pipeline::{verify_pipeline, PipelineOptions, PipelineReport};
use cpds_core::poly::{reduce_poly, EncodingParams};
use cpds_core::rank_aware::make_rank_aware;
use cpds_core::solver::{expand_arena, solve, Limits, SolveError};
use cpds_core::{materialize, Condition, ExplicitGame, Game, GameRef};

#[derive(Parser)]
#[command(name = "cpds", version, about = "Games over collapsible pushdown systems")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a game and list consistency diagnostics.
    Validate { file: PathBuf },
    /// Solve a game on its finite arena.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        /// Print the winner's positional strategy.
        #[arg(long)]
        strategy: bool,
    },
    /// Play randomly and print each configuration with its ranks.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Apply one reduction and print the result as `.cpg`.
    Reduce {
        file: PathBuf,
        #[command(subcommand)]
        which: Which,
        /// Make the result rank-aware again.
        #[arg(long, global = true)]
        reaware: bool,
        /// Realize the poly checks as explicit gadgets.
        #[arg(long, global = true)]
        gadget: bool,
        /// Cap on state/symbol pairs written.
        #[arg(long, global = true, default_value_t = 1_000_000)]
        max_pairs: usize,
    },
    /// Run every reduction and cross-check the winners.
    VerifyPipeline {
        file: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        /// Largest bound of the counter sweep.
        #[arg(long, default_value_t = 8)]
        sweep: u32,
        /// Bounds at which the order and counter reductions are composed both ways.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        commute: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[arg(long, default_value_t = 2)]
        width: u32,
        #[arg(long)]
        gadget: bool,
        /// Include per-stage timings.
        #[arg(long)]
        timings: bool,
    },
    /// Generate a random corpus with a manifest.
    Gen(GenArgs),
}

#[derive(Subcommand)]
enum Which {
    RankAware,
    Order,
    Counter { bound: BigUint },
    Poly { depth: u32, width: u32 },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = Limits::default().max_nodes)]
    max_nodes: usize,
    #[arg(long, default_value_t = Limits::default().max_stack_len)]
    max_stack_len: usize,
    #[arg(long, default_value_t = Limits::default().max_steps)]
    max_steps: usize,
}

impl LimitArgs {
    fn get(&self) -> Limits {
        Limits { max_nodes: self.max_nodes, max_stack_len: self.max_stack_len, max_steps: self.max_steps }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    order: u8,
    #[arg(long, value_parser = range, default_value = "2..4")]
    states: (usize, usize),
    #[arg(long, value_parser = range, default_value = "1..3")]
    symbols: (usize, usize),
    /// Range of the largest rank.
    #[arg(long, value_parser = range, default_value = "1..2")]
    ranks: (usize, usize),
    #[arg(long, default_value_t = 0.35)]
    density: f64,
    #[arg(long)]
    safety: bool,
    #[arg(long, default_value_t = 8)]
    min_nodes: usize,
    #[arg(long, default_value_t = 2_000)]
    retries: usize,
    #[arg(long, default_value_t = 2_000)]
    max_nodes: usize,
}

fn range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

/// A failure with its exit code.
struct Fail(u8, String);

const USAGE: u8 = 1;
const PRECONDITION: u8 = 2;
const UNSOLVABLE: u8 = 3;
const VERIFY: u8 = 4;

type Out = Result<String, Fail>;

fn load(path: &Path) -> Result<ExplicitGame, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))?;
    parse_cpg(&text).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))
}

fn solve_error(e: SolveError) -> Fail {
    match e {
        SolveError::Unsolvable(_) => Fail(UNSOLVABLE, e.to_string()),
        SolveError::NotSafety { .. } => Fail(PRECONDITION, e.to_string()),
    }
}

fn to_json(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
}

fn cmd_validate(file: &Path, as_json: bool) -> Out {
    let g = load(file)?;
    let diags = g.validate();
    let text = if as_json {
        to_json(json!({ "diagnostics": diags.iter().map(|d| d.to_string()).collect::<Vec<_>>() }))
    } else {
        diags.iter().map(|d| format!("{d}\n")).collect()
    };
    if diags.is_empty() {
        Ok(text)
    } else {
        Err(Fail(PRECONDITION, text.trim_end().to_string()))
    }
}

fn cmd_solve(file: &Path, limits: Limits, strategy: bool, as_json: bool) -> Out {
    let g = load(file)?;
    let arena = expand_arena(&g, limits).map_err(|e| solve_error(e.into()))?;
    let r = solve(&arena).map_err(solve_error)?;
    if as_json {
        let mut v = json!({ "winner": r.winner.to_string(), "nodes": r.nodes, "edges": r.edges });
        if strategy {
            let mut s: Vec<(String, String)> =
                r.winner_strategy(&arena).into_iter().map(|(a, b)| (arena.label(a), arena.label(b))).collect();
            s.sort();
            v["strategy"] = json!(s.into_iter().map(|(a, b)| json!({ "from": a, "to": b })).collect::<Vec<_>>());
        }
        Ok(to_json(v))
    } else {
        Ok(r.render(&arena, strategy))
    }
}

fn cmd_simulate(file: &Path, seed: u64, steps: usize, as_json: bool) -> Out {
    let g = load(file)?;
    let play = AnnotatedPlay::random(&g, seed, steps);
    let n = g.order();
    let mut rows = Vec::new();
    let mut text = String::new();
    for (i, c) in play.configs.iter().enumerate() {
        let levels: Vec<u32> = (1..=n).map(|k| play.level_rank(i, k)).collect();
        let link = play.link_rank(i);
        let stack = c.stack.untagged().to_string();
        let rule = (i > 0).then(|| play.rules[i - 1].op.to_string());
        if as_json {
            rows.push(json!({ "step": i, "op": rule, "state": c.state.to_string(), "rank": play.ranks[i],
                "stack": stack, "levels": levels, "link": link }));
        } else {
            let lv: Vec<String> = levels.iter().map(u32::to_string).collect();
            let _ = writeln!(
                text,
                "{i} {} {} {stack} levels={} link={link}",
                rule.as_deref().unwrap_or("-"),
                c.state,
                lv.join(","),
            );
        }
    }
    Ok(if as_json { to_json(json!({ "seed": seed, "steps": rows })) } else { text })
}

fn cmd_reduce(file: &Path, which: &Which, reaware: bool, gadget: bool, max_pairs: usize) -> Out {
    let g: GameRef = Arc::new(load(file)?);
    let pre = |e: &dyn std::fmt::Display| Fail(PRECONDITION, e.to_string());
    let out: GameRef = match which {
        Which::RankAware => make_rank_aware(g),
        Which::Order => reduce_order(g).map_err(|e| pre(&e))?,
        Which::Counter { bound } => reduce_counter(g, bound.clone()).map_err(|e| pre(&e))?,
        Which::Poly { depth, width } => {
            if *depth == 0 || *width == 0 {
                return Err(Fail(USAGE, "depth and width must be positive".into()));
            }
            reduce_poly(g, EncodingParams::new(*depth, *width), gadget).map_err(|e| pre(&e))?
        }
    };
    let out = if reaware { make_rank_aware(out) } else { out };
    let m = materialize(&*out, max_pairs).map_err(|e| Fail(UNSOLVABLE, e.to_string()))?;
    write_cpg(&m).map_err(|e| Fail(PRECONDITION, e.to_string()))
}

fn report_json(r: &PipelineReport, timings: bool) -> Value {
    let num = |x: &Option<BigUint>| x.as_ref().map(|v| v.to_string());
    let stages: Vec<Value> = r
        .stages
        .iter()
        .map(|s| {
            let mut v = json!({ "name": s.name, "states": num(&s.states), "symbols": num(&s.symbols) });
            match &s.winner {
                Ok(p) => v["winner"] = json!(p.to_string()),
                Err(e) => {
                    v["winner"] = Value::Null;
                    v["unsolved"] = json!(e);
                }
            }
            if timings {
                v["ms"] = json!(s.millis as u64);
            }
            v
        })
        .collect();
    let sweep: serde_json::Map<String, Value> = r
        .sweep
        .iter()
        .map(|(b, w)| (b.to_string(), w.as_ref().map_or(Value::Null, |p| json!(p.to_string()))))
        .collect();
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| json!({ "tag": c.tag.to_string(), "name": c.name, "verdict": c.verdict.label(), "detail": c.verdict.detail() }))
        .collect();
    json!({ "stages": stages, "sweep": sweep, "b_star": r.b_star, "checks": checks })
}

fn cmd_verify(file: &Path, opts: PipelineOptions, timings: bool, as_json: bool) -> Out {
    let g = load(file)?;
    let r = verify_pipeline(Arc::new(g), &opts);
    let text = if as_json { to_json(report_json(&r, timings)) } else { r.render(timings) };
    if let Some(Err(e)) = r.stages.first().map(|s| &s.winner) {
        print!("{text}");
        return Err(Fail(UNSOLVABLE, e.clone()));
    }
    if r.failed() {
        return Err(Fail(VERIFY, text.trim_end().to_string()));
    }
    Ok(text)
}

fn cmd_gen(a: &GenArgs, as_json: bool) -> Out {
    let spec = CorpusSpec {
        seed: a.seed,
        count: a.count,
        order: a.order,
        states: a.states,
        symbols: a.symbols,
        max_rank: (a.ranks.0 as u32, a.ranks.1 as u32),
        density: a.density,
        condition: if a.safety { Condition::Safety } else { Condition::Parity },
        limits: Limits { max_nodes: a.max_nodes, ..CorpusSpec::default().limits },
        min_nodes: a.min_nodes,
        retries: a.retries,
    };
    if !(1..=8).contains(&a.order) {
        return Err(Fail(USAGE, format!("order {} outside 1..8", a.order)));
    }
    let entries = generate(&spec).map_err(|e| Fail(PRECONDITION, e.to_string()))?;
    let io = |e: std::io::Error| Fail(USAGE, format!("{}: {e}", a.out.display()));
    fs::create_dir_all(&a.out).map_err(io)?;
    for e in &entries {
        let text = write_cpg(&e.game).map_err(|e| Fail(PRECONDITION, e.to_string()))?;
        fs::write(a.out.join(format!("{}.cpg", e.name)), text).map_err(io)?;
    }
    let man = manifest(&entries);
    fs::write(a.out.join("manifest.txt"), &man).map_err(io)?;
    Ok(if as_json {
        let rows: Vec<Value> = entries
            .iter()
            .map(|e| json!({ "seed": e.seed, "file": format!("{}.cpg", e.name), "order": e.game.order,
                "states": e.game.states.len(), "symbols": e.game.symbols.len(), "winner": e.winner.to_string() }))
            .collect();
        to_json(json!({ "games": rows }))
    } else {
        man
    })
}

fn run(cli: Cli) -> Out {
    let j = cli.json;
    match cli.cmd {
        Cmd::Validate { file } => cmd_validate(&file, j),
        Cmd::Solve { file, limits, strategy } => cmd_solve(&file, limits.get(), strategy, j),
        Cmd::Simulate { file, seed, steps } => cmd_simulate(&file, seed, steps, j),
        Cmd::Reduce { file, which, reaware, gadget, max_pairs } => cmd_reduce(&file, &which, reaware, gadget, max_pairs),
        Cmd::VerifyPipeline { file, limits, sweep, commute, depth, width, gadget, timings } => {
            if depth == 0 || width == 0 {
                return Err(Fail(USAGE, "depth and width must be positive".into()));
            }
            let opts = PipelineOptions {
                limits: limits.get(),
                sweep,
                commute_bounds: commute,
                poly: EncodingParams::new(depth, width),
                gadget,
            };
            cmd_verify(&file, opts, timings, j)
        }
        Cmd::Gen(a) => cmd_gen(&a, j),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Fail(code, msg)) => {
            if code == VERIFY {
                println!("{msg}");
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
