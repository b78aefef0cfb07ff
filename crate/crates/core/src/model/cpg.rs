//! The line-oriented `.cpg` text format.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::explicit::{ExplicitGame, StateDecl, SymDecl};
use super::game::{CheckKind, Condition, Player, Role, Rule};
use super::ids::{State, Sym};
use super::op::Op;
use crate::poly::{EncChar, EncKind, EncodingParams};
use crate::rank_aware::RankFn;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CpgError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("two distinct {0} serialize to the same name `{1}`")]
    NameClash(&'static str, String),
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, CpgError> {
    Err(CpgError::Parse { line, msg: msg.into() })
}

pub fn write_cpg(g: &ExplicitGame) -> Result<String, CpgError> {
    let mut seen = HashSet::new();
    for d in &g.states {
        if !seen.insert(d.state.to_string()) {
            return Err(CpgError::NameClash("states", d.state.to_string()));
        }
    }
    seen.clear();
    for d in &g.symbols {
        if !seen.insert(d.sym.to_string()) {
            return Err(CpgError::NameClash("symbols", d.sym.to_string()));
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "cpds order {}", g.order);
    s.push_str("alphabet\n");
    for d in &g.symbols {
        let _ = writeln!(s, "  {} {}", d.sym, d.order);
    }
    s.push_str("states\n");
    for d in &g.states {
        let _ = writeln!(s, "  {} {} {}", d.state, d.owner, d.rank);
    }
    let _ = writeln!(s, "initial {} {}", g.initial_state, g.initial_symbol);
    s.push_str("rules\n");
    for (q, a, r) in &g.rules {
        let _ = writeln!(s, "  {q} {a} {} {}", r.op, r.target);
    }
    if g.rank_aware {
        s.push_str("meta rankaware\n");
    }
    for d in &g.symbols {
        if let Some(f) = &d.rank_fn {
            let _ = writeln!(s, "meta rankfn {} {}", d.sym, f.to_text());
        }
    }
    if let Some(p) = g.encoding {
        let _ = writeln!(s, "meta encoding {} {}", p.depth, p.width);
    }
    for d in &g.symbols {
        if let Some(c) = d.counter {
            match c.kind {
                EncKind::Bit { level, one } => {
                    let _ = writeln!(s, "meta counter {} {} bit {} {}", d.sym, c.rank, level, u8::from(one));
                }
                EncKind::Index { pos } => {
                    let _ = writeln!(s, "meta counter {} {} index {}", d.sym, c.rank, pos);
                }
            }
        }
    }
    for d in &g.states {
        match d.role {
            Role::Plain => {}
            Role::Transient => {
                let _ = writeln!(s, "meta transient {}", d.state);
            }
            Role::Check { kind, rank } => {
                let _ = writeln!(s, "meta check {} {} {}", d.state, kind, rank);
            }
            Role::Phase { rank } => {
                let _ = writeln!(s, "meta phase {} {}", d.state, rank);
            }
        }
    }
    let _ = writeln!(s, "condition {}", g.condition);
    Ok(s)
}

#[derive(PartialEq)]
enum Section {
    None,
    Alphabet,
    States,
    Rules,
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, CpgError> {
    tok.parse().or_else(|_| err(line, format!("bad {what} `{tok}`")))
}

pub fn parse_op(line: usize, tok: &str) -> Result<Op<Sym>, CpgError> {
    let num = |rest: &str| -> Result<u8, CpgError> { parse_num(line, rest, "operation order") };
    if tok == "noop" {
        Ok(Op::Noop)
    } else if tok == "collapse" {
        Ok(Op::Collapse)
    } else if let Some(inner) = tok.strip_prefix("pusha(").and_then(|r| r.strip_suffix(')')) {
        Ok(Op::PushChar(Sym::named(inner)))
    } else if let Some(inner) = tok.strip_prefix("rew(").and_then(|r| r.strip_suffix(')')) {
        Ok(Op::Rewrite(Sym::named(inner)))
    } else if let Some(k) = tok.strip_prefix("push").filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit())) {
        Ok(Op::Push(num(k)?))
    } else if let Some(k) = tok.strip_prefix("pop").filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit())) {
        Ok(Op::Pop(num(k)?))
    } else {
        err(line, format!("unknown operation `{tok}`"))
    }
}

pub fn parse_cpg(text: &str) -> Result<ExplicitGame, CpgError> {
    let mut order: Option<u8> = None;
    let mut section = Section::None;
    let mut symbols: Vec<SymDecl> = Vec::new();
    let mut states: Vec<StateDecl> = Vec::new();
    let mut initial: Option<(State, Sym)> = None;
    let mut rules: Vec<(State, Sym, Rule)> = Vec::new();
    let mut condition: Option<Condition> = None;
    let mut rank_aware = false;
    let mut encoding = None;
    let mut metas: Vec<(usize, Vec<String>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if condition.is_some() {
            return err(ln, "content after the condition line");
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let indented = content.starts_with(' ') || content.starts_with('\t');
        if indented {
            match section {
                Section::Alphabet => {
                    let [name, ord] = toks[..] else { return err(ln, "expected `<symbol> <link-order>`") };
                    symbols.push(SymDecl {
                        sym: Sym::named(name),
                        order: parse_num(ln, ord, "link order")?,
                        rank_fn: None,
                        counter: None,
                    });
                }
                Section::States => {
                    let [name, owner, rank] = toks[..] else { return err(ln, "expected `<state> <E|A> <rank>`") };
                    let owner = match owner {
                        "E" => Player::E,
                        "A" => Player::A,
                        o => return err(ln, format!("unknown owner `{o}`")),
                    };
                    states.push(StateDecl {
                        state: State::named(name),
                        owner,
                        rank: parse_num(ln, rank, "rank")?,
                        role: Role::Plain,
                    });
                }
                Section::Rules => {
                    let [q, a, op, q2] = toks[..] else { return err(ln, "expected `<state> <symbol> <op> <state>`") };
                    rules.push((State::named(q), Sym::named(a), Rule::new(parse_op(ln, op)?, State::named(q2))));
                }
                Section::None => return err(ln, "indented entry outside a block"),
            }
            continue;
        }
        match toks[0] {
            "cpds" => {
                if order.is_some() || toks.len() != 3 || toks[1] != "order" {
                    return err(ln, "expected a single `cpds order <n>` header");
                }
                order = Some(parse_num(ln, toks[2], "order")?);
            }
            _ if order.is_none() => return err(ln, "missing `cpds order <n>` header"),
            "alphabet" if toks.len() == 1 => section = Section::Alphabet,
            "states" if toks.len() == 1 => section = Section::States,
            "rules" if toks.len() == 1 => section = Section::Rules,
            "initial" => {
                let [_, q, a] = toks[..] else { return err(ln, "expected `initial <state> <symbol>`") };
                initial = Some((State::named(q), Sym::named(a)));
                section = Section::None;
            }
            "meta" => {
                metas.push((ln, toks[1..].iter().map(|s| s.to_string()).collect()));
                section = Section::None;
            }
            "condition" => {
                condition = Some(match toks.get(1..) {
                    Some(["safety"]) => Condition::Safety,
                    Some(["parity"]) => Condition::Parity,
                    _ => return err(ln, "expected `condition <safety|parity>`"),
                });
            }
            t => return err(ln, format!("unknown keyword `{t}`")),
        }
    }

    let last = text.lines().count().max(1);
    let Some(order) = order else { return err(1, "missing `cpds order <n>` header") };
    let Some(condition) = condition else { return err(last, "missing final `condition` line") };

    for (ln, m) in metas {
        let words: Vec<&str> = m.iter().map(String::as_str).collect();
        let sym_pos = |name: &str| symbols.iter().position(|d| d.sym == Sym::named(name));
        let state_pos = |name: &str| states.iter().position(|d| d.state == State::named(name));
        match words[..] {
            ["rankaware"] => rank_aware = true,
            ["rankfn", name, f] => {
                let Some(j) = sym_pos(name) else { return err(ln, format!("undeclared symbol `{name}`")) };
                let Some(f) = RankFn::from_text(f) else { return err(ln, format!("bad rank function `{f}`")) };
                symbols[j].rank_fn = Some(f);
            }
            ["encoding", d, w] => {
                encoding = Some(EncodingParams::new(parse_num(ln, d, "depth")?, parse_num(ln, w, "width")?));
            }
            ["counter", name, rank, "bit", level, v] => {
                let Some(j) = sym_pos(name) else { return err(ln, format!("undeclared symbol `{name}`")) };
                let one = match v {
                    "0" => false,
                    "1" => true,
                    _ => return err(ln, format!("bad bit `{v}`")),
                };
                let kind = EncKind::Bit { level: parse_num(ln, level, "level")?, one };
                symbols[j].counter = Some(EncChar { rank: parse_num(ln, rank, "rank")?, kind });
            }
            ["counter", name, rank, "index", pos] => {
                let Some(j) = sym_pos(name) else { return err(ln, format!("undeclared symbol `{name}`")) };
                let kind = EncKind::Index { pos: parse_num(ln, pos, "position")? };
                symbols[j].counter = Some(EncChar { rank: parse_num(ln, rank, "rank")?, kind });
            }
            ["transient", name] => {
                let Some(i) = state_pos(name) else { return err(ln, format!("undeclared state `{name}`")) };
                states[i].role = Role::Transient;
            }
            ["check", name, kind, rank] => {
                let Some(i) = state_pos(name) else { return err(ln, format!("undeclared state `{name}`")) };
                let kind = match kind {
                    "encoding" => CheckKind::Encoding,
                    "equals" => CheckKind::Equals,
                    k => return err(ln, format!("unknown check kind `{k}`")),
                };
                states[i].role = Role::Check { kind, rank: parse_num(ln, rank, "rank")? };
            }
            ["phase", name, rank] => {
                let Some(i) = state_pos(name) else { return err(ln, format!("undeclared state `{name}`")) };
                states[i].role = Role::Phase { rank: parse_num(ln, rank, "rank")? };
            }
            _ => return err(ln, format!("unknown meta line `{}`", words.join(" "))),
        }
    }

    let (q0, a0) = match initial {
        Some(x) => x,
        None => {
            let Some(q) = states.first() else { return err(last, "empty states block") };
            let Some(a) = symbols.first() else { return err(last, "empty alphabet block") };
            (q.state.clone(), a.sym.clone())
        }
    };
    ExplicitGame::new(order, condition, states, symbols, q0, a0, rules, rank_aware, encoding)
        .or_else(|e| err(last, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::game::Game;

    const EX2: &str = "\
cpds order 3
alphabet
  b 2
  a 3
states
  q0 E 2
  q1 E 2   # after the copy
  q2 A 1
initial q0 b
rules
  q0 b push3 q1
  q1 b pusha(a) q2
  q2 a collapse q0
condition parity
";

    #[test]
    fn parse_and_write_are_inverse() {
        let g = parse_cpg(EX2).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.rules(&State::named("q1"), &Sym::named("b")).len(), 1);
        let text = write_cpg(&g).unwrap();
        let g2 = parse_cpg(&text).unwrap();
        assert_eq!(write_cpg(&g2).unwrap(), text);
    }

    #[test]
    fn bad_op_names_line() {
        let bad = EX2.replace("collapse", "colapse");
        let e = parse_cpg(&bad).unwrap_err();
        assert!(e.to_string().starts_with("line 13:"), "{e}");
    }

    #[test]
    fn nested_parentheses_in_symbol() {
        assert_eq!(parse_op(1, "pusha(f(x))").unwrap(), Op::PushChar(Sym::named("f(x)")));
        assert!(parse_op(1, "push").is_err());
        assert!(parse_op(1, "pop1x").is_err());
    }
}
