#![allow(dead_code)]

use std::sync::Arc;

use cpds_core::corpus::{generate, CorpusEntry, CorpusSpec};
use cpds_core::model::stack::parse_stack;
use cpds_core::solver::Limits;
use cpds_core::{Condition, GameBuilder, GameRef, Op, Player, Stack};

pub const SEED: u64 = 42;

pub fn limits() -> Limits {
    Limits { max_nodes: 50_000, ..Limits::default() }
}

pub fn corpus(order: u8, count: usize) -> Vec<CorpusEntry> {
    let spec = CorpusSpec { seed: SEED, count, order, ..CorpusSpec::default() };
    generate(&spec).expect("corpus generation")
}

/// Half order-1, half order-2 games.
pub fn mixed_corpus(count: usize) -> Vec<CorpusEntry> {
    let mut out = corpus(1, count / 2);
    out.extend(corpus(2, count - count / 2));
    out
}

pub fn tiny_corpus(count: usize) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for order in [1u8, 2] {
        let spec = CorpusSpec {
            seed: SEED + order as u64,
            count: count / 2 + (order as usize - 1) * (count % 2),
            order,
            states: (2, 3),
            symbols: (1, 2),
            min_nodes: 4,
            limits: Limits { max_nodes: 200, ..limits() },
            ..CorpusSpec::default()
        };
        out.extend(generate(&spec).expect("tiny corpus"));
    }
    out
}

pub fn stack(text: &str) -> Stack<String> {
    parse_stack(text).expect("stack literal")
}

pub fn example1() -> Stack<String> {
    stack("[[[a^1 b^1]_1 [b^1]_1]_2 [[b^0]_1]_2]_3")
}

/// E can escape to an even loop after two odd visits, or keep cycling
/// through the odd states.
pub fn adversarial() -> GameRef {
    let g = GameBuilder::new(1, Condition::Parity)
        .symbol("a", 1)
        .state("s0", Player::E, 2)
        .state("s1", Player::E, 1)
        .state("s2", Player::E, 1)
        .state("s3", Player::E, 2)
        .initial("s0", "a")
        .rule("s0", "a", Op::Noop, "s1")
        .rule("s1", "a", Op::Noop, "s2")
        .rule("s2", "a", Op::Noop, "s1")
        .rule("s2", "a", Op::Noop, "s3")
        .rule("s3", "a", Op::Noop, "s3")
        .build()
        .unwrap();
    Arc::new(g)
}

/// An odd-ranked state performs an order-2 push, which the order reduction
/// simulates through two more states of the same rank.
pub fn odd_pusher() -> GameRef {
    let g = GameBuilder::new(2, Condition::Parity)
        .symbol("a", 1)
        .state("q0", Player::E, 2)
        .state("q1", Player::E, 1)
        .state("q2", Player::E, 2)
        .state("q3", Player::E, 0)
        .initial("q0", "a")
        .rule("q0", "a", Op::Noop, "q1")
        .rule("q1", "a", Op::Push(2), "q2")
        .rule("q2", "a", Op::Pop(2), "q3")
        .rule("q3", "a", Op::Noop, "q3")
        .build()
        .unwrap();
    Arc::new(g)
}

/// A one-state even loop.
pub fn even_loop() -> GameRef {
    let g = GameBuilder::new(1, Condition::Parity)
        .symbol("a", 1)
        .state("q", Player::E, 0)
        .initial("q", "a")
        .rule("q", "a", Op::Noop, "q")
        .build()
        .unwrap();
    Arc::new(g)
}

/// E may leave a cycle of `k` odd states for an even loop, so she needs
/// counters up to `k`.
pub fn odd_chain(k: usize) -> GameRef {
    let mut b = GameBuilder::new(1, Condition::Parity);
    b.symbol("a", 1).state("s0", Player::E, 2);
    for i in 1..=k {
        b.state(&format!("s{i}"), Player::E, 1);
    }
    b.state("t", Player::E, 2).initial("s0", "a").rule("s0", "a", Op::Noop, "s1");
    for i in 1..k {
        b.rule(&format!("s{i}"), "a", Op::Noop, &format!("s{}", i + 1));
    }
    let last = format!("s{k}");
    b.rule(&last, "a", Op::Noop, "s1").rule(&last, "a", Op::Noop, "t").rule("t", "a", Op::Noop, "t");
    Arc::new(b.build().unwrap())
}
