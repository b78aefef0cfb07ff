use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigUint;

use cpds_bench::{corpus, ring_arena, sized_game};
use cpds_core::counter_reduction::reduce_counter;
use cpds_core::model::stack::parse_stack;
use cpds_core::order_reduction::reduce_order;
use cpds_core::poly::{reduce_poly, EncodingParams};
use cpds_core::rank_aware::make_rank_aware;
use cpds_core::solver::{solve_parity, winner_of, Limits};
use cpds_core::Game;

fn stacks(c: &mut Criterion) {
    let w = parse_stack("[[[a^1 b^1]_1 [b^1]_1]_2 [[b^0]_1]_2]_3").unwrap();
    c.bench_function("stack/push-collapse", |b| {
        b.iter(|| {
            let v = black_box(&w).push(3, ()).unwrap().push_char("a".to_string(), 2, ()).unwrap();
            v.collapse(2)
        })
    });
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_parity");
    for n in [100, 1_000, 10_000] {
        let a = ring_arena(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| solve_parity(a)));
    }
    g.finish();
}

fn reductions(c: &mut Criterion) {
    let limits = Limits { max_nodes: 50_000, ..Limits::default() };
    let games = corpus(2, 4);
    c.bench_function("rank-aware + solve", |b| {
        b.iter(|| games.iter().map(|g| winner_of(&*make_rank_aware(g.clone()), limits).ok()).collect::<Vec<_>>())
    });
    let ra: Vec<_> = games.iter().map(|g| make_rank_aware(g.clone())).collect();
    c.bench_function("order + solve", |b| {
        b.iter(|| ra.iter().map(|g| winner_of(&*reduce_order(g.clone()).unwrap(), limits).ok()).collect::<Vec<_>>())
    });
    let mut g = c.benchmark_group("counter + solve");
    for bound in [1u32, 4, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &k| {
            b.iter(|| ra.iter().map(|x| winner_of(&*reduce_counter(x.clone(), BigUint::from(k)).unwrap(), limits).ok()).collect::<Vec<_>>())
        });
    }
    g.finish();
}

fn poly_size(c: &mut Criterion) {
    let mut g = c.benchmark_group("poly size");
    for n in [4, 16, 64] {
        let ra = make_rank_aware(sized_game(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &ra, |b, ra| {
            b.iter(|| reduce_poly(ra.clone(), EncodingParams::new(1, 2), false).unwrap().size())
        });
    }
    g.finish();
}

criterion_group!(benches, stacks, solver, reductions, poly_size);
criterion_main!(benches);
