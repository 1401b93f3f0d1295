use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hypercube_sections::closure::{ClosureConfig, PatternClosure};
use hypercube_sections::cube::{evaluate_pattern_with, oracle_enumerate, LinearMap};
use hypercube_sections::search::{bfs_search_with, SearchConfig};
use hypercube_sections::shape::{max_intersection_with, Shape};
use hypercube_sections::theorems::build_32_star_map;
use hypercube_sections::{Exec, Rational};

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn pattern(c: &mut Criterion) {
    let map: LinearMap = build_32_star_map(18).unwrap();
    let mut g = c.benchmark_group("evaluate_pattern k=18");
    for (name, exec) in EXECS {
        g.bench_function(name, |b| b.iter(|| evaluate_pattern_with(black_box(&map), exec)));
    }
    g.finish();
}

fn shapes(c: &mut Criterion) {
    let star = Shape::from_edge_lists(&[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4], &[0, 1, 5], &[0, 1, 6], &[0, 1]]).unwrap();
    let mut g = c.benchmark_group("max_intersection");
    for (name, exec) in EXECS {
        g.bench_function(name, |b| b.iter(|| max_intersection_with(black_box(&star), None, exec)));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let entries: Vec<Rational> = (-1..=1).map(Rational::from_integer).collect();
    let mut g = c.benchmark_group("oracle k=3 m=3");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_function(name, |b| {
            b.iter(|| oracle_enumerate(3, 3, &entries, Rational::new(1, 2), u128::MAX, exec).unwrap())
        });
    }
    g.finish();
}

fn closure(c: &mut Criterion) {
    let cfg = ClosureConfig::signs(7, 64);
    let mut g = c.benchmark_group("closure k=7");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| PatternClosure::run(cfg, exec).unwrap())
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let cfg = SearchConfig::small(8).unwrap().with_max_edges(4);
    let mut g = c.benchmark_group("small search k=8");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| bfs_search_with(cfg, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, pattern, shapes, oracle, closure, search);
criterion_main!(benches);
