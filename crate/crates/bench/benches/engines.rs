use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cubefpp::btp::{self, Caps};
use cubefpp::fpp::{first_passage, shortest_paths, WeightScheme};
use cubefpp::hypercube::Dimension;
use cubefpp::rng::{trial_rng, Stream};
use cubefpp::walks::sample_conditioned_walk;
use cubefpp_bench::{models, BENCH_SEED};
use std::hint::black_box;

fn fpp(c: &mut Criterion) {
    let mut g = c.benchmark_group("first_passage");
    for n in [8, 12, 16] {
        for scheme in [WeightScheme::Stored, WeightScheme::Derived] {
            let ms = models(n, 16, scheme);
            let id = BenchmarkId::new(format!("{scheme:?}"), n);
            let mut i = 0;
            g.bench_function(id, |b| {
                b.iter(|| {
                    i = (i + 1) % ms.len();
                    black_box(first_passage(&ms[i], (1 << n) - 1, true, false).unwrap().t_first)
                })
            });
        }
    }
    g.finish();

    let mut g = c.benchmark_group("full_search");
    for n in [8, 12, 16] {
        let ms = models(n, 4, WeightScheme::Stored);
        g.bench_with_input(BenchmarkId::from_parameter(n), &ms, |b, ms| {
            b.iter(|| black_box(shortest_paths(&ms[0], 0, None).unwrap().max_label()))
        });
    }
    g.finish();
}

fn branching(c: &mut Criterion) {
    let theta = cubefpp::analytic::theta();
    let mut g = c.benchmark_group("btp_simulate");
    for n in [3, 6, 8] {
        let d = Dimension::new(n).unwrap();
        let mut seed = BENCH_SEED;
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| {
                seed += 1;
                black_box(btp::simulate(d, theta, 0, seed, Caps::default()).unwrap().len())
            })
        });
    }
    g.finish();
}

fn walks(c: &mut Criterion) {
    let theta = cubefpp::analytic::theta();
    let mut rng = trial_rng(BENCH_SEED, Stream::Walk, 0);
    c.bench_function("conditioned_walk/1000", |b| {
        b.iter(|| black_box(sample_conditioned_walk(1000, theta, &mut rng).unwrap().events.len()))
    });
}

criterion_group!(benches, fpp, branching, walks);
criterion_main!(benches);
