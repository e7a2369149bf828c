use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cubefpp::analytic::{a_expected, ab_expected, constants, success_lower_bound, theta, AnalyticConfig};
use std::hint::black_box;

fn expectations(c: &mut Criterion) {
    let cfg = AnalyticConfig::default();
    let u = theta();
    let mut g = c.benchmark_group("analytic");
    for n in [3u32, 100, 10_000] {
        g.bench_with_input(BenchmarkId::new("a_expected", n), &n, |b, &n| {
            b.iter(|| black_box(a_expected(n, u, &cfg).unwrap().value))
        });
        g.bench_with_input(BenchmarkId::new("ab_expected", n), &n, |b, &n| {
            b.iter(|| black_box(ab_expected(n, u, &cfg).unwrap().value))
        });
    }
    g.bench_function("success_lower_bound/10000", |b| {
        b.iter(|| black_box(success_lower_bound(10_000, u, &cfg).unwrap().value))
    });
    g.bench_function("constants", |b| b.iter(|| black_box(constants().p_lower_limit)));
    g.finish();
}

criterion_group!(benches, expectations);
criterion_main!(benches);
