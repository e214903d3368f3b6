//! Compares the law suite's data-parallel path (rayon, `parallel` feature)
//! against the always-available sequential fallback. Both produce identical
//! reports; only the schedule differs.

use chronofrac::fracderiv::LimitParams;
use chronofrac::laws::{run_randomized_suite, run_randomized_suite_seq};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_law_suite(c: &mut Criterion) {
    let params = LimitParams::default();
    let mut group = c.benchmark_group("law_suite");
    for cases in [25u32, 100] {
        group.bench_with_input(
            BenchmarkId::new("parallel_default", cases),
            &cases,
            |b, &cases| b.iter(|| run_randomized_suite(1, cases, &params).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", cases),
            &cases,
            |b, &cases| b.iter(|| run_randomized_suite_seq(1, cases, &params).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_law_suite);
criterion_main!(benches);
