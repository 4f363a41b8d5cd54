use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use helpercap_core::*;

fn channel() -> ChannelConfig {
    validate_config([0.8, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]).unwrap()
}

fn strategy(cfg: &ChannelConfig) -> HelperStrategy {
    let beta = [-0.05, -0.04];
    HelperStrategy::new([0.0; 2], [0.0; 3], beta, 0.6)
        .with_alpha(alpha_star_dpc(User::One, cfg, beta, 0.6))
        .with_alpha(alpha_star_dpc(User::Two, cfg, beta, 0.6))
}

fn closed_form(c: &mut Criterion) {
    let cfg = channel();
    let s = strategy(&cfg);
    c.bench_function("rate_f", |b| b.iter(|| rate_f(User::One, black_box(&cfg), black_box(&s))));
    c.bench_function("achievable_point", |b| b.iter(|| achievable_point(black_box(&cfg), black_box(&s))));
}

fn oracle(c: &mut Criterion) {
    let cfg = channel();
    let s = strategy(&cfg);
    c.bench_function("joint_covariance", |b| b.iter(|| build_joint_covariance(black_box(&cfg), black_box(&s))));
    c.bench_function("sequential_rates", |b| b.iter(|| sequential_rates(black_box(&cfg), black_box(&s))));
}

fn regions(c: &mut Criterion) {
    let cfg = channel();
    let budget = OptimizerBudget::default();
    let mut g = c.benchmark_group("regions");
    g.sample_size(10);
    g.bench_function("outer_region_boundary", |b| b.iter(|| outer_region_boundary(black_box(&cfg), 8)));
    g.bench_function("inner_region_boundary", |b| {
        b.iter(|| inner_region_boundary(black_box(&cfg), 8, black_box(&budget)))
    });
    g.finish();
}

criterion_group!(benches, closed_form, oracle, regions);
criterion_main!(benches);
