use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use torsionlab_core::constants::{figure_eight_volume, hyperbolic_ball_volume};
use torsionlab_core::dehn::figure_eight_family;
use torsionlab_core::hyperbolic::{displacement_suite, obtuse_suite};
use torsionlab_core::nerve::{circle_cover, nerve, random_star_cover};

fn nerves(c: &mut Criterion) {
    let mut group = c.benchmark_group("nerve");
    for n in [8, 16, 32] {
        let cover = circle_cover(n, 0.9);
        group.bench_with_input(BenchmarkId::new("circle", n), &cover, |b, cover| b.iter(|| nerve(black_box(cover), None)));
    }
    let star = random_star_cover(true, 3, 6, 0, 0);
    group.bench_function("star_h3_6", |b| b.iter(|| nerve(black_box(&star), None)));
    group.finish();
}

fn hyperbolic(c: &mut Criterion) {
    c.bench_function("displacement_suite_100", |b| b.iter(|| displacement_suite(100, black_box(0))));
    c.bench_function("obtuse_suite_2x200", |b| b.iter(|| obtuse_suite(2, 200, black_box(0))));
}

fn constants(c: &mut Criterion) {
    c.bench_function("figure_eight_volume", |b| b.iter(figure_eight_volume));
    c.bench_function("hyperbolic_ball_volume_d5", |b| b.iter(|| hyperbolic_ball_volume(5, black_box(2.0))));
    c.bench_function("figure_eight_family_50x10", |b| b.iter(|| figure_eight_family(1..=50, 1..=10)));
}

criterion_group!(benches, nerves, hyperbolic, constants);
criterion_main!(benches);
