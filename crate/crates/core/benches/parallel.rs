use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nestkit::direct::fixture;
use nestkit::search::{find_min_nesting, SearchOptions};
use nestkit::verify::verify_nesting;
use nestkit::{par, Mode};

fn threads() -> [(&'static str, Option<usize>); 2] {
    [("sequential", Some(1)), ("parallel", None)]
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_min_nesting");
    group.sample_size(10);
    for (name, mode, cap) in [
        ("E4", Mode::Strong, 8),
        ("E6", Mode::Weak, 8),
        ("E7", Mode::Weak, 9),
    ] {
        let (d, _) = fixture(name).unwrap();
        for (label, t) in threads() {
            let opts = SearchOptions {
                threads: t,
                ..SearchOptions::default()
            };
            group.bench_with_input(
                BenchmarkId::new(label, format!("{name}-{mode}")),
                &d,
                |b, d| b.iter(|| find_min_nesting(d, mode, cap, &opts).unwrap()),
            );
        }
    }
    group.finish();
}

fn verify_many(c: &mut Criterion) {
    let designs: Vec<_> = (40..120)
        .map(|v| nestkit::direct::weak_nest_pairs(v).unwrap())
        .collect();
    let mut group = c.benchmark_group("verify_pairs_40_to_120");
    for (label, t) in threads() {
        group.bench_function(label, |b| {
            b.iter(|| {
                par::all(&designs, t, |(d, n)| {
                    verify_nesting(d, n, Mode::Weak).passed()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, search, verify_many);
criterion_main!(benches);
