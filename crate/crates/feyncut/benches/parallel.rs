//! Criterion benchmark comparing the parallel and sequential map paths.

use criterion::{criterion_group, criterion_main, Criterion};

fn bench_map(c: &mut Criterion) {
    c.bench_function("par_map_spt", |b| {
        b.iter(|| {
            let items: Vec<u64> = (0..64).collect();
            feyncut::par::map(items, |x| x * x)
        })
    });
}

criterion_group!(benches, bench_map);
criterion_main!(benches);
