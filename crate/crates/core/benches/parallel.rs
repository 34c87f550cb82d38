use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ramsey_core::analysis::{cyclic_search, single_flip_dos_with, CyclicMode};
use ramsey_core::verify::{min_energy_exhaustive, DEFAULT_ENUMERATION_BUDGET};
use ramsey_core::{Colouring, Execution, Problem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn exhaustive_k6(c: &mut Criterion) {
    let prob = Problem::with_unit_weights(vec![3, 3]).unwrap();
    let mut group = c.benchmark_group("exhaustive_min_k6");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                min_energy_exhaustive(black_box(6), &prob, DEFAULT_ENUMERATION_BUDGET, exec)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn cyclic(c: &mut Criterion) {
    let mut group = c.benchmark_group("cyclic_exhaustive");
    group.sample_size(10);
    let cases = [(vec![3, 3, 4], 27), (vec![3, 3, 4], 29)];
    for (sizes, n) in cases {
        let prob = Problem::with_unit_weights(sizes).unwrap();
        let mode = CyclicMode::Exhaustive { budget: 1 << 31 };
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| cyclic_search(&prob, n, &mode, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn dos(c: &mut Criterion) {
    let prob = Problem::with_unit_weights(vec![4, 5]).unwrap();
    let colouring = Colouring::random(40, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let mut group = c.benchmark_group("single_flip_dos_n40");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| single_flip_dos_with(&colouring, &prob, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exhaustive_k6, cyclic, dos);
criterion_main!(benches);
