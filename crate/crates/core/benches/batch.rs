//! Sequential against parallel execution of the main verification loops.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lpa_core::algebra::Lpa;
use lpa_core::batch::Exec;
use lpa_core::quiver::standard;
use lpa_core::random;
use lpa_core::repr::{f_window, relation_check, FModule};
use lpa_core::scalars::Field;
use lpa_core::structure::witness_batch;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn relations(c: &mut Criterion) {
    let q = Arc::new(standard::rose(2));
    let f = FModule::new(Arc::clone(&q), Field::Rationals);
    let mut group = c.benchmark_group("relation_check");
    for window in [3, 5] {
        let keys = f_window(&q, window);
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, window), &keys, |b, keys| {
                b.iter(|| relation_check(&f, black_box(keys), exec))
            });
        }
    }
    group.finish();
}

fn witnesses(c: &mut Criterion) {
    let lpa = Lpa::new(Arc::new(standard::toeplitz()), Field::Rationals);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let elements: Vec<_> = (0..200).map(|_| random::reduced_element(&mut rng, &lpa, 6, 4)).collect();
    let mut group = c.benchmark_group("witness_batch");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| witness_batch(&lpa, black_box(&elements), true, exec)));
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let lpa = Lpa::new(Arc::new(standard::rose(2)), Field::Rationals);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pairs: Vec<_> = (0..500)
        .map(|_| (random::element(&mut rng, &lpa, 4, 3), random::element(&mut rng, &lpa, 4, 3)))
        .collect();
    let mut group = c.benchmark_group("reduce_products");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| exec.map(black_box(&pairs), |(u, v)| lpa.reduce(&(u * v)))));
    }
    group.finish();
}

criterion_group!(benches, relations, witnesses, products);
criterion_main!(benches);
