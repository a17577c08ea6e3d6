use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use poroelastic_ader::basis::ReferenceOperators;
use poroelastic_ader::stp::{assemble_rhs, predict, random_instance, DenseSystem, StpOperator};
use poroelastic_ader::ExecMode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ELEMENTS: usize = 256;

fn batch(degree: usize, count: usize) -> Vec<(StpOperator, Vec<f64>)> {
    let reference = Arc::new(ReferenceOperators::new(degree).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    (0..count)
        .map(|_| {
            let inst = random_instance(degree, &mut rng).unwrap();
            (inst.operator(reference.clone()).unwrap(), inst.q0)
        })
        .collect()
}

/// Predictor over a batch of elements, sequential vs rayon.
fn exec_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("predict_batch");
    group.throughput(Throughput::Elements(ELEMENTS as u64));
    for degree in [3, 6] {
        let elements = batch(degree, ELEMENTS);
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), degree), &elements, |b, elements| {
                b.iter(|| mode.map(elements.len(), |e| predict(&elements[e].0, &elements[e].1).unwrap()))
            });
        }
    }
    group.finish();
}

/// One element: back-substitution vs triangular solves with a stored LU.
fn against_lu(c: &mut Criterion) {
    let mut group = c.benchmark_group("single_element");
    group.sample_size(20);
    for degree in [2, 4] {
        let elements = batch(degree, 1);
        let (op, q0) = &elements[0];
        let dense = DenseSystem::factor(op);
        let rhs = assemble_rhs(op, q0);
        group.bench_function(BenchmarkId::new("predict", degree), |b| b.iter(|| predict(op, q0).unwrap()));
        group.bench_function(BenchmarkId::new("lu_solve", degree), |b| b.iter(|| dense.solve(&rhs).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, exec_modes, against_lu);
criterion_main!(benches);
