use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ess_core::oracle::assemble_dense_with;
use ess_core::{factorize, ExponentialKernelSpec, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kernel(n: usize, p: usize, seed: u64) -> ExponentialKernelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=20.0)).collect();
    t.sort_by(f64::total_cmp);
    let alpha: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=2.0)).collect();
    let beta: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=2.0)).collect();
    ExponentialKernelSpec::new(1.0 + alpha.iter().sum::<f64>(), alpha, beta, t).unwrap()
}

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn solve_many(c: &mut Criterion) {
    let n = 20_000;
    let f = factorize(&kernel(n, 5, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rhs: Vec<Vec<f64>> = (0..32).map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    let mut group = c.benchmark_group("solve_many_32rhs_n20000_p5");
    for (name, strategy) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| f.solve_many(black_box(&rhs), strategy).unwrap())
        });
    }
    group.finish();
}

fn dense_assembly(c: &mut Criterion) {
    let k = kernel(1500, 5, 3);
    let mut group = c.benchmark_group("dense_assembly_n1500_p5");
    group.sample_size(20);
    for (name, strategy) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| assemble_dense_with(black_box(&k), 2000, strategy).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solve_many, dense_assembly);
criterion_main!(benches);
