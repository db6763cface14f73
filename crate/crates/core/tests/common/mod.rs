#![allow(dead_code)]

use ess_core::{ExponentialKernelSpec, SemiSeparableSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Benchmark-protocol kernel: t uniform on [0, 20] and sorted, alpha and
/// beta uniform on [0, 2], d = 1 + sum(alpha), b uniform on [-1, 1].
pub fn protocol_problem(n: usize, p: usize, seed: u64) -> (ExponentialKernelSpec, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=20.0)).collect();
    t.sort_by(f64::total_cmp);
    let alpha: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=2.0)).collect();
    let beta: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=2.0)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let d = 1.0 + alpha.iter().sum::<f64>();
    (ExponentialKernelSpec::new(d, alpha, beta, t).expect("protocol kernel"), b)
}

/// Symmetric generator spec with a dominant diagonal so dense LU is a
/// trustworthy reference.
pub fn random_generators(n: usize, p: usize, seed: u64) -> SemiSeparableSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..n * p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..n * p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag: Vec<f64> = (0..n).map(|_| n as f64 * p as f64 + rng.gen_range(1.0..2.0)).collect();
    SemiSeparableSpec::new(p, diag, u, v).expect("generator spec")
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn rel_err_inf(got: &[f64], want: &[f64]) -> f64 {
    let diff: Vec<f64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    max_abs(&diff) / max_abs(want)
}
