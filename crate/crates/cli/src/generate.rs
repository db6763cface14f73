//! Seeded random problems following the benchmark protocol: times uniform
//! on [0, 20] then sorted, alpha and beta uniform on [0, 2],
//! d = 1 + sum(alpha), right-hand side uniform on [-1, 1].
//!
//! The stream is ChaCha8 seeded with `seed_from_u64(seed)`, drawn in the
//! order t (n values), alpha (p), beta (p), b (n). ChaCha8 output is fixed
//! across platforms, so a seed names the same problem everywhere.

use ess_core::ExponentialKernelSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn protocol_problem(n: usize, p: usize, seed: u64) -> ess_core::Result<(ExponentialKernelSpec, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=20.0)).collect();
    t.sort_by(f64::total_cmp);
    let alpha: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=2.0)).collect();
    let beta: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..=2.0)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let d = 1.0 + alpha.iter().sum::<f64>();
    Ok((ExponentialKernelSpec::new(d, alpha, beta, t)?, b))
}
