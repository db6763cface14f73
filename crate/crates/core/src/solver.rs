//! End-to-end facade: embed, factor once, then solve and read off the
//! log-determinant as often as needed.

use crate::banded::{BandedLu, LogDet};
use crate::embedding::{embed_rankp, Embed, EmbeddingKind, EmbeddingLayout, ExtendedSystem};
use crate::error::Result;
use crate::semiseparable::{check_len, ExponentialKernelSpec, StructuredMatrix};

/// Factored extended system. Immutable; any number of threads may solve
/// against it concurrently.
#[derive(Debug, Clone)]
pub struct EssFactor {
    layout: EmbeddingLayout,
    kind: EmbeddingKind,
    lu: BandedLu,
}

/// Embeds and factors `spec`. Generator specs go through the raw-generator
/// embedding, exponential kernels through the stable one.
pub fn factorize<S: Embed + ?Sized>(spec: &S) -> Result<EssFactor> {
    EssFactor::from_system(spec.embed()?)
}

/// Factors a kernel through its naive generators `alpha e^{beta t}`,
/// `e^{-beta t}`. Overflows once `beta * (t_max - t_min)` approaches 700;
/// exists to demonstrate that failure, never use it for real work.
pub fn factorize_naive_unstable(spec: &ExponentialKernelSpec) -> Result<EssFactor> {
    EssFactor::from_system(embed_rankp(&spec.to_generators())?)
}

impl EssFactor {
    /// Expands the assembled band into factorization storage and factors it.
    pub fn from_system(sys: ExtendedSystem) -> Result<Self> {
        let kind = sys.kind();
        let (compressed, layout) = sys.into_parts();
        let band = compressed.to_banded()?;
        drop(compressed);
        let lu = band.into_lu()?;
        Ok(Self { layout, kind, lu })
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn p(&self) -> usize {
        self.layout.p()
    }

    pub fn layout(&self) -> &EmbeddingLayout {
        &self.layout
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn banded_lu(&self) -> &BandedLu {
        &self.lu
    }

    /// Solves `A x = b` in `O(p n)` (for a fixed fill pattern) using
    /// per-call scratch.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut ex = crate::embedding::embed_rhs(&self.layout, b)?;
        self.lu.solve_in_place(&mut ex)?;
        crate::embedding::extract_solution(&self.layout, &ex)
    }

    /// `log |det A|` and the sign of the extended determinant.
    ///
    /// Eliminating the auxiliaries leaves a unit-determinant block, so
    /// `|det A_ex| = |det A|` and `log_abs` is exact up to rounding. The
    /// sign is that of `det A_ex`, which may differ from the sign of
    /// `det A`; for a positive-definite covariance `det A > 0` and only
    /// `log_abs` is meaningful.
    pub fn logdet(&self) -> LogDet {
        self.lu.log_abs_det()
    }

    /// Solves several right-hand sides. See [`Strategy`].
    pub fn solve_many(&self, rhs: &[Vec<f64>], strategy: Strategy) -> Result<Vec<Vec<f64>>> {
        match strategy {
            Strategy::Sequential => rhs.iter().map(|b| self.solve(b)).collect(),
            Strategy::Parallel => self.solve_many_parallel(rhs),
        }
    }

    #[cfg(feature = "parallel")]
    fn solve_many_parallel(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        use rayon::prelude::*;
        rhs.par_iter().map(|b| self.solve(b)).collect()
    }

    #[cfg(not(feature = "parallel"))]
    fn solve_many_parallel(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.solve_many(rhs, Strategy::Sequential)
    }
}

/// How batch operations (multi-RHS solves, dense oracle assembly) spread
/// their independent items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    /// Rayon work-stealing; identical to `Sequential` without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

/// `||A x - b||_inf` through the fast matvec.
pub fn residual_inf<M: StructuredMatrix + ?Sized>(spec: &M, x: &[f64], b: &[f64]) -> Result<f64> {
    check_len(spec.dim(), x.len())?;
    crate::semiseparable::residual_inf(spec, x, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiseparable::SemiSeparableSpec;
    use approx::assert_relative_eq;

    #[test]
    fn scaled_identity() {
        let s = SemiSeparableSpec::diagonal(vec![4.0; 5]).unwrap();
        let f = factorize(&s).unwrap();
        assert_eq!(f.solve(&[4.0, 8.0, -2.0, 0.0, 1.0]).unwrap(), vec![1.0, 2.0, -0.5, 0.0, 0.25]);
        assert_relative_eq!(f.logdet().log_abs, 5.0 * 4f64.ln());
    }

    #[test]
    fn single_point_kernel() {
        let k = ExponentialKernelSpec::new(-2.0, vec![1.0], vec![1.0], vec![0.0]).unwrap();
        let f = factorize(&k).unwrap();
        assert_eq!(f.solve(&[3.0]).unwrap(), vec![-1.5]);
        let ld = f.logdet();
        assert_relative_eq!(ld.log_abs, 2f64.ln());
        assert_eq!(ld.sign, -1);
    }

    #[test]
    fn two_by_two_determinant() {
        let s = SemiSeparableSpec::from_rows(vec![2.0, 3.0], &[vec![1.0], vec![9.0]], &[vec![9.0], vec![0.5]])
            .unwrap();
        let ld = factorize(&s).unwrap().logdet();
        assert_relative_eq!(ld.log_abs, 5.75f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn length_checked() {
        let s = SemiSeparableSpec::diagonal(vec![1.0; 3]).unwrap();
        let f = factorize(&s).unwrap();
        assert!(f.solve(&[1.0; 2]).is_err());
        assert!(residual_inf(&s, &[1.0; 2], &[1.0; 3]).is_err());
        assert!(residual_inf(&s, &[1.0; 3], &[1.0; 4]).is_err());
    }

    #[test]
    fn batch_strategies_agree() {
        let k = ExponentialKernelSpec::new(3.0, vec![1.0, 0.5], vec![0.3, 1.2], (0..40).map(f64::from).collect())
            .unwrap();
        let f = factorize(&k).unwrap();
        let rhs: Vec<Vec<f64>> = (0..8).map(|s| (0..40).map(|i| ((i * 7 + s) % 11) as f64 - 5.0).collect()).collect();
        let seq = f.solve_many(&rhs, Strategy::Sequential).unwrap();
        let par = f.solve_many(&rhs, Strategy::Parallel).unwrap();
        assert_eq!(seq, par);
        for (b, x) in rhs.iter().zip(&seq) {
            assert_eq!(&f.solve(b).unwrap(), x);
        }
    }
}
