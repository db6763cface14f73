//! Problem descriptions: symmetric semi-separable matrices in generator form
//! and exponential-sum covariance matrices.
//!
//! All indices are 0-based. Row `i`, column `j` of the API corresponds to the
//! 1-based entry `(i + 1, j + 1)` of the mathematical matrix.

use crate::error::{EssError, Result};

/// Common surface of the matrices this crate can embed and solve.
pub trait StructuredMatrix: Sync {
    /// Matrix dimension `n`.
    fn dim(&self) -> usize;

    /// Semi-separable rank `p`.
    fn rank(&self) -> usize;

    /// Entry `(i, j)` evaluated from the compact description.
    fn entry(&self, i: usize, j: usize) -> Result<f64>;

    /// `A x` in `O(p n)` operations.
    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Symmetric rank-`p` semi-separable matrix
///
/// ```text
///          | diag[i]                      i == j
/// A(i,j) = | sum_l u[j][l] * v[i][l]      i >  j
///          | sum_l u[i][l] * v[j][l]      i <  j
/// ```
///
/// `u` and `v` are stored row-major as `n x p` arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiSeparableSpec {
    n: usize,
    p: usize,
    diag: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl SemiSeparableSpec {
    /// Builds a spec from the diagonal and row-major `n x p` generators.
    pub fn new(p: usize, diag: Vec<f64>, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(EssError::InvalidSpec("dimension must be at least 1".into()));
        }
        for (name, g) in [("U", &u), ("V", &v)] {
            if g.len() != n * p {
                return Err(EssError::InvalidSpec(format!(
                    "generator {name} has {} entries, expected n * p = {}",
                    g.len(),
                    n * p
                )));
            }
        }
        Ok(Self { n, p, diag, u, v })
    }

    /// Builds a spec from per-row generator slices, `u[k]` and `v[k]` each of length `p`.
    pub fn from_rows(diag: Vec<f64>, u: &[Vec<f64>], v: &[Vec<f64>]) -> Result<Self> {
        let p = u.first().map_or(0, Vec::len);
        if u.len() != diag.len() || v.len() != diag.len() {
            return Err(EssError::InvalidSpec(
                "generator row count differs from diagonal length".into(),
            ));
        }
        if u.iter().chain(v).any(|row| row.len() != p) {
            return Err(EssError::InvalidSpec("ragged generator rows".into()));
        }
        Self::new(p, diag, u.concat(), v.concat())
    }

    /// Purely diagonal matrix (`p = 0`).
    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        Self::new(0, diag, Vec::new(), Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Generator row `U_k`.
    pub fn u_row(&self, k: usize) -> &[f64] {
        &self.u[k * self.p..(k + 1) * self.p]
    }

    /// Generator row `V_k`.
    pub fn v_row(&self, k: usize) -> &[f64] {
        &self.v[k * self.p..(k + 1) * self.p]
    }
}

impl StructuredMatrix for SemiSeparableSpec {
    fn dim(&self) -> usize {
        self.n
    }

    fn rank(&self) -> usize {
        self.p
    }

    fn entry(&self, i: usize, j: usize) -> Result<f64> {
        if i >= self.n || j >= self.n {
            return Err(EssError::IndexOutOfRange { i, j, n: self.n });
        }
        if i == j {
            return Ok(self.diag[i]);
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        Ok(dot(self.u_row(lo), self.v_row(hi)))
    }

    /// Forward prefix sums of `U_j x_j` and backward suffix sums of
    /// `V_j x_j`, combined per row. Inherits the conditioning of the raw
    /// generators.
    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let (n, p) = (self.n, self.p);
        let mut out: Vec<f64> = self.diag.iter().zip(x).map(|(a, x)| a * x).collect();
        if p == 0 {
            return Ok(out);
        }

        // below[i] = sum_{j<i} u_j x_j, contributes v_i . below to row i
        let mut acc = vec![0.0; p];
        for i in 0..n {
            out[i] += dot(self.v_row(i), &acc);
            for (a, u) in acc.iter_mut().zip(self.u_row(i)) {
                *a += u * x[i];
            }
        }
        // above[i] = sum_{j>i} v_j x_j, contributes u_i . above to row i
        acc.iter_mut().for_each(|a| *a = 0.0);
        for i in (0..n).rev() {
            out[i] += dot(self.u_row(i), &acc);
            for (a, v) in acc.iter_mut().zip(self.v_row(i)) {
                *a += v * x[i];
            }
        }
        Ok(out)
    }
}

/// Exponential-sum covariance matrix
///
/// ```text
/// A(i,j) = d                                          i == j
/// A(i,j) = sum_l alpha[l] * exp(-beta[l] |t_i - t_j|) i != j
/// ```
///
/// with strictly increasing sample locations `t` and non-negative decay
/// rates `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialKernelSpec {
    d: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    t: Vec<f64>,
}

impl ExponentialKernelSpec {
    pub fn new(d: f64, alpha: Vec<f64>, beta: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(EssError::InvalidSpec("need at least one sample location".into()));
        }
        if alpha.is_empty() {
            return Err(EssError::InvalidSpec("need at least one exponential".into()));
        }
        if alpha.len() != beta.len() {
            return Err(EssError::InvalidSpec(format!(
                "alpha has {} weights but beta has {} rates",
                alpha.len(),
                beta.len()
            )));
        }
        if !d.is_finite() || alpha.iter().chain(&beta).chain(&t).any(|x| !x.is_finite()) {
            return Err(EssError::InvalidSpec("non-finite parameter".into()));
        }
        if let Some(l) = beta.iter().position(|&b| b < 0.0) {
            return Err(EssError::InvalidSpec(format!("beta[{l}] is negative")));
        }
        if let Some(k) = t.windows(2).position(|w| w[1] <= w[0]) {
            return Err(EssError::InvalidSpec(format!(
                "sample locations must be strictly increasing (t[{}] >= t[{}])",
                k,
                k + 1
            )));
        }
        Ok(Self { d, alpha, beta, t })
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn p(&self) -> usize {
        self.alpha.len()
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    /// Decay factors `exp(-beta_l (t_{k+1} - t_k))` between points `k` and
    /// `k + 1`, written into `out` (length `p`). Every factor lies in `(0, 1]`
    /// (or underflows to 0 for very wide gaps).
    pub fn decay_into(&self, k: usize, out: &mut [f64]) {
        let gap = self.t[k + 1] - self.t[k];
        for (g, b) in out.iter_mut().zip(&self.beta) {
            *g = (-b * gap).exp();
        }
    }

    /// Naive generator form `u_k = alpha_l exp(beta_l t_k)`,
    /// `v_k = exp(-beta_l t_k)`.
    ///
    /// Overflows for wide `t` ranges; kept for small-scale validation and
    /// for demonstrating why the solver never uses it.
    pub fn to_generators(&self) -> SemiSeparableSpec {
        let (n, p) = (self.n(), self.p());
        let mut u = Vec::with_capacity(n * p);
        let mut v = Vec::with_capacity(n * p);
        for &tk in &self.t {
            for (a, b) in self.alpha.iter().zip(&self.beta) {
                u.push(a * (b * tk).exp());
                v.push((-b * tk).exp());
            }
        }
        SemiSeparableSpec { n, p, diag: vec![self.d; n], u, v }
    }
}

impl StructuredMatrix for ExponentialKernelSpec {
    fn dim(&self) -> usize {
        self.n()
    }

    fn rank(&self) -> usize {
        self.p()
    }

    fn entry(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(EssError::IndexOutOfRange { i, j, n });
        }
        if i == j {
            return Ok(self.d);
        }
        let r = (self.t[i] - self.t[j]).abs();
        Ok(self.alpha.iter().zip(&self.beta).map(|(a, b)| a * (-b * r).exp()).sum())
    }

    /// Uses only the inter-point decay factors, so every accumulator stays
    /// bounded by the partial sums of `|x|`.
    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (n, p) = (self.n(), self.p());
        check_len(n, x.len())?;
        let mut out: Vec<f64> = x.iter().map(|x| self.d * x).collect();
        let mut gamma = vec![0.0; p];
        let mut acc = vec![0.0; p];

        // acc_l = sum_{j<=k} x_j exp(-beta_l (t_{k+1} - t_j))
        for k in 0..n - 1 {
            self.decay_into(k, &mut gamma);
            for l in 0..p {
                acc[l] = gamma[l] * (acc[l] + x[k]);
            }
            out[k + 1] += dot(&self.alpha, &acc);
        }
        // acc_l = sum_{j>k} alpha_l x_j exp(-beta_l (t_j - t_k))
        acc.iter_mut().for_each(|a| *a = 0.0);
        for k in (0..n - 1).rev() {
            self.decay_into(k, &mut gamma);
            for l in 0..p {
                acc[l] = gamma[l] * (acc[l] + self.alpha[l] * x[k + 1]);
            }
            out[k] += acc.iter().sum::<f64>();
        }
        Ok(out)
    }
}

/// Maximum-norm residual `||A x - b||_inf`, evaluated with the fast matvec.
pub fn residual_inf<M: StructuredMatrix + ?Sized>(a: &M, x: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.dim(), b.len())?;
    let ax = a.matvec(x)?;
    Ok(ax.iter().zip(b).map(|(ax, b)| (ax - b).abs()).fold(0.0, f64::max))
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(EssError::LengthMismatch { expected, found })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_by_two() -> SemiSeparableSpec {
        SemiSeparableSpec::from_rows(vec![2.0, 3.0], &[vec![1.0], vec![9.0]], &[vec![9.0], vec![0.5]])
            .unwrap()
    }

    #[test]
    fn off_diagonal_uses_upper_u_and_lower_v() {
        let s = two_by_two();
        assert_eq!(s.entry(0, 1).unwrap(), 0.5);
        assert_eq!(s.entry(1, 0).unwrap(), 0.5);
        assert_eq!(s.entry(1, 1).unwrap(), 3.0);
        assert!(matches!(s.entry(2, 0), Err(EssError::IndexOutOfRange { .. })));
    }

    #[test]
    fn kernel_entries() {
        let k = ExponentialKernelSpec::new(4.0, vec![0.5, 1.5], vec![0.1, 1.0], vec![0.0, 1.0, 3.0])
            .unwrap();
        assert_eq!(k.entry(2, 2).unwrap(), 4.0);
        // 0.5 e^{-0.3} + 1.5 e^{-3}, evaluated to 20 digits with mpmath
        assert_relative_eq!(k.entry(0, 2).unwrap(), 0.44508971289265485, max_relative = 1e-15);

        let flat = ExponentialKernelSpec::new(7.0, vec![1.0], vec![0.0], vec![-3.0, 0.5, 8.0]).unwrap();
        assert_eq!(flat.entry(0, 2).unwrap(), 1.0);
    }

    #[test]
    fn kernel_validation() {
        assert!(ExponentialKernelSpec::new(1.0, vec![1.0], vec![-1.0], vec![0.0]).is_err());
        assert!(ExponentialKernelSpec::new(1.0, vec![1.0], vec![1.0], vec![0.0, 0.0]).is_err());
        assert!(ExponentialKernelSpec::new(1.0, vec![1.0, 2.0], vec![1.0], vec![0.0]).is_err());
        assert!(ExponentialKernelSpec::new(1.0, vec![], vec![], vec![0.0]).is_err());
    }

    #[test]
    fn generator_shape_checked() {
        assert!(SemiSeparableSpec::new(2, vec![1.0; 3], vec![0.0; 5], vec![0.0; 6]).is_err());
        assert!(SemiSeparableSpec::new(0, vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn generators_reproduce_kernel() {
        let k = ExponentialKernelSpec::new(2.0, vec![1.0], vec![1.0], vec![0.0, 1.0]).unwrap();
        let g = k.to_generators();
        assert_eq!(g.u_row(0), &[1.0]);
        assert_relative_eq!(g.u_row(1)[0], std::f64::consts::E);
        assert_relative_eq!(g.v_row(1)[0], 1.0 / std::f64::consts::E);
        assert_relative_eq!(g.entry(0, 1).unwrap(), (-1.0f64).exp());

        let flat = ExponentialKernelSpec::new(2.0, vec![0.7], vec![0.0], vec![0.0, 1.0, 5.0]).unwrap();
        let g = flat.to_generators();
        assert!((0..3).all(|k| g.u_row(k) == [0.7] && g.v_row(k) == [1.0]));
    }

    #[test]
    fn generators_overflow_on_wide_range() {
        let t: Vec<f64> = (0..=100).map(|k| 20.0 * k as f64).collect();
        let g = ExponentialKernelSpec::new(2.0, vec![1.0], vec![2.0], t).unwrap().to_generators();
        let n = g.n();
        assert!((0..n).any(|k| !g.u_row(k)[0].is_finite()));
        assert!((0..n).any(|k| g.v_row(k)[0] == 0.0 || g.v_row(k)[0].is_subnormal()));
    }

    #[test]
    fn diagonal_matvec() {
        let s = SemiSeparableSpec::diagonal(vec![1.0, -2.0, 4.0]).unwrap();
        assert_eq!(s.matvec(&[3.0, 1.0, 0.5]).unwrap(), vec![3.0, -2.0, 2.0]);
        assert_eq!(s.matvec(&[0.0; 3]).unwrap(), vec![0.0; 3]);
        assert!(s.matvec(&[1.0]).is_err());
    }

    #[test]
    fn residual_of_zero_is_norm_of_rhs() {
        let s = two_by_two();
        assert_eq!(residual_inf(&s, &[0.0, 0.0], &[1.0, -4.0]).unwrap(), 4.0);
    }

    #[test]
    fn wide_range_kernel_matvec_stays_finite() {
        let t: Vec<f64> = (0..500).map(|k| 20.0 * k as f64).collect();
        let k = ExponentialKernelSpec::new(3.0, vec![1.0, 0.5], vec![2.0, 0.0], t).unwrap();
        let y = k.matvec(&vec![1.0; 500]).unwrap();
        assert!(y.iter().all(|v| v.is_finite()));
    }
}
