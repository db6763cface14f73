//! Dense brute-force reference: assembly, textbook partial-pivoting LU,
//! determinants and the auxiliary-elimination check for extended systems.
//!
//! Nothing here is fast. It exists so that every fast path has an
//! independently auditable counterpart.

use crate::banded::LogDet;
use crate::embedding::ExtendedSystem;
use crate::error::{EssError, Result};
use crate::semiseparable::StructuredMatrix;
use crate::solver::Strategy;

/// Largest dimension [`assemble_dense`] accepts by default.
pub const DEFAULT_DENSE_CAP: usize = 5000;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(EssError::LengthMismatch { expected: n * n, found: data.len() });
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(EssError::LengthMismatch { expected: self.n, found: x.len() });
        }
        Ok(self.data.chunks_exact(self.n).map(|row| row.iter().zip(x).map(|(a, x)| a * x).sum()).collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if other.n != self.n {
            return Err(EssError::LengthMismatch { expected: self.n, found: other.n });
        }
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Entry-by-entry assembly through [`StructuredMatrix::entry`], rows
/// spread across threads when the `parallel` feature is on.
pub fn assemble_dense<M: StructuredMatrix + ?Sized>(spec: &M, cap: usize) -> Result<DenseMatrix> {
    assemble_dense_with(spec, cap, Strategy::Parallel)
}

pub fn assemble_dense_with<M: StructuredMatrix + ?Sized>(
    spec: &M,
    cap: usize,
    strategy: Strategy,
) -> Result<DenseMatrix> {
    let n = spec.dim();
    if n > cap {
        return Err(EssError::DenseCapExceeded { n, cap });
    }
    let mut data = vec![0.0; n * n];
    match strategy {
        Strategy::Sequential => data.chunks_exact_mut(n).enumerate().try_for_each(|(i, row)| fill_row(spec, i, row))?,
        Strategy::Parallel => fill_rows_parallel(spec, &mut data)?,
    }
    Ok(DenseMatrix { n, data })
}

#[cfg(feature = "parallel")]
fn fill_rows_parallel<M: StructuredMatrix + ?Sized>(spec: &M, data: &mut [f64]) -> Result<()> {
    use rayon::prelude::*;
    let n = spec.dim();
    data.par_chunks_exact_mut(n).enumerate().try_for_each(|(i, row)| fill_row(spec, i, row))
}

#[cfg(not(feature = "parallel"))]
fn fill_rows_parallel<M: StructuredMatrix + ?Sized>(spec: &M, data: &mut [f64]) -> Result<()> {
    let n = spec.dim();
    data.chunks_exact_mut(n).enumerate().try_for_each(|(i, row)| fill_row(spec, i, row))
}

fn fill_row<M: StructuredMatrix + ?Sized>(spec: &M, i: usize, row: &mut [f64]) -> Result<()> {
    for (j, a) in row.iter_mut().enumerate() {
        *a = spec.entry(i, j)?;
    }
    Ok(())
}

/// Textbook LU with partial pivoting, `P M = L U`, stored in place.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DenseMatrix,
    pivots: Vec<usize>,
    parity: i8,
    singular: bool,
}

impl DenseLu {
    /// Never fails; singularity is recorded and reported by `solve` and
    /// `log_abs_det`.
    pub fn factor(m: &DenseMatrix) -> Self {
        let n = m.n;
        let mut lu = m.clone();
        let mut pivots = Vec::with_capacity(n);
        let mut parity = 1;
        let mut singular = false;
        for k in 0..n {
            let mut piv = k;
            for i in k + 1..n {
                if lu[(i, k)].abs() > lu[(piv, k)].abs() {
                    piv = i;
                }
            }
            pivots.push(piv);
            if piv != k {
                parity = -parity;
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
            }
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                singular = true;
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu.data[i * n + j] -= f * lu.data[k * n + j];
                }
            }
        }
        Self { lu, pivots, parity, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.n;
        if b.len() != n {
            return Err(EssError::LengthMismatch { expected: n, found: b.len() });
        }
        if self.singular {
            let column = (0..n).find(|&k| self.lu[(k, k)] == 0.0).unwrap_or(0);
            return Err(EssError::Singular { column });
        }
        let mut y = b.to_vec();
        for (k, &piv) in self.pivots.iter().enumerate() {
            y.swap(k, piv);
        }
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * y[j]).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[(i, i)];
        }
        Ok(y)
    }

    pub fn log_abs_det(&self) -> LogDet {
        let mut log_abs = 0.0;
        let mut sign = self.parity;
        for k in 0..self.lu.n {
            let u = self.lu[(k, k)];
            if u == 0.0 {
                return LogDet { log_abs: f64::NEG_INFINITY, sign: 0 };
            }
            if u < 0.0 {
                sign = -sign;
            }
            log_abs += u.abs().ln();
        }
        LogDet { log_abs, sign }
    }
}

pub fn dense_solve(m: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    DenseLu::factor(m).solve(b)
}

pub fn dense_logdet(m: &DenseMatrix) -> LogDet {
    DenseLu::factor(m).log_abs_det()
}

/// Schur complement of the extended matrix onto the original unknowns:
/// `M_xx - M_xa M_aa^{-1} M_ax`, with `a` the auxiliary positions. For a
/// correct embedding this is the original dense matrix.
pub fn eliminate_auxiliaries(sys: &ExtendedSystem) -> Result<DenseMatrix> {
    let layout = sys.layout();
    let m = sys.dim();
    let dense = sys.band().to_dense();
    let at = |i: usize, j: usize| dense[i * m + j];
    let xs = sys.x_positions();
    let aux: Vec<usize> = (0..m).filter(|&i| !layout.is_original(i)).collect();
    let n = xs.len();
    let na = aux.len();

    let mut out = DenseMatrix::zeros(n);
    for (r, &i) in xs.iter().enumerate() {
        for (c, &j) in xs.iter().enumerate() {
            out[(r, c)] = at(i, j);
        }
    }
    if na == 0 {
        return Ok(out);
    }

    let mut aa = DenseMatrix::zeros(na);
    for (r, &i) in aux.iter().enumerate() {
        for (c, &j) in aux.iter().enumerate() {
            aa[(r, c)] = at(i, j);
        }
    }
    let aa = DenseLu::factor(&aa);
    // column c of M_aa^{-1} M_ax, then subtract M_xa times it
    for (c, &j) in xs.iter().enumerate() {
        let col: Vec<f64> = aux.iter().map(|&i| at(i, j)).collect();
        let z = aa.solve(&col)?;
        for (r, &i) in xs.iter().enumerate() {
            let s: f64 = aux.iter().zip(&z).map(|(&a, z)| at(i, a) * z).sum();
            out[(r, c)] -= s;
        }
    }
    Ok(out)
}
