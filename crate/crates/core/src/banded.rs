//! Band storage and banded LU with partial pivoting.
//!
//! Storage is row-major: row `i` holds columns `i - kl ..= i + ku + kl`
//! contiguously. The trailing `kl` slots of every row are reserved for the
//! fill-in that row interchanges create, so factorization works in place.

use crate::error::{EssError, Result};

/// A column is singular when no candidate pivot exceeds this magnitude.
pub const PIVOT_TOLERANCE: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    /// Zero `dim x dim` matrix with `kl` sub- and `ku` super-diagonals.
    /// Bandwidths larger than `dim - 1` are clamped.
    pub fn zeros(dim: usize, kl: usize, ku: usize) -> Result<Self> {
        if dim == 0 {
            return Err(EssError::InvalidSpec("band matrix dimension must be at least 1".into()));
        }
        let kl = kl.min(dim - 1);
        let ku = ku.min(dim - 1);
        let width = 2 * kl + ku + 1;
        Ok(Self { dim, kl, ku, width, data: vec![0.0; dim * width] })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.dim && j < self.dim && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        i * self.width + j + self.kl - i
    }

    /// Entry `(i, j)`; zero anywhere outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, val: f64) -> Result<()> {
        if !self.in_band(i, j) {
            return Err(EssError::OutOfBand { i, j, kl: self.kl, ku: self.ku });
        }
        let at = self.offset(i, j);
        self.data[at] = val;
        Ok(())
    }

    /// Iterates the in-band entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.dim - 1);
        (lo..=hi).map(move |j| (j, self.data[self.offset(i, j)]))
    }

    /// Largest `|i - j|` over the entries that are actually nonzero.
    pub fn measured_bandwidth(&self) -> usize {
        (0..self.dim)
            .flat_map(|i| self.row(i).filter(|&(_, v)| v != 0.0).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// `true` when every stored entry is finite.
    pub fn all_finite(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(_, v)| v.is_finite()))
    }

    /// Largest stored magnitude.
    pub fn max_abs(&self) -> f64 {
        (0..self.dim).flat_map(|i| self.row(i)).fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(EssError::LengthMismatch { expected: self.dim, found: x.len() });
        }
        Ok((0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect())
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let m = self.dim;
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for (j, v) in self.row(i) {
                out[i * m + j] = v;
            }
        }
        out
    }

    /// Factors a copy of the matrix; see [`BandedMatrix::into_lu`].
    pub fn lu(&self) -> Result<BandedLu> {
        self.clone().into_lu()
    }

    /// In-place LU factorization with partial pivoting, `P M = L U`.
    ///
    /// Pivot candidates are limited to the `kl` rows below the diagonal, so
    /// the cost is `O((kl + ku) kl m)` at worst. Exact zeros inside the
    /// band are skipped.
    pub fn into_lu(self) -> Result<BandedLu> {
        let Self { dim: m, kl, ku, width: w, mut data } = self;
        let reach = kl + ku;

        // last column of each row that may hold a nonzero
        let mut row_end: Vec<usize> = (0..m)
            .map(|i| {
                let hi = (i + ku).min(m - 1);
                (i..=hi)
                    .rev()
                    .find(|&j| data[i * w + j + kl - i] != 0.0)
                    .unwrap_or(i)
            })
            .collect();
        let mut lower_end = vec![0usize; m];
        let mut pivots = Vec::with_capacity(m);
        let mut parity = 1i8;

        for k in 0..m {
            let last = (k + kl).min(m - 1);

            let mut piv = k;
            let mut best = data[k * w + kl].abs();
            for i in k + 1..=last {
                let v = data[i * w + k + kl - i].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if !(best >= PIVOT_TOLERANCE) {
                return Err(EssError::Singular { column: k });
            }
            pivots.push(piv);

            if piv != k {
                parity = -parity;
                let hi = row_end[k].max(row_end[piv]).min(k + reach);
                let (head, tail) = data.split_at_mut(piv * w);
                let rk = &mut head[k * w..(k + 1) * w];
                let rp = &mut tail[..w];
                for j in k..=hi {
                    std::mem::swap(&mut rk[j + kl - k], &mut rp[j + kl - piv]);
                }
                row_end.swap(k, piv);
            }

            let end = row_end[k];
            let (head, tail) = data.split_at_mut((k + 1) * w);
            let rk = &head[k * w..];
            let pivot = rk[kl];
            let upper = &rk[kl + 1..=end + kl - k];
            let mut lower_last = k;
            for i in k + 1..=last {
                let ri = &mut tail[(i - k - 1) * w..(i - k) * w];
                let f = ri[k + kl - i];
                if f == 0.0 {
                    continue;
                }
                let f = f / pivot;
                ri[k + kl - i] = f;
                lower_last = i;
                let base = k + 1 + kl - i;
                for (a, u) in ri[base..base + upper.len()].iter_mut().zip(upper) {
                    *a -= f * u;
                }
                if end > row_end[i] {
                    row_end[i] = end;
                }
            }
            lower_end[k] = lower_last;
        }

        Ok(BandedLu { dim: m, kl, ku, width: w, data, pivots, row_end, lower_end, parity })
    }
}

/// Row-compressed storage of a matrix whose entries all lie inside a band.
///
/// Holds only the entries that were written, so building it costs time and
/// memory proportional to the number of nonzeros rather than to the band
/// area. [`CompressedBand::to_banded`] expands it for factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedBand {
    dim: usize,
    kl: usize,
    ku: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CompressedBand {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().map(|&j| j as usize).zip(self.vals[r].iter().copied())
    }

    /// All stored entries as `(row, column, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.dim {
            return 0.0;
        }
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    /// Largest `|i - j|` over the stored nonzero entries.
    pub fn measured_bandwidth(&self) -> usize {
        self.triplets().filter(|t| t.2 != 0.0).map(|(i, j, _)| i.abs_diff(j)).max().unwrap_or(0)
    }

    pub fn all_finite(&self) -> bool {
        self.vals.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(EssError::LengthMismatch { expected: self.dim, found: x.len() });
        }
        Ok((0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect())
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let m = self.dim;
        let mut out = vec![0.0; m * m];
        for (i, j, v) in self.triplets() {
            out[i * m + j] += v;
        }
        out
    }

    /// Expands into band storage with room for pivoting fill-in.
    pub fn to_banded(&self) -> Result<BandedMatrix> {
        let mut band = BandedMatrix::zeros(self.dim, self.kl, self.ku)?;
        let (w, kl) = (band.width, band.kl);
        for i in 0..self.dim {
            let row = &mut band.data[i * w..(i + 1) * w];
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            for (&j, &v) in self.cols[r.clone()].iter().zip(&self.vals[r]) {
                row[j as usize + kl - i] += v;
            }
        }
        Ok(band)
    }
}

/// Builds a [`CompressedBand`] row by row.
#[derive(Debug)]
pub struct CompressedBandBuilder {
    inner: CompressedBand,
}

impl CompressedBandBuilder {
    /// Bandwidths are clamped to `dim - 1` as in [`BandedMatrix::zeros`].
    pub fn new(dim: usize, kl: usize, ku: usize, nnz_hint: usize) -> Result<Self> {
        if dim == 0 {
            return Err(EssError::InvalidSpec("band matrix dimension must be at least 1".into()));
        }
        if u32::try_from(dim).is_err() {
            return Err(EssError::InvalidSpec(format!("dimension {dim} exceeds the u32 column index range")));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        Ok(Self {
            inner: CompressedBand {
                dim,
                kl: kl.min(dim - 1),
                ku: ku.min(dim - 1),
                row_ptr,
                cols: Vec::with_capacity(nnz_hint),
                vals: Vec::with_capacity(nnz_hint),
            },
        })
    }

    /// Appends entry `(i, j)`. Rows must arrive in non-decreasing order;
    /// entries outside the band are rejected.
    pub fn push(&mut self, i: usize, j: usize, val: f64) -> Result<()> {
        let b = &mut self.inner;
        if i >= b.dim || j >= b.dim || j + b.kl < i || j > i + b.ku {
            return Err(EssError::OutOfBand { i, j, kl: b.kl, ku: b.ku });
        }
        let current = b.row_ptr.len() - 1;
        if i < current {
            return Err(EssError::InvalidSpec(format!("row {i} pushed after row {current}")));
        }
        for _ in current..i {
            b.row_ptr.push(b.cols.len());
        }
        b.cols.push(j as u32);
        b.vals.push(val);
        Ok(())
    }

    pub fn finish(mut self) -> CompressedBand {
        let b = &mut self.inner;
        while b.row_ptr.len() <= b.dim {
            b.row_ptr.push(b.cols.len());
        }
        self.inner
    }
}

/// Log-magnitude and sign of a determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    /// `log |det|`, or `-inf` when the determinant is zero.
    pub log_abs: f64,
    /// `+1`, `-1`, or `0` for a zero determinant.
    pub sign: i8,
}

impl LogDet {
    /// `sign * exp(log_abs)`; overflows for large matrices.
    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.log_abs.exp()
    }
}

/// Result of [`BandedMatrix::into_lu`]: unit-lower multipliers and the upper
/// factor stored in place, plus the row-interchange record.
#[derive(Debug, Clone)]
pub struct BandedLu {
    dim: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
    row_end: Vec<usize>,
    lower_end: Vec<usize>,
    parity: i8,
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row swapped with row `k` at elimination step `k`.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `+1` for an even number of row interchanges, `-1` for odd.
    pub fn swap_parity(&self) -> i8 {
        self.parity
    }

    /// Nonzero count of `L` (excluding its unit diagonal) and `U`.
    pub fn factor_nnz(&self) -> (usize, usize) {
        let (kl, w) = (self.kl, self.width);
        let mut lower = 0;
        let mut upper = 0;
        for (i, row) in self.data.chunks_exact(w).enumerate() {
            for (off, &v) in row.iter().enumerate() {
                if v != 0.0 && off + i >= kl {
                    if off < kl {
                        lower += 1;
                    } else {
                        upper += 1;
                    }
                }
            }
        }
        (lower, upper)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j + self.kl - i]
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut y = rhs.to_vec();
        self.solve_in_place(&mut y)?;
        Ok(y)
    }

    /// Overwrites `b` with the solution of `M y = b`.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let (m, kl, w) = (self.dim, self.kl, self.width);
        if b.len() != m {
            return Err(EssError::LengthMismatch { expected: m, found: b.len() });
        }
        for k in 0..m {
            let piv = self.pivots[k];
            if piv != k {
                b.swap(k, piv);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=self.lower_end[k] {
                    b[i] -= self.data[i * w + k + kl - i] * bk;
                }
            }
        }
        for i in (0..m).rev() {
            let row = &self.data[i * w..(i + 1) * w];
            let end = self.row_end[i];
            let s: f64 = row[kl + 1..=end + kl - i]
                .iter()
                .zip(&b[i + 1..=end])
                .map(|(u, y)| u * y)
                .sum();
            b[i] = (b[i] - s) / row[kl];
        }
        Ok(())
    }

    /// `log |det M|` from the diagonal of `U`, sign from the pivots and the
    /// interchange parity.
    pub fn log_abs_det(&self) -> LogDet {
        let mut log_abs = 0.0;
        let mut sign = self.parity;
        for i in 0..self.dim {
            let u = self.at(i, i);
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

    /// Multiplies the factors back together, undoing the interchanges, and
    /// returns the row-major dense matrix. Quadratic memory; test use only.
    pub fn reconstruct_dense(&self) -> Vec<f64> {
        let (m, kl, ku) = (self.dim, self.kl, self.ku);
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in i..=(i + kl + ku).min(m - 1) {
                out[i * m + j] = self.at(i, j);
            }
        }
        for k in (0..m).rev() {
            for i in k + 1..=(k + kl).min(m - 1) {
                let f = self.at(i, k);
                if f != 0.0 {
                    for j in 0..m {
                        out[i * m + j] += f * out[k * m + j];
                    }
                }
            }
            let piv = self.pivots[k];
            if piv != k {
                for j in 0..m {
                    out.swap(k * m + j, piv * m + j);
                }
            }
        }
        out
    }

    #[cfg(test)]
    fn max_fill(&self) -> usize {
        (0..self.dim).map(|i| self.row_end[i] - i).max().unwrap_or(0)
    }
}
