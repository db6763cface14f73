//! Extended sparse embedding of a semi-separable system.
//!
//! A dense `n x n` system `A x = b` of semi-separable rank `p` is rewritten
//! with `2p (n - 1)` auxiliary unknowns holding running partial sums, giving
//! a banded system of dimension `(2p + 1) n - 2p`. Unknowns are grouped per
//! sample `k` as
//!
//! ```text
//! [ x_k | r-slot: R_{k+1}^(1..p) | l-slot: L_k^(1..p) ]
//! ```
//!
//! where `R_{k+1}` accumulates the contributions of `x_{k+1}, .., x_{n-1}`
//! and `L_k` those of `x_0, .., x_k`. The last sample has only `x_{n-1}`.
//! Equation rows follow the same ordering: the row at `x_k` is the original
//! equation `k`, the row at an r-slot defines the matching `L_k`, and the row
//! at an l-slot defines the matching `R_{k+1}`. Every nonzero then lies within
//! `p + 1` of the diagonal. Auxiliary rows have a structural zero on the
//! diagonal; partial pivoting deals with it.

use crate::banded::{CompressedBand, CompressedBandBuilder};
use crate::error::{EssError, Result};
use crate::semiseparable::{check_len, ExponentialKernelSpec, SemiSeparableSpec};

/// Position map of the extended unknowns (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingLayout {
    n: usize,
    p: usize,
}

impl EmbeddingLayout {
    pub fn new(n: usize, p: usize) -> Self {
        Self { n, p }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Extended dimension `(2p + 1) n - 2p`.
    pub fn dim(&self) -> usize {
        (2 * self.p + 1) * self.n - 2 * self.p
    }

    /// Half-bandwidth the assembly guarantees, `p + 1` (zero for `p = 0`).
    pub fn half_bandwidth(&self) -> usize {
        if self.p == 0 {
            0
        } else {
            self.p + 1
        }
    }

    #[inline]
    pub fn x_pos(&self, k: usize) -> usize {
        k * (2 * self.p + 1)
    }

    /// Position of `R_{k+1}^(l)`, for `k < n - 1`.
    #[inline]
    pub fn r_pos(&self, k: usize, l: usize) -> usize {
        self.x_pos(k) + 1 + l
    }

    /// Position of `L_k^(l)`, for `k < n - 1`.
    #[inline]
    pub fn l_pos(&self, k: usize, l: usize) -> usize {
        self.x_pos(k) + 1 + self.p + l
    }

    pub fn x_positions(&self) -> Vec<usize> {
        (0..self.n).map(|k| self.x_pos(k)).collect()
    }

    /// `true` for positions holding an original unknown.
    pub fn is_original(&self, pos: usize) -> bool {
        pos.is_multiple_of(2 * self.p + 1)
    }
}

/// Which construction produced an [`ExtendedSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    /// Raw generators `U`, `V`.
    Generators,
    /// Inter-point decay factors of an exponential kernel.
    StableExponential,
}

/// Banded extended matrix plus the map back to the original unknowns.
///
/// The band is kept row-compressed; [`CompressedBand::to_banded`] expands it
/// into factorization storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSystem {
    band: CompressedBand,
    layout: EmbeddingLayout,
    x_positions: Vec<usize>,
    kind: EmbeddingKind,
}

impl ExtendedSystem {
    fn new(band: CompressedBand, layout: EmbeddingLayout, kind: EmbeddingKind) -> Self {
        let x_positions = layout.x_positions();
        Self { band, layout, x_positions, kind }
    }

    pub fn band(&self) -> &CompressedBand {
        &self.band
    }

    pub fn layout(&self) -> &EmbeddingLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.band.dim()
    }

    /// Extended position of each original unknown, strictly increasing.
    pub fn x_positions(&self) -> &[usize] {
        &self.x_positions
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn into_parts(self) -> (CompressedBand, EmbeddingLayout) {
        (self.band, self.layout)
    }

    /// Extended right-hand side: `b_k` at the row of equation `k`, zero on
    /// every auxiliary row.
    pub fn embed_rhs(&self, b: &[f64]) -> Result<Vec<f64>> {
        embed_rhs(&self.layout, b)
    }

    /// Original unknowns picked out of an extended solution.
    pub fn extract_solution(&self, x_ex: &[f64]) -> Result<Vec<f64>> {
        extract_solution(&self.layout, x_ex)
    }
}

pub fn embed_rhs(layout: &EmbeddingLayout, b: &[f64]) -> Result<Vec<f64>> {
    check_len(layout.n(), b.len())?;
    let mut out = vec![0.0; layout.dim()];
    for (k, &bk) in b.iter().enumerate() {
        out[layout.x_pos(k)] = bk;
    }
    Ok(out)
}

pub fn extract_solution(layout: &EmbeddingLayout, x_ex: &[f64]) -> Result<Vec<f64>> {
    check_len(layout.dim(), x_ex.len())?;
    Ok((0..layout.n()).map(|k| x_ex[layout.x_pos(k)]).collect())
}

/// Anything that can be turned into an extended banded system.
pub trait Embed {
    fn embed(&self) -> Result<ExtendedSystem>;
}

impl Embed for SemiSeparableSpec {
    fn embed(&self) -> Result<ExtendedSystem> {
        embed_rankp(self)
    }
}

impl Embed for ExponentialKernelSpec {
    fn embed(&self) -> Result<ExtendedSystem> {
        embed_stable_exponential(self)
    }
}

fn builder(layout: &EmbeddingLayout) -> Result<CompressedBandBuilder> {
    let hb = layout.half_bandwidth();
    let nnz = (8 * layout.p() + 1) * layout.n();
    CompressedBandBuilder::new(layout.dim(), hb, hb, nnz)
}

/// Rank-1 embedding, unknown order `x_1, r_2, l_1, x_2, r_3, l_2, ..., x_n`.
pub fn embed_rank1(spec: &SemiSeparableSpec) -> Result<ExtendedSystem> {
    if spec.p() != 1 {
        return Err(EssError::RankMismatch { p: spec.p() });
    }
    embed_rankp(spec)
}

/// General rank-`p` embedding from raw generators. `p = 0` yields the
/// diagonal system itself.
pub fn embed_rankp(spec: &SemiSeparableSpec) -> Result<ExtendedSystem> {
    let (n, p) = (spec.n(), spec.p());
    let layout = EmbeddingLayout::new(n, p);
    let mut band = builder(&layout)?;

    for k in 0..n {
        let s = layout.x_pos(k);
        let (u, v) = (spec.u_row(k), spec.v_row(k));
        let last = k + 1 == n;

        // equation k: V_k . L_{k-1} + a_k x_k + U_k . R_{k+1} = b_k
        if k > 0 {
            for (l, &v) in v.iter().enumerate() {
                band.push(s, layout.l_pos(k - 1, l), v)?;
            }
        }
        band.push(s, s, spec.diag()[k])?;
        if last {
            break;
        }
        for (l, &u) in u.iter().enumerate() {
            band.push(s, layout.r_pos(k, l), u)?;
        }

        // L_k = u_k x_k + L_{k-1}
        for (l, &u) in u.iter().enumerate() {
            let row = layout.r_pos(k, l);
            if k > 0 {
                band.push(row, layout.l_pos(k - 1, l), 1.0)?;
            }
            band.push(row, s, u)?;
            band.push(row, layout.l_pos(k, l), -1.0)?;
        }
        // R_{k+1} = v_{k+1} x_{k+1} + R_{k+2}
        for (l, &v_next) in spec.v_row(k + 1).iter().enumerate() {
            let row = layout.l_pos(k, l);
            band.push(row, layout.r_pos(k, l), -1.0)?;
            band.push(row, layout.x_pos(k + 1), v_next)?;
            if k + 2 < n {
                band.push(row, layout.r_pos(k + 1, l), 1.0)?;
            }
        }
    }
    Ok(ExtendedSystem::new(band.finish(), layout, EmbeddingKind::Generators))
}

/// Embedding of an exponential-sum covariance built from the decay factors
/// `gamma_k = exp(-beta (t_{k+1} - t_k))` only:
///
/// ```text
/// L_k     = gamma_k (x_k + L_{k-1})                  L_{-1} = 0
/// R_{k+1} = alpha x_{k+1} + gamma_{k+1} R_{k+2}      R_n    = 0
/// alpha . L_{k-1} + d x_k + gamma_k . R_{k+1} = b_k
/// ```
///
/// Every stored entry is bounded by `max(1, |d|, max |alpha|)`.
pub fn embed_stable_exponential(spec: &ExponentialKernelSpec) -> Result<ExtendedSystem> {
    let (n, p) = (spec.n(), spec.p());
    let layout = EmbeddingLayout::new(n, p);
    let mut band = builder(&layout)?;
    let alpha = spec.alpha();

    let mut gamma = vec![0.0; p];
    let mut gamma_next = vec![0.0; p];
    if n > 1 {
        spec.decay_into(0, &mut gamma);
    }
    for k in 0..n {
        let s = layout.x_pos(k);
        if k > 0 {
            for (l, &a) in alpha.iter().enumerate() {
                band.push(s, layout.l_pos(k - 1, l), a)?;
            }
        }
        band.push(s, s, spec.d())?;
        if k + 1 == n {
            break;
        }
        for (l, &g) in gamma.iter().enumerate() {
            band.push(s, layout.r_pos(k, l), g)?;
        }

        for (l, &g) in gamma.iter().enumerate() {
            let row = layout.r_pos(k, l);
            if k > 0 {
                band.push(row, layout.l_pos(k - 1, l), g)?;
            }
            band.push(row, s, g)?;
            band.push(row, layout.l_pos(k, l), -1.0)?;
        }
        // gamma_{n-1} would pair with R_n = 0 and is never formed
        let has_next = k + 2 < n;
        if has_next {
            spec.decay_into(k + 1, &mut gamma_next);
        }
        for (l, &a) in alpha.iter().enumerate() {
            let row = layout.l_pos(k, l);
            band.push(row, layout.r_pos(k, l), -1.0)?;
            band.push(row, layout.x_pos(k + 1), a)?;
            if has_next {
                band.push(row, layout.r_pos(k + 1, l), gamma_next[l])?;
            }
        }
        std::mem::swap(&mut gamma, &mut gamma_next);
    }
    Ok(ExtendedSystem::new(band.finish(), layout, EmbeddingKind::StableExponential))
}
