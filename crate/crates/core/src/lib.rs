//! Linear-time direct solver and log-determinant for symmetric semi-separable
//! matrices and exponential-sum covariance matrices.
//!
//! A dense rank-`p` semi-separable system of size `n` is embedded into a
//! banded system of size `(2p + 1) n - 2p` whose auxiliary unknowns carry the
//! running generator sums. Banded LU with partial pivoting then gives the
//! solution and `log |det A|` in time linear in `n`. Exponential kernels are
//! embedded through inter-point decay factors only, so nothing overflows no
//! matter how wide the sampling interval is.
//!
//! ```
//! use ess_core::{factorize, ExponentialKernelSpec, StructuredMatrix};
//!
//! let kernel = ExponentialKernelSpec::new(2.5, vec![1.0, 0.5], vec![0.3, 2.0], vec![0.0, 0.4, 1.1, 3.0])?;
//! let f = factorize(&kernel)?;
//! let b = [1.0, -1.0, 0.5, 2.0];
//! let x = f.solve(&b)?;
//! assert!(ess_core::residual_inf(&kernel, &x, &b)? < 1e-13);
//! let logdet = f.logdet().log_abs;
//! # let _ = logdet;
//! # Ok::<(), ess_core::EssError>(())
//! ```
//!
//! Indices are 0-based throughout.

pub mod banded;
pub mod embedding;
pub mod error;
pub mod oracle;
pub mod semiseparable;
pub mod solver;

pub use banded::{BandedLu, BandedMatrix, CompressedBand, LogDet};
pub use embedding::{
    embed_rank1, embed_rankp, embed_stable_exponential, Embed, EmbeddingKind, EmbeddingLayout, ExtendedSystem,
};
pub use error::{EssError, Result};
pub use semiseparable::{ExponentialKernelSpec, SemiSeparableSpec, StructuredMatrix};
pub use solver::{factorize, factorize_naive_unstable, residual_inf, EssFactor, Strategy};
