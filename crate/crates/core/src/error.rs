use thiserror::Error;

/// Errors raised while describing, embedding or factoring a structured matrix.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EssError {
    #[error("invalid matrix description: {0}")]
    InvalidSpec(String),

    #[error("index ({i}, {j}) out of range for a {n}x{n} matrix")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("entry ({i}, {j}) lies outside the band (kl = {kl}, ku = {ku})")]
    OutOfBand { i: usize, j: usize, kl: usize, ku: usize },

    #[error("matrix is singular: no usable pivot in column {column}")]
    Singular { column: usize },

    #[error("rank-1 embedding requested for a rank-{p} matrix; use embed_rankp")]
    RankMismatch { p: usize },

    #[error("dense size {n} exceeds the dense cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, EssError>;
