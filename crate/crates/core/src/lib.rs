//! Iterative soft-decision decoding of short algebraic codes on multiple
//! Tanner graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2`] dense bit-packed binary matrices (echelon forms, null spaces,
//!   weight and 4-cycle metrics, brute-force minimum distance);
//! * [`codes`] quadratic residue code construction, alist I/O and
//!   parity-check matrix weight reduction;
//! * [`tanner`] standard-form Tanner graphs, edge local complementation (ELC)
//!   and orbit exploration with canonical labeling;
//! * [`autgroup`] coordinate permutations, PSL(2,p) generators and a
//!   product-replacement sampler;
//! * [`channel`] BPSK over AWGN;
//! * [`decode`] the flooding sum-product decoder, permutation decoding
//!   (SPA-PD) and random-ELC decoding (SPA-ELC);
//! * [`sim`] the Monte Carlo frame error rate harness.

pub mod autgroup;
pub mod channel;
pub mod codes;
pub mod decode;
pub mod gf2;
pub mod sim;
pub mod tanner;

pub use autgroup::{GeneratorSet, Permutation, ProductReplacement};
pub use codes::{CodeSpec, ReductionReport};
pub use decode::{DecodeParams, DecodeResult, DecoderKind, DecoderState};
pub use gf2::{BinMatrix, StandardFormInfo};
pub use sim::{FerPoint, SimConfig};
pub use tanner::{StructureId, TannerGraph};

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix has rank {rank}, expected full row rank {rows}")]
    RankDeficient { rank: usize, rows: usize },
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("{0} is not an odd prime with 2 a quadratic residue")]
    NotQrPrime(u64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconsistent degrees: {0}")]
    InconsistentDegrees(String),
    #[error("no edge between check {check} and bit {bit}")]
    NoSuchEdge { check: usize, bit: usize },
    #[error("bit {bit} is the pivot bit of check {check}")]
    PivotBit { check: usize, bit: usize },
    #[error("matrix is not in standard form")]
    NotStandardForm,
    #[error("exploration exceeded cap of {0}")]
    Overflow(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("permutation does not preserve the code: {0}")]
    NotAutomorphism(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
