//! Dense real and complex matrices, norms, SVD, numerical rank and the
//! strong rank-revealing QR used for row skeletonization.

mod matrix;
mod norms;
mod rrqr;
mod scalar;
mod svd;

pub use matrix::{matmul, matmul_nt, ComplexMatrix, DenseMatrix, RealMatrix};
pub use norms::{frobenius_norm, two_norm, two_norm_with, KahanSum, NormConfig};
pub use rrqr::{id_rows, qrcp, ColumnPivotedQr, RowInterpolation, RowSource};
pub use scalar::Scalar;
pub use svd::{numerical_rank, svd, SvdResult};

/// Largest number of entries accepted by dense factorizations.
pub const DENSE_LIMIT: usize = 4096 * 4096;

/// Larger dimension above which [`two_norm`] switches from the SVD to power
/// iteration.
pub const TWO_NORM_SVD_THRESHOLD: usize = 2048;

/// Default SRRQR entry bound for interpolation coefficients.
pub const DEFAULT_F_BOUND: f64 = 2.0;
