//! Generating functions and the Toeplitz entry oracle built from them.

mod builtin;
mod toeplitz;

pub use builtin::{Builtin, Disk, GeneratingFunction};
pub use toeplitz::{
    dense_block, eval_analytic, toeplitz_entry, AnalyticKernel, ColumnSide, ConstantKernel,
    KernelBlockRequest, ToeplitzSpec,
};
