//! HSS compression of Toeplitz matrices generated by analytic functions.
//!
//! Every node at a given depth of the HSS tree sees the same index pattern
//! relative to its own range, and the proxy factor of its far-field rows
//! depends on offsets only. One row generator per depth therefore serves all
//! nodes at that depth, and the column generators coincide with it.

mod apply;
mod form;
mod generator;
mod tree;

pub use apply::{block_error, hss_block_dense, hss_matvec, hss_to_dense, BlockError};
pub use form::{build_hss, BuildStats, Coupling, HssBuildConfig, HssForm};
pub use generator::{
    build_level_generator, build_level_generator_at, GeneratorRow, LevelGenerator,
};
pub use tree::{build_tree, split_near_far, HssNode, HssTree, IndexRange, NodeIndexSplit};
