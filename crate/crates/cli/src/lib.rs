//! File formats, table reproduction and output helpers behind the `proxyhss`
//! command-line tool.

pub mod container;
pub mod error;
pub mod kernel_file;
pub mod output;
pub mod reference;
pub mod repro;

pub use error::{CliError, CliResult};
