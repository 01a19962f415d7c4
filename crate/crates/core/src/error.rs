use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op} on {entries} entries exceeds the dense limit of {limit}")]
    TooLarge {
        op: &'static str,
        entries: usize,
        limit: usize,
    },

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("rank {requested} outside 1..={max}")]
    RankOutOfRange { requested: usize, max: usize },

    #[error("matrix is numerically rank deficient: requested rank {requested}, found {found}")]
    RankDeficient { requested: usize, found: usize },

    #[error("unknown generating function `{name}` (builtins: {builtins})")]
    UnknownBuiltin { name: String, builtins: &'static str },

    #[error("index ({i}, {j}) outside 1..={n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("{name} evaluated at {re}{im:+}i, outside its analyticity disk")]
    OutsideAnalyticDomain { name: &'static str, re: f64, im: f64 },

    #[error("{name} at real argument {arg} has imaginary residue {residue:e}")]
    ComplexResidue {
        name: &'static str,
        arg: f64,
        residue: f64,
    },

    #[error("point sets not separated: inner radius {inner} >= outer radius {outer}")]
    NotSeparated { inner: f64, outer: f64 },

    #[error("tolerance {tol:e} not reached for p <= {p_max}; best error {best_error:e} at p = {best_p}")]
    NotReached {
        tol: f64,
        p_max: usize,
        best_p: usize,
        best_error: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
