use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::form::HssBuildConfig;
use super::tree::HssTree;
use crate::error::{Error, Result};
use crate::numerics::{id_rows, RealMatrix};
use crate::proxy::{cauchy_factor, ProxyScheme};

/// How one candidate row of a generator is expressed in skeleton rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorRow {
    /// Skeleton row: identity on the given skeleton column.
    Skeleton(usize),
    /// Far-field row interpolated by the given row of the expansion matrix.
    Interpolated(usize),
}

/// Row generator shared by all nodes at one depth: a permuted
/// `[I; E]` block over the node's candidate rows.
///
/// Offsets are 0-based positions within a node's range. At the leaf depth
/// the candidates are the whole range; above it they are the children's
/// skeletons, first child then second.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGenerator {
    pub depth: usize,
    pub node_size: usize,
    /// Ascending local offsets.
    pub candidates: Vec<usize>,
    /// Ascending local offsets, a subset of `candidates`.
    pub skeleton: Vec<usize>,
    /// One entry per candidate.
    pub rows: Vec<GeneratorRow>,
    /// Interpolated rows × far-field skeleton rows.
    pub expansion: RealMatrix,
    /// Skeleton column of each expansion column.
    pub far_columns: Vec<usize>,
    pub near_count: usize,
    pub far_count: usize,
    /// Far-field skeleton size actually used.
    pub rank: usize,
    /// Set when the configured rank was reduced to the far-field size or to
    /// the numerical rank of the proxy factor.
    pub rank_reduced: bool,
    pub swaps: usize,
    /// Quadrature geometry in the node frame (centre 0).
    pub scheme: ProxyScheme,
}

impl LevelGenerator {
    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn skeleton_size(&self) -> usize {
        self.skeleton.len()
    }

    pub fn max_expansion(&self) -> f64 {
        self.expansion.max_abs()
    }

    /// `G X` for `X` with one row per skeleton column, restricted to the
    /// candidate rows `rows`.
    pub fn apply_rows(&self, x: &RealMatrix, rows: core::ops::Range<usize>) -> RealMatrix {
        let m = x.cols();
        let mut out = RealMatrix::zeros(rows.len(), m);
        for (o, i) in rows.enumerate() {
            let dst = out.row_mut(o);
            match self.rows[i] {
                GeneratorRow::Skeleton(c) => dst.copy_from_slice(x.row(c)),
                GeneratorRow::Interpolated(t) => {
                    for (&e, &c) in self.expansion.row(t).iter().zip(&self.far_columns) {
                        for (d, &v) in dst.iter_mut().zip(x.row(c)) {
                            *d += e * v;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &RealMatrix) -> RealMatrix {
        self.apply_rows(x, 0..self.rows.len())
    }

    /// `Gᵀ Y` for `Y` with one row per candidate.
    pub fn apply_transpose(&self, y: &RealMatrix) -> RealMatrix {
        let m = y.cols();
        let mut out = RealMatrix::zeros(self.skeleton.len(), m);
        for (i, row) in self.rows.iter().enumerate() {
            match *row {
                GeneratorRow::Skeleton(c) => {
                    for (d, &v) in out.row_mut(c).iter_mut().zip(y.row(i)) {
                        *d += v;
                    }
                }
                GeneratorRow::Interpolated(t) => {
                    for (&e, &c) in self.expansion.row(t).iter().zip(&self.far_columns) {
                        for (d, &v) in out.row_mut(c).iter_mut().zip(y.row(i)) {
                            *d += e * v;
                        }
                    }
                }
            }
        }
        out
    }

    /// Dense `candidates × skeleton` generator.
    pub fn to_dense(&self) -> RealMatrix {
        self.apply(&RealMatrix::identity(self.skeleton.len()))
    }

    /// Structural consistency of a generator, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(alloc::format!("generator at depth {}: {msg}", self.depth)));
        if self.rows.len() != self.candidates.len() {
            return bad("row count differs from candidate count");
        }
        if !self.candidates.windows(2).all(|w| w[0] < w[1])
            || !self.skeleton.windows(2).all(|w| w[0] < w[1])
            || self.candidates.last().is_some_and(|&c| c >= self.node_size)
        {
            return bad("offsets not ascending within the node");
        }
        if self.far_columns.len() != self.expansion.cols()
            || self.far_columns.iter().any(|&c| c >= self.skeleton.len())
        {
            return bad("far columns out of range");
        }
        let mut seen = vec![false; self.skeleton.len()];
        let mut interpolated = 0;
        for (i, row) in self.rows.iter().enumerate() {
            match *row {
                GeneratorRow::Skeleton(c) => {
                    if c >= self.skeleton.len() || seen[c] || self.skeleton[c] != self.candidates[i] {
                        return bad("skeleton row mismatch");
                    }
                    seen[c] = true;
                }
                GeneratorRow::Interpolated(t) => {
                    if t != interpolated || t >= self.expansion.rows() {
                        return bad("interpolated rows out of order");
                    }
                    interpolated += 1;
                }
            }
        }
        if interpolated != self.expansion.rows() || seen.iter().any(|s| !s) {
            return bad("row map does not cover the skeleton");
        }
        if !self.expansion.all_finite() {
            return bad("non-finite expansion");
        }
        Ok(())
    }
}

/// Generator for `depth`, anchored at the first node of that depth.
///
/// `carried` is the child depth's skeleton pattern; `None` at the leaf depth.
pub fn build_level_generator(
    tree: &HssTree,
    depth: usize,
    carried: Option<&[usize]>,
    cfg: &HssBuildConfig,
) -> Result<LevelGenerator> {
    let node = *tree
        .nodes_at_depth(depth)
        .first()
        .filter(|_| depth >= 1)
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("no generator at depth {depth}")))?;
    build_level_generator_at(tree, node, carried, cfg)
}

/// Generator computed from the absolute indices of node `node`.
pub fn build_level_generator_at(
    tree: &HssTree,
    node: usize,
    carried: Option<&[usize]>,
    cfg: &HssBuildConfig,
) -> Result<LevelGenerator> {
    let info = tree.node(node);
    let depth = info.depth;
    if depth == 0 {
        return Err(Error::invalid("the root has no generator"));
    }
    let size = info.range.len();
    let half = size / 2;
    let candidates: Vec<usize> = match (info.is_leaf(), carried) {
        (true, None) => (0..size).collect(),
        (false, Some(k)) => {
            if k.iter().any(|&o| o >= half) || !k.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::invalid("carried skeleton is not a pattern of the child range"));
            }
            k.iter().copied().chain(k.iter().map(|&o| o + half)).collect()
        }
        (true, Some(_)) => return Err(Error::invalid("leaf generators take no carried skeleton")),
        (false, None) => return Err(Error::invalid("interior generators need the child skeleton")),
    };

    let quarter = size / 4;
    let is_near = |o: usize| o < quarter || o >= 3 * quarter;
    let far: Vec<usize> = candidates.iter().copied().filter(|&o| !is_near(o)).collect();
    let near_count = candidates.len() - far.len();

    // Node-centred offsets from absolute indices; all exact in binary.
    let center = info.range.center();
    let offsets: Vec<f64> = far
        .iter()
        .map(|&o| (info.range.start + o) as f64 - center)
        .collect();
    let inner = offsets.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 0.5;
    let outer = half as f64 + 0.5;
    let scheme = ProxyScheme::new(Complex64::new(0.0, 0.0), inner, outer, cfg.p)?;

    let requested = cfg.rank.min(far.len()).min(cfg.p);
    let mut rank_reduced = requested < cfg.rank;
    let (selected_far, remaining_far, expansion, swaps) = if requested == far.len() {
        (far.clone(), Vec::new(), RealMatrix::zeros(0, far.len()), 0)
    } else {
        let rows: Vec<Complex64> = offsets.iter().map(|&d| Complex64::new(d, 0.0)).collect();
        let embedded = cauchy_factor(&rows, &scheme).real_imag_columns();
        let mut k = requested;
        let id = loop {
            match id_rows(&embedded, k, cfg.f_bound) {
                Ok(id) => break id,
                Err(Error::RankDeficient { found, .. }) if found >= 1 && found < k => {
                    k = found;
                    rank_reduced = true;
                }
                Err(e) => return Err(e),
            }
        };
        let sel = id.selected.iter().map(|&i| far[i]).collect();
        let rem = id.remaining.iter().map(|&i| far[i]).collect();
        (sel, rem, id.expansion, id.swaps)
    };

    let mut skeleton: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&o| is_near(o))
        .chain(selected_far.iter().copied())
        .collect();
    skeleton.sort_unstable();

    let column_of = |o: usize| skeleton.binary_search(&o).expect("offset in skeleton");
    let far_columns: Vec<usize> = selected_far.iter().map(|&o| column_of(o)).collect();
    let rows: Vec<GeneratorRow> = candidates
        .iter()
        .map(|&o| match remaining_far.binary_search(&o) {
            Ok(t) => GeneratorRow::Interpolated(t),
            Err(_) => GeneratorRow::Skeleton(column_of(o)),
        })
        .collect();

    Ok(LevelGenerator {
        depth,
        node_size: size,
        rank: selected_far.len(),
        candidates,
        skeleton,
        rows,
        expansion,
        far_columns,
        near_count,
        far_count: far.len(),
        rank_reduced,
        swaps,
        scheme,
    })
}
