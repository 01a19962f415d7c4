use alloc::vec::Vec;

use super::generator::{build_level_generator, LevelGenerator};
use super::tree::{build_tree, HssTree};
use crate::error::{Error, Result};
use crate::kernels::{dense_block, KernelBlockRequest, ToeplitzSpec};
use crate::numerics::{RealMatrix, DEFAULT_F_BOUND};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HssBuildConfig {
    /// Proxy points per level.
    pub p: usize,
    /// Far-field skeleton rank cap.
    pub rank: usize,
    pub f_bound: f64,
    pub levels: usize,
}

impl HssBuildConfig {
    pub fn new(levels: usize, p: usize, rank: usize) -> Self {
        HssBuildConfig {
            p,
            rank,
            f_bound: DEFAULT_F_BOUND,
            levels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 4 {
            return Err(Error::invalid(alloc::format!("p = {} must be at least 4", self.p)));
        }
        if self.rank < 1 {
            return Err(Error::invalid("rank cap must be at least 1"));
        }
        if !(self.f_bound > 1.0 && self.f_bound.is_finite()) {
            return Err(Error::invalid(alloc::format!(
                "f_bound = {} must be finite and greater than 1",
                self.f_bound
            )));
        }
        Ok(())
    }
}

/// Sibling coupling blocks shared by every sibling pair at one depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    /// `T[skeleton of a first child, skeleton of its sibling]`.
    pub left: RealMatrix,
    /// `T[skeleton of a second child, skeleton of its sibling]`.
    pub right: RealMatrix,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildStats {
    /// Kernel entries evaluated for the diagonal leaf block.
    pub d_entries: usize,
    /// Kernel entries evaluated for coupling blocks.
    pub b_entries: usize,
    /// Kernel entries evaluated to confirm coupling reuse.
    pub b_check_entries: usize,
    /// Kernel entries touched while building generators.
    pub generator_entry_evals: usize,
    /// Cauchy factor entries formed over all depths.
    pub cauchy_entries: usize,
    pub max_expansion: f64,
    pub rank_reductions: usize,
    pub swaps: usize,
    /// Skeleton size per depth, index `depth - 1`.
    pub skeleton_sizes: Vec<usize>,
}

impl BuildStats {
    pub fn kernel_entries(&self) -> usize {
        self.d_entries + self.b_entries + self.b_check_entries + self.generator_entry_evals
    }
}

/// HSS form of a Toeplitz matrix with one generator per depth.
///
/// Generators double as column bases (`V = U`, `W = R`), the leaf diagonal
/// block is stored once, and couplings are stored per depth and orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct HssForm {
    tree: HssTree,
    spec: ToeplitzSpec,
    config: HssBuildConfig,
    leaf_block: RealMatrix,
    generators: Vec<LevelGenerator>,
    couplings: Vec<Coupling>,
    stats: BuildStats,
}

impl HssForm {
    /// Reassembles a form from stored parts after checking consistency.
    pub fn from_parts(
        spec: ToeplitzSpec,
        config: HssBuildConfig,
        leaf_block: RealMatrix,
        generators: Vec<LevelGenerator>,
        couplings: Vec<Coupling>,
        stats: BuildStats,
    ) -> Result<Self> {
        config.validate()?;
        let tree = build_tree(spec.n(), config.levels)?;
        let form = HssForm {
            tree,
            spec,
            config,
            leaf_block,
            generators,
            couplings,
            stats,
        };
        form.validate()?;
        Ok(form)
    }

    fn validate(&self) -> Result<()> {
        let levels = self.config.levels;
        let leaf = self.tree.leaf_size();
        if self.leaf_block.shape() != (leaf, leaf) {
            return Err(Error::invalid("leaf block has the wrong shape"));
        }
        if self.generators.len() != levels || self.couplings.len() != levels {
            return Err(Error::invalid("expected one generator and coupling per depth"));
        }
        for (i, g) in self.generators.iter().enumerate() {
            let depth = i + 1;
            g.validate()?;
            if g.depth != depth || g.node_size != self.tree.node_size(depth) {
                return Err(Error::invalid(alloc::format!("generator {i} has the wrong depth")));
            }
            let expected = if depth == levels {
                g.node_size
            } else {
                2 * self.generators[depth].skeleton_size()
            };
            if g.candidate_count() != expected {
                return Err(Error::invalid(alloc::format!(
                    "generator at depth {depth} has {} rows, expected {expected}",
                    g.candidate_count()
                )));
            }
            let k = g.skeleton_size();
            let c = &self.couplings[i];
            if c.left.shape() != (k, k) || c.right.shape() != (k, k) {
                return Err(Error::invalid(alloc::format!("coupling at depth {depth} has the wrong shape")));
            }
        }
        Ok(())
    }

    pub fn tree(&self) -> &HssTree {
        &self.tree
    }

    pub fn spec(&self) -> &ToeplitzSpec {
        &self.spec
    }

    pub fn config(&self) -> &HssBuildConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn levels(&self) -> usize {
        self.config.levels
    }

    /// Diagonal block shared by every leaf.
    pub fn leaf_block(&self) -> &RealMatrix {
        &self.leaf_block
    }

    pub fn generators(&self) -> &[LevelGenerator] {
        &self.generators
    }

    /// Generator for nodes at `depth` (`1..=levels`).
    pub fn generator(&self, depth: usize) -> &LevelGenerator {
        &self.generators[depth - 1]
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn coupling(&self, depth: usize) -> &Coupling {
        &self.couplings[depth - 1]
    }

    /// Coupling block for node `id` against its sibling.
    pub fn node_coupling(&self, id: usize) -> Result<&RealMatrix> {
        let node = self.tree.node(id);
        if node.parent.is_none() {
            return Err(Error::invalid("the root has no sibling"));
        }
        let c = self.coupling(node.depth);
        Ok(if self.tree.is_left_child(id) { &c.left } else { &c.right })
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    /// Largest skeleton over all depths.
    pub fn max_rank(&self) -> usize {
        self.generators.iter().map(|g| g.skeleton_size()).max().unwrap_or(0)
    }
}

fn generator_pass(tree: &HssTree, cfg: &HssBuildConfig) -> Result<Vec<LevelGenerator>> {
    let mut out: Vec<LevelGenerator> = Vec::with_capacity(cfg.levels);
    for depth in (1..=cfg.levels).rev() {
        let carried = out.last().map(|g| g.skeleton.as_slice());
        let g = build_level_generator(tree, depth, carried, cfg)?;
        out.push(g);
    }
    out.reverse();
    Ok(out)
}

fn skeleton_indices(start: usize, skeleton: &[usize]) -> Vec<usize> {
    skeleton.iter().map(|&o| start + o).collect()
}

/// Builds the HSS form of `T(spec)` bottom-up, one generator per depth.
pub fn build_hss(spec: &ToeplitzSpec, cfg: &HssBuildConfig) -> Result<HssForm> {
    cfg.validate()?;
    let n = spec.n();
    let tree = build_tree(n, cfg.levels)?;

    let rows = generator_pass(&tree, cfg)?;
    if !spec.is_symmetric() {
        // Column bases come from the same offsets; confirm they coincide.
        let cols = generator_pass(&tree, cfg)?;
        if cols != rows {
            return Err(Error::invalid("row and column generator passes disagree"));
        }
    }

    let mut stats = BuildStats {
        max_expansion: rows.iter().map(|g| g.max_expansion()).fold(0.0, f64::max),
        rank_reductions: rows.iter().filter(|g| g.rank_reduced).count(),
        swaps: rows.iter().map(|g| g.swaps).sum(),
        skeleton_sizes: rows.iter().map(|g| g.skeleton_size()).collect(),
        cauchy_entries: rows
            .iter()
            .filter(|g| g.rank < g.far_count)
            .map(|g| g.far_count * g.scheme.p())
            .sum(),
        ..BuildStats::default()
    };

    let leaf = tree.leaf_size();
    let leaf_req = KernelBlockRequest::ranges(1, leaf, 1, leaf);
    let leaf_block = dense_block(spec, &leaf_req)?;
    stats.d_entries = leaf_req.entries();

    let mut couplings = Vec::with_capacity(cfg.levels);
    for depth in 1..=cfg.levels {
        let sk = &rows[depth - 1].skeleton;
        let at_depth = tree.nodes_at_depth(depth);
        let pair = |k: usize| {
            let a = tree.node(at_depth[2 * k]).range.start;
            let b = tree.node(at_depth[2 * k + 1]).range.start;
            (skeleton_indices(a, sk), skeleton_indices(b, sk))
        };
        let (a, b) = pair(0);
        let left_req = KernelBlockRequest::new(a.clone(), b.clone());
        let right_req = KernelBlockRequest::new(b, a);
        let left = dense_block(spec, &left_req)?;
        let right = dense_block(spec, &right_req)?;
        stats.b_entries += left_req.entries() + right_req.entries();

        let last = at_depth.len() / 2 - 1;
        if last > 0 {
            let (a, b) = pair(last);
            let left_req = KernelBlockRequest::new(a.clone(), b.clone());
            let right_req = KernelBlockRequest::new(b, a);
            if dense_block(spec, &left_req)? != left || dense_block(spec, &right_req)? != right {
                return Err(Error::invalid(alloc::format!(
                    "coupling blocks at depth {depth} differ between sibling pairs"
                )));
            }
            stats.b_check_entries += left_req.entries() + right_req.entries();
        }
        couplings.push(Coupling { left, right });
    }

    Ok(HssForm {
        tree,
        spec: *spec,
        config: *cfg,
        leaf_block,
        generators: rows,
        couplings,
        stats,
    })
}
