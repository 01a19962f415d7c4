use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Inclusive 1-based index range `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
}

impl IndexRange {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start == 0 || end < start {
            return Err(Error::InvalidArgument(alloc::format!(
                "invalid index range [{start}, {end}]"
            )));
        }
        Ok(IndexRange { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i <= self.end
    }

    /// Midpoint `(start + end) / 2`.
    pub fn center(&self) -> f64 {
        (self.start as f64 + self.end as f64) / 2.0
    }

    pub fn iter(&self) -> core::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HssNode {
    pub range: IndexRange,
    /// Root has depth 0.
    pub depth: usize,
    /// Leaves have height 0.
    pub height: usize,
    pub parent: Option<usize>,
    pub children: Option<[usize; 2]>,
    pub sibling: Option<usize>,
}

impl HssNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// True for the first child of its parent.
    pub fn is_left_child(&self, tree: &HssTree) -> bool {
        self.parent
            .and_then(|p| tree.nodes[p].children)
            .is_some_and(|c| tree.nodes[c[0]].range == self.range)
    }
}

/// Perfect binary tree over `[1, n]` with nodes in postorder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HssTree {
    n: usize,
    levels: usize,
    nodes: Vec<HssNode>,
}

impl HssTree {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn nodes(&self) -> &[HssNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &HssNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn leaf_size(&self) -> usize {
        self.n >> self.levels
    }

    pub fn node_size(&self, depth: usize) -> usize {
        self.n >> depth
    }

    /// Node ids at `depth`, left to right.
    pub fn nodes_at_depth(&self, depth: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.nodes.len())
            .filter(|&j| self.nodes[j].depth == depth)
            .collect();
        ids.sort_by_key(|&j| self.nodes[j].range.start);
        ids
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.nodes_at_depth(self.levels)
    }

    pub fn is_left_child(&self, id: usize) -> bool {
        self.nodes[id].is_left_child(self)
    }
}

/// Tree with `levels` levels below the root over `[1, n]`.
pub fn build_tree(n: usize, levels: usize) -> Result<HssTree> {
    if n <= 8 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(alloc::format!(
            "matrix size {n} must be a power of two greater than 8"
        )));
    }
    let max_levels = n.trailing_zeros() as usize - 2;
    if levels == 0 || levels > max_levels {
        return Err(Error::InvalidArgument(alloc::format!(
            "levels must lie in 1..={max_levels} for n = {n}, got {levels}"
        )));
    }
    let mut nodes = Vec::with_capacity((2usize << levels) - 1);
    push_subtree(&mut nodes, IndexRange { start: 1, end: n }, 0, levels);
    Ok(HssTree { n, levels, nodes })
}

fn push_subtree(nodes: &mut Vec<HssNode>, range: IndexRange, depth: usize, levels: usize) -> usize {
    let children = if depth < levels {
        let mid = range.start + range.len() / 2;
        let a = push_subtree(nodes, IndexRange { start: range.start, end: mid - 1 }, depth + 1, levels);
        let b = push_subtree(nodes, IndexRange { start: mid, end: range.end }, depth + 1, levels);
        Some([a, b])
    } else {
        None
    };
    let id = nodes.len();
    nodes.push(HssNode {
        range,
        depth,
        height: levels - depth,
        parent: None,
        children,
        sibling: None,
    });
    if let Some([a, b]) = children {
        nodes[a].parent = Some(id);
        nodes[b].parent = Some(id);
        nodes[a].sibling = Some(b);
        nodes[b].sibling = Some(a);
    }
    id
}

/// Near field (first and last quarters) and far field (middle half) of a
/// node range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIndexSplit {
    pub near: Vec<usize>,
    pub far: Vec<usize>,
}

pub fn split_near_far(range: IndexRange) -> Result<NodeIndexSplit> {
    let len = range.len();
    if len % 4 != 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "range length {len} is not divisible by 4"
        )));
    }
    let q = len / 4;
    let (mut near, mut far) = (Vec::with_capacity(2 * q), Vec::with_capacity(2 * q));
    for (off, i) in range.iter().enumerate() {
        if off < q || off >= 3 * q {
            near.push(i);
        } else {
            far.push(i);
        }
    }
    Ok(NodeIndexSplit { near, far })
}
