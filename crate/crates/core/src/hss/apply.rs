use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::form::HssForm;
use crate::error::{Error, Result};
use crate::kernels::{dense_block, KernelBlockRequest};
use crate::numerics::{KahanSum, RealMatrix, DENSE_LIMIT};

const PANEL: usize = 256;

/// `U X` for a node at `depth`, where `X` has one row per skeleton column.
fn expand(form: &HssForm, depth: usize, x: &RealMatrix) -> RealMatrix {
    let y = form.generator(depth).apply(x);
    if depth == form.levels() {
        return y;
    }
    let k = form.generator(depth + 1).skeleton_size();
    let top = expand(form, depth + 1, &y.submatrix(0, 0, k, y.cols()));
    let bottom = expand(form, depth + 1, &y.submatrix(k, 0, k, y.cols()));
    let mut out = RealMatrix::zeros(top.rows() + bottom.rows(), y.cols());
    out.set_block(0, 0, &top);
    out.set_block(top.rows(), 0, &bottom);
    out
}

fn sibling_of(form: &HssForm, id: usize) -> Result<usize> {
    if id >= form.tree().nodes().len() {
        return Err(Error::invalid(alloc::format!("node {id} does not exist")));
    }
    form.tree()
        .node(id)
        .sibling
        .ok_or_else(|| Error::invalid("the root has no sibling"))
}

/// `(U_sib Bᵀ)ᵀ`, the right factor of a node's off-diagonal block row.
fn right_factor(form: &HssForm, id: usize) -> Result<RealMatrix> {
    let depth = form.tree().node(id).depth;
    let b = form.node_coupling(id)?;
    Ok(expand(form, depth, &b.transpose()).transpose())
}

/// Dense `U_j B_j V_sib(j)ᵀ` for a non-root node.
pub fn hss_block_dense(form: &HssForm, id: usize) -> Result<RealMatrix> {
    sibling_of(form, id)?;
    let depth = form.tree().node(id).depth;
    Ok(expand(form, depth, &right_factor(form, id)?))
}

/// Full dense matrix represented by the form.
pub fn hss_to_dense(form: &HssForm) -> Result<RealMatrix> {
    let n = form.n();
    if n * n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            op: "hss_to_dense",
            entries: n * n,
            limit: DENSE_LIMIT,
        });
    }
    let tree = form.tree();
    let mut out = RealMatrix::zeros(n, n);
    for id in tree.leaves() {
        let s = tree.node(id).range.start - 1;
        out.set_block(s, s, form.leaf_block());
    }
    for id in 0..tree.nodes().len() {
        if let Some(sib) = tree.node(id).sibling {
            let block = hss_block_dense(form, id)?;
            out.set_block(tree.node(id).range.start - 1, tree.node(sib).range.start - 1, &block);
        }
    }
    Ok(out)
}

fn column(v: Vec<f64>) -> RealMatrix {
    let k = v.len();
    RealMatrix::from_vec(k, 1, v).expect("column shape")
}

/// `A x` through an upward and a downward sweep over the tree.
pub fn hss_matvec(form: &HssForm, x: &[f64]) -> Result<Vec<f64>> {
    let n = form.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            op: "hss_matvec",
            left: (n, n),
            right: (x.len(), 1),
        });
    }
    let tree = form.tree();
    let levels = form.levels();
    let count = tree.nodes().len();

    // Upward: skeleton coefficients of x restricted to each node.
    let mut up: Vec<Vec<f64>> = vec![Vec::new(); count];
    for id in 0..count {
        let node = tree.node(id);
        if node.depth == 0 {
            continue;
        }
        let local = match node.children {
            None => x[node.range.start - 1..node.range.end].to_vec(),
            Some([a, b]) => up[a].iter().chain(&up[b]).copied().collect(),
        };
        up[id] = form.generator(node.depth).apply_transpose(&column(local)).into_vec();
    }

    // Downward: accumulated incoming coefficients per node.
    let mut down: Vec<Vec<f64>> = vec![Vec::new(); count];
    let mut y = vec![0.0; n];
    for id in (0..count).rev() {
        let node = tree.node(id);
        let Some(sib) = node.sibling else { continue };
        let mut acc = form.node_coupling(id)?.mul_vec(&up[sib])?;
        if let Some(parent) = node.parent.filter(|&q| tree.node(q).depth > 0) {
            let k = acc.len();
            let offset = if tree.is_left_child(id) { 0 } else { k };
            for (a, &v) in acc.iter_mut().zip(&down[parent][offset..offset + k]) {
                *a += v;
            }
        }
        let expanded = form.generator(node.depth).apply(&column(acc)).into_vec();
        if node.depth == levels {
            let range = node.range.start - 1..node.range.end;
            let d = form.leaf_block().mul_vec(&x[range.clone()])?;
            for ((o, e), dv) in y[range].iter_mut().zip(expanded).zip(d) {
                *o = e + dv;
            }
        } else {
            down[id] = expanded;
        }
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockError {
    /// Frobenius norm of the difference.
    pub abs: f64,
    /// Frobenius norm of the exact block.
    pub reference_norm: f64,
    pub rel: f64,
}

/// Error of the off-diagonal block of the first node at `depth` that is a
/// first child (`left`) or second child, measured against kernel entries in
/// column panels.
pub fn block_error(form: &HssForm, depth: usize, left: bool) -> Result<BlockError> {
    if depth == 0 || depth > form.levels() {
        return Err(Error::invalid(alloc::format!(
            "depth must lie in 1..={}, got {depth}",
            form.levels()
        )));
    }
    let tree = form.tree();
    let id = *tree
        .nodes_at_depth(depth)
        .iter()
        .find(|&&j| tree.is_left_child(j) == left)
        .expect("both orientations exist below the root");
    let sib = sibling_of(form, id)?;
    let rows = tree.node(id).range;
    let cols = tree.node(sib).range;
    let factor = right_factor(form, id)?;

    let mut diff = KahanSum::new();
    let mut reference = KahanSum::new();
    let mut c0 = 0;
    while c0 < cols.len() {
        let w = PANEL.min(cols.len() - c0);
        let approx = expand(form, depth, &factor.submatrix(0, c0, factor.rows(), w));
        let first = cols.start + c0;
        let exact = dense_block(
            form.spec(),
            &KernelBlockRequest::ranges(rows.start, rows.end, first, first + w - 1),
        )?;
        for (&a, &e) in approx.as_slice().iter().zip(exact.as_slice()) {
            diff.add((a - e) * (a - e));
            reference.add(e * e);
        }
        c0 += w;
    }
    let abs = diff.value().sqrt();
    let reference_norm = reference.value().sqrt();
    let rel = if reference_norm > 0.0 { abs / reference_norm } else { abs };
    Ok(BlockError {
        abs,
        reference_norm,
        rel,
    })
}

