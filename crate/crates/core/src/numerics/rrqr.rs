use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::RealMatrix;
use crate::error::{Error, Result};

/// Truncated Householder QR with column pivoting, `A Π = Q R`.
#[derive(Debug, Clone)]
pub struct ColumnPivotedQr {
    /// Leading `steps` rows of `R`, columns in pivoted order.
    r: RealMatrix,
    /// `perm[j]` is the original column at pivoted position `j`.
    pub perm: Vec<usize>,
    /// Number of Householder steps taken.
    pub steps: usize,
    /// Euclidean norms of the trailing columns (rows `steps..`), in pivoted
    /// order for positions `steps..cols`.
    pub trailing_norms: Vec<f64>,
}

impl ColumnPivotedQr {
    pub fn r_leading(&self) -> RealMatrix {
        self.r.clone()
    }

    pub fn r(&self) -> &RealMatrix {
        &self.r
    }
}

/// Column-major Householder workspace.
struct Workspace {
    m: usize,
    cols: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(a: &RealMatrix, order: &[usize]) -> Self {
        Workspace {
            m: a.rows(),
            cols: order.iter().map(|&j| a.column(j)).collect(),
        }
    }

    fn tail_norm(&self, col: usize, from: usize) -> f64 {
        self.cols[col][from..].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Householder step `j` on column `j`, applied to columns `j+1..`.
    fn reflect(&mut self, j: usize) {
        let m = self.m;
        let norm = self.tail_norm(j, j);
        if norm == 0.0 {
            return;
        }
        let head = self.cols[j][j];
        let alpha = if head >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = self.cols[j][j..m].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            return;
        }
        let scale = 2.0 / vnorm2;
        // Column j goes through the same arithmetic as the rest, so equal
        // columns stay bitwise equal.
        for c in self.cols.iter_mut().skip(j) {
            let d: f64 = c[j..m].iter().zip(&v).map(|(x, y)| x * y).sum();
            let f = scale * d;
            c[j..m].iter_mut().zip(&v).for_each(|(x, y)| *x -= f * y);
        }
        self.cols[j][j + 1..m].iter_mut().for_each(|x| *x = 0.0);
    }

    fn r_rows(&self, k: usize) -> RealMatrix {
        let n = self.cols.len();
        RealMatrix::from_fn(k, n, |i, j| if i <= j { self.cols[j][i] } else { 0.0 })
    }
}

/// Column-pivoted QR of `a`, stopping after `max_steps` steps or, when
/// `stop_rel` is given, as soon as the Frobenius norm of the trailing block
/// drops to `stop_rel·|R₁₁|`. Pivot ties go to the lowest original column.
pub fn qrcp(a: &RealMatrix, max_steps: usize, stop_rel: Option<f64>) -> Result<ColumnPivotedQr> {
    let (m, n) = a.shape();
    let max_steps = max_steps.min(m).min(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut ws = Workspace::new(a, &perm);
    let mut r11 = 0.0;
    let mut steps = 0;
    for j in 0..max_steps {
        let norms: Vec<f64> = (j..n).map(|c| ws.tail_norm(c, j)).collect();
        if let Some(rel) = stop_rel {
            let trailing = norms.iter().map(|x| x * x).sum::<f64>().sqrt();
            if j > 0 && trailing <= rel * r11 {
                break;
            }
        }
        let mut best = 0;
        for (t, &v) in norms.iter().enumerate() {
            let b = norms[best];
            if v > b || (v == b && perm[j + t] < perm[j + best]) {
                best = t;
            }
        }
        if norms[best] == 0.0 {
            break;
        }
        perm.swap(j, j + best);
        ws.cols.swap(j, j + best);
        ws.reflect(j);
        if j == 0 {
            r11 = ws.cols[0][0].abs();
        }
        steps = j + 1;
    }
    let trailing_norms = (steps..n).map(|c| ws.tail_norm(c, steps)).collect();
    Ok(ColumnPivotedQr {
        r: ws.r_rows(steps),
        perm,
        steps,
        trailing_norms,
    })
}

/// Where a row of the input lives in a [`RowInterpolation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSource {
    /// Skeleton row: position in `selected`.
    Selected(usize),
    /// Interpolated row: row of `expansion`.
    Interpolated(usize),
}

/// Row interpolative decomposition `A ≈ Π [I; E] A[selected, :]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowInterpolation {
    /// Skeleton rows, ascending.
    pub selected: Vec<usize>,
    /// Non-skeleton rows, ascending.
    pub remaining: Vec<usize>,
    /// `remaining.len() × selected.len()`; row `t` holds the coefficients of
    /// input row `remaining[t]` on the skeleton rows.
    pub expansion: RealMatrix,
    /// Interchanges performed after the initial pivoted QR.
    pub swaps: usize,
}

impl RowInterpolation {
    pub fn rank(&self) -> usize {
        self.selected.len()
    }

    pub fn rows(&self) -> usize {
        self.selected.len() + self.remaining.len()
    }

    /// Row order of the stacked `[I; E]` block: skeleton rows first.
    pub fn permutation(&self) -> Vec<usize> {
        self.selected.iter().chain(&self.remaining).copied().collect()
    }

    pub fn sources(&self) -> Vec<RowSource> {
        let mut out = vec![RowSource::Selected(0); self.rows()];
        for (s, &i) in self.selected.iter().enumerate() {
            out[i] = RowSource::Selected(s);
        }
        for (t, &i) in self.remaining.iter().enumerate() {
            out[i] = RowSource::Interpolated(t);
        }
        out
    }

    pub fn max_expansion(&self) -> f64 {
        self.expansion.max_abs()
    }

    /// The full `rows × rank` interpolation matrix `Π [I; E]`.
    pub fn interpolation_matrix(&self) -> RealMatrix {
        let k = self.rank();
        let mut p = RealMatrix::zeros(self.rows(), k);
        for (s, &i) in self.selected.iter().enumerate() {
            p[(i, s)] = 1.0;
        }
        for (t, &i) in self.remaining.iter().enumerate() {
            p.row_mut(i).copy_from_slice(self.expansion.row(t));
        }
        p
    }

    /// `Π [I; E] · skeleton_rows`.
    pub fn reconstruct(&self, skeleton_rows: &RealMatrix) -> Result<RealMatrix> {
        super::matmul(&self.interpolation_matrix(), skeleton_rows)
    }
}

/// Row skeletonization by strong rank-revealing QR (Gu–Eisenstat) of `aᵀ`.
///
/// After an initial pivoted QR, columns of `aᵀ` are interchanged while some
/// `|(R₁₁⁻¹R₁₂)_ij|² + (γ_j/ω_i)² > f_bound²`, where `γ_j` are the trailing
/// column norms and `1/ω_i` the row norms of `R₁₁⁻¹`.
pub fn id_rows(a: &RealMatrix, rank: usize, f_bound: f64) -> Result<RowInterpolation> {
    let (rows, cols) = a.shape();
    let max = rows.min(cols);
    if rank == 0 || rank > max {
        return Err(Error::RankOutOfRange {
            requested: rank,
            max,
        });
    }
    if !(f_bound > 1.0) {
        return Err(Error::invalid("id_rows requires f_bound > 1"));
    }
    if !a.all_finite() {
        return Err(Error::NonFinite("id_rows input"));
    }
    let m = a.transpose();
    let n = rows;
    let k = rank;
    let mut perm = qrcp(&m, k, None)?.perm;
    let max_swaps = 64 * n.max(8);
    let mut swaps = 0;
    let bound2 = f_bound * f_bound;

    let x = loop {
        let mut ws = Workspace::new(&m, &perm);
        for j in 0..k {
            ws.reflect(j);
        }
        let diag_max = (0..k).fold(0.0f64, |acc, i| acc.max(ws.cols[i][i].abs()));
        let floor = 64.0 * f64::EPSILON * diag_max;
        if let Some(found) = (0..k).find(|&i| !(ws.cols[i][i].abs() > floor)) {
            return Err(Error::RankDeficient {
                requested: k,
                found,
            });
        }
        let r11 = RealMatrix::from_fn(k, k, |i, j| if i <= j { ws.cols[j][i] } else { 0.0 });
        let r11_inv = upper_triangular_inverse(&r11);
        let r12 = RealMatrix::from_fn(k, n - k, |i, j| ws.cols[k + j][i]);
        let x = solve_upper(&r11, &r12);
        if n == k {
            break x;
        }
        let gamma: Vec<f64> = (k..n).map(|c| ws.tail_norm(c, k)).collect();
        let inv_omega2: Vec<f64> = (0..k)
            .map(|i| r11_inv.row(i).iter().map(|v| v * v).sum())
            .collect();

        let mut best = (0, 0);
        let mut best_val = f64::NEG_INFINITY;
        for i in 0..k {
            for (j, g) in gamma.iter().enumerate() {
                let v = x[(i, j)] * x[(i, j)] + g * g * inv_omega2[i];
                if v > best_val {
                    best_val = v;
                    best = (i, j);
                }
            }
        }
        if !(best_val > bound2) {
            break x;
        }
        swaps += 1;
        if swaps > max_swaps {
            return Err(Error::NoConvergence { iterations: swaps });
        }
        perm.swap(best.0, k + best.1);
    };

    // Reorder to ascending row indices on both sides.
    let mut sel: Vec<(usize, usize)> = perm[..k].iter().copied().enumerate().map(|(s, r)| (r, s)).collect();
    sel.sort_unstable();
    let mut rem: Vec<(usize, usize)> = perm[k..].iter().copied().enumerate().map(|(t, r)| (r, t)).collect();
    rem.sort_unstable();
    let expansion = RealMatrix::from_fn(rem.len(), k, |t, s| x[(sel[s].1, rem[t].1)]);
    Ok(RowInterpolation {
        selected: sel.iter().map(|&(r, _)| r).collect(),
        remaining: rem.iter().map(|&(r, _)| r).collect(),
        expansion,
        swaps,
    })
}

/// `R⁻¹ B` by back substitution.
fn solve_upper(r: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    let k = r.rows();
    let mut x = b.clone();
    for col in 0..b.cols() {
        for i in (0..k).rev() {
            let mut s = x[(i, col)];
            for t in i + 1..k {
                s -= r[(i, t)] * x[(t, col)];
            }
            x[(i, col)] = s / r[(i, i)];
        }
    }
    x
}

fn upper_triangular_inverse(r: &RealMatrix) -> RealMatrix {
    let k = r.rows();
    let mut inv = RealMatrix::zeros(k, k);
    for col in 0..k {
        for i in (0..=col).rev() {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for t in i + 1..=col {
                s -= r[(i, t)] * inv[(t, col)];
            }
            inv[(i, col)] = s / r[(i, i)];
        }
    }
    inv
}
