use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::{qrcp, RealMatrix, DENSE_LIMIT};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(σ) Vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Nonincreasing, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// `rows × min(rows, cols)`, orthonormal columns.
    pub u: RealMatrix,
    /// `cols × min(rows, cols)`, orthonormal columns.
    pub v: RealMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> RealMatrix {
        let k = self.singular_values.len();
        let us = RealMatrix::from_fn(self.u.rows(), k, |i, j| {
            self.u[(i, j)] * self.singular_values[j]
        });
        super::matmul_nt(&us, &self.v).expect("consistent factor shapes")
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &RealMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    if m * n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            op: "svd",
            entries: m * n,
            limit: DENSE_LIMIT,
        });
    }
    if m == 0 || n == 0 {
        return Ok(SvdResult {
            singular_values: Vec::new(),
            u: RealMatrix::zeros(m, 0),
            v: RealMatrix::zeros(n, 0),
        });
    }
    if !a.all_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if m < n {
        let t = svd_tall(&a.transpose());
        return Ok(SvdResult {
            singular_values: t.singular_values,
            u: t.v,
            v: t.u,
        });
    }
    Ok(svd_tall(a))
}

/// Requires `rows >= cols`.
fn svd_tall(a: &RealMatrix) -> SvdResult {
    let (m, n) = a.shape();
    // Column-major working copies.
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut norms: Vec<f64> = w.iter().map(|c| dot(c, c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (wp, wq) = pair_mut(&mut w, p, q);
                rotate(wp, wq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
                norms[p] = dot(&w[p], &w[p]);
                norms[q] = dot(&w[q], &w[q]);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let smax = sigma[order[0]];
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut singular_values = Vec::with_capacity(n);
    let mut v_out = RealMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let s = sigma[j];
        singular_values.push(s);
        for i in 0..n {
            v_out[(i, k)] = v[j][i];
        }
        if s > smax * f64::EPSILON * (m as f64) && s > 0.0 {
            u_cols.push(w[j].iter().map(|x| x / s).collect());
        } else {
            u_cols.push(orthonormal_complement(&u_cols, m));
        }
    }
    let u = RealMatrix::from_fn(m, n, |i, k| u_cols[k][i]);
    SvdResult {
        singular_values,
        u,
        v: v_out,
    }
}

/// A unit vector orthogonal to all of `basis` (Gram-Schmidt on coordinate
/// vectors, applied twice).
fn orthonormal_complement(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut best = vec![0.0; m];
    let mut best_norm = -1.0;
    for e in 0..m {
        let mut x = vec![0.0; m];
        x[e] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let d = dot(b, &x);
                x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= d * bi);
            }
        }
        let nx = dot(&x, &x).sqrt();
        if nx > best_norm {
            best_norm = nx;
            best = x;
        }
        if nx > 0.5 {
            break;
        }
    }
    best.iter_mut().for_each(|x| *x /= best_norm);
    best
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn rotate(p: &mut [f64], q: &mut [f64], c: f64, s: f64) {
    for (x, y) in p.iter_mut().zip(q.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

fn pair_mut<T>(v: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// Number of singular values `σ_i > tau·σ_1`.
///
/// Large inputs are first reduced with a truncated column-pivoted QR whose
/// discarded trailing block is below `0.1·tau·σ_1`; the rank is then read off
/// the SVD of the retained rows of the triangular factor.
pub fn numerical_rank(a: &RealMatrix, tau: f64) -> Result<usize> {
    if !(tau > 0.0) {
        return Err(Error::invalid("numerical_rank requires tau > 0"));
    }
    let (m, n) = a.shape();
    if m == 0 || n == 0 || a.max_abs() == 0.0 {
        return Ok(0);
    }
    let sigma = if m.min(n) <= 256 {
        svd(a)?.singular_values
    } else {
        let qr = qrcp(a, m.min(n), Some(0.1 * tau))?;
        svd(&qr.r_leading())?.singular_values
    };
    let s1 = sigma[0];
    Ok(sigma.iter().filter(|&&s| s > tau * s1).count())
}
