use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::{svd, DenseMatrix, RealMatrix, Scalar, DENSE_LIMIT, TWO_NORM_SVD_THRESHOLD};
use crate::error::{Error, Result};

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl Extend<f64> for KahanSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn frobenius_norm<T: Scalar>(a: &DenseMatrix<T>) -> f64 {
    let mut acc = KahanSum::new();
    acc.extend(a.as_slice().iter().map(|x| x.magnitude_sqr()));
    acc.value().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConfig {
    pub svd_threshold: usize,
    pub power_tol: f64,
    pub power_max_iter: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig {
            svd_threshold: TWO_NORM_SVD_THRESHOLD,
            power_tol: 1e-10,
            power_max_iter: 10_000,
        }
    }
}

/// Spectral norm. Complex input is handled through the real embedding
/// `[[Re, -Im], [Im, Re]]`, whose singular values are those of `A`, each repeated twice.
pub fn two_norm<T: Scalar>(a: &DenseMatrix<T>) -> Result<f64> {
    two_norm_with(a, &NormConfig::default())
}

pub fn two_norm_with<T: Scalar>(a: &DenseMatrix<T>, cfg: &NormConfig) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let real = real_embedding(a);
    if real.rows().max(real.cols()) <= cfg.svd_threshold && real.rows() * real.cols() <= DENSE_LIMIT
    {
        let s = svd(&real)?;
        return Ok(s.singular_values.first().copied().unwrap_or(0.0));
    }
    power_iteration(&real, cfg)
}

fn real_embedding<T: Scalar>(a: &DenseMatrix<T>) -> RealMatrix {
    if !T::IS_COMPLEX {
        return a.map(|x| x.real_part());
    }
    let (m, n) = a.shape();
    RealMatrix::from_fn(2 * m, 2 * n, |i, j| {
        let z = a[(i % m, j % n)];
        match (i < m, j < n) {
            (true, true) | (false, false) => z.real_part(),
            (true, false) => -z.imag_part(),
            (false, true) => z.imag_part(),
        }
    })
}

fn power_iteration(a: &RealMatrix, cfg: &NormConfig) -> Result<f64> {
    let n = a.cols();
    // Deterministic start with no special alignment to coordinate axes.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 97.0).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    let mut w = vec![0.0; n];
    for it in 1..=cfg.power_max_iter {
        let av = a.mul_vec(&v)?;
        w.copy_from_slice(&a.mul_vec_transposed(&av)?);
        let next = norm2(&w);
        if next == 0.0 {
            return Ok(0.0);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / next;
        }
        if (next - lambda).abs() <= cfg.power_tol * next {
            return Ok(next.sqrt());
        }
        lambda = next;
        if it == cfg.power_max_iter {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.power_max_iter,
    })
}

fn norm2(v: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    acc.extend(v.iter().map(|x| x * x));
    acc.value().sqrt()
}

fn normalize(v: &mut [f64]) {
    let s = norm2(v);
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}
