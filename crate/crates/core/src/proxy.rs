//! Proxy point approximation: replace the column points of a kernel block by
//! `p` quadrature nodes on a circle separating them from the row points.
//!
//! With nodes `z_j = c + ρ_q ω^j` (`ω = e^{2πi/p}`), the trapezoidal rule
//! applied to Cauchy's integral formula gives
//! `k(x, y) ≈ Σ_j (1/p) (c - z_j)/(x - z_j) · k(z_j, y)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{AnalyticKernel, ColumnSide};
use crate::numerics::{frobenius_norm, matmul_nt, ComplexMatrix, RealMatrix};

/// Geometry of one proxy approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyScheme {
    center: Complex64,
    inner_radius: f64,
    outer_radius: f64,
    quad_radius: f64,
    p: usize,
}

impl ProxyScheme {
    /// Scheme with the quadrature circle at the geometric mean `√(Rr)` of
    /// the inner radius `r` and the outer radius `R`.
    pub fn new(center: Complex64, inner_radius: f64, outer_radius: f64, p: usize) -> Result<Self> {
        Self::validate(inner_radius, outer_radius, p)?;
        Ok(ProxyScheme {
            center,
            inner_radius,
            outer_radius,
            quad_radius: (outer_radius * inner_radius).sqrt(),
            p,
        })
    }

    /// Scheme with an explicit quadrature radius, which must exceed the
    /// inner radius. A radius at or beyond `R` is accepted; the kernel's
    /// continuation must then be valid on the whole quadrature disk.
    pub fn with_quadrature_radius(
        center: Complex64,
        inner_radius: f64,
        outer_radius: f64,
        quad_radius: f64,
        p: usize,
    ) -> Result<Self> {
        Self::validate(inner_radius, outer_radius, p)?;
        if !(quad_radius > inner_radius) || !quad_radius.is_finite() {
            return Err(Error::NotSeparated {
                inner: inner_radius,
                outer: quad_radius,
            });
        }
        Ok(ProxyScheme {
            center,
            inner_radius,
            outer_radius,
            quad_radius,
            p,
        })
    }

    fn validate(inner: f64, outer: f64, p: usize) -> Result<()> {
        if p < 4 {
            return Err(Error::InvalidArgument(alloc::format!(
                "need at least 4 proxy points, got {p}"
            )));
        }
        if !(inner > 0.0) || !inner.is_finite() {
            return Err(Error::invalid("inner radius must be positive and finite"));
        }
        if !(outer > inner) || !outer.is_finite() {
            return Err(Error::NotSeparated { inner, outer });
        }
        Ok(())
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn quad_radius(&self) -> f64 {
        self.quad_radius
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Separation ratio `R/r`.
    pub fn rho(&self) -> f64 {
        self.outer_radius / self.inner_radius
    }

    pub fn with_points(&self, p: usize) -> Result<Self> {
        if p < 4 {
            return Err(Error::InvalidArgument(alloc::format!(
                "need at least 4 proxy points, got {p}"
            )));
        }
        Ok(ProxyScheme { p, ..*self })
    }

    /// Offsets `z_j - c = ρ_q ω^j`, `j = 1..=p`.
    pub fn node_offsets(&self) -> Vec<Complex64> {
        let p = self.p as f64;
        (1..=self.p)
            .map(|j| {
                let theta = core::f64::consts::TAU * j as f64 / p;
                Complex64::new(self.quad_radius * theta.cos(), self.quad_radius * theta.sin())
            })
            .collect()
    }
}

/// Scheme for row points `x` and column points `y`: centre at the midpoint
/// of `x`, `r` the half-width of `x` plus ½, `R` the distance from the
/// centre to the nearest `y`.
pub fn make_scheme(x: &[f64], y: &[f64], p: usize) -> Result<ProxyScheme> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("point sets must be nonempty"));
    }
    let (lo, hi) = extent(x);
    let c = (lo + hi) / 2.0;
    let r = x.iter().fold(0.0f64, |m, &v| m.max((v - c).abs())) + 0.5;
    let big_r = y.iter().fold(f64::INFINITY, |m, &v| m.min((v - c).abs()));
    if !(big_r > r) {
        return Err(Error::NotSeparated {
            inner: r,
            outer: big_r,
        });
    }
    ProxyScheme::new(Complex64::new(c, 0.0), r, big_r, p)
}

fn extent(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// The proxy points `c + ρ_q ω^j`, `j = 1..=p`.
pub fn proxy_points(scheme: &ProxyScheme) -> Vec<Complex64> {
    scheme
        .node_offsets()
        .into_iter()
        .map(|w| scheme.center + w)
        .collect()
}

/// Quadrature factor `U_ij = (1/p)(c - z_j)/(x_i - z_j)` from row offsets
/// `x_i - c`. Entries depend on the offsets alone, so translating the rows
/// together with the centre leaves `U` bitwise unchanged.
pub fn cauchy_factor(row_offsets: &[Complex64], scheme: &ProxyScheme) -> ComplexMatrix {
    let w = scheme.node_offsets();
    let p = scheme.p as f64;
    ComplexMatrix::from_fn(row_offsets.len(), w.len(), |i, j| {
        -w[j] / (row_offsets[i] - w[j]) / p
    })
}

/// Separable factors with `U Vᵀ ≈ k(X, Y)`.
#[derive(Debug, Clone)]
pub struct LowRankFactors {
    /// `|X| × p`
    pub u: ComplexMatrix,
    /// `|Y| × p`
    pub v: ComplexMatrix,
    pub scheme: ProxyScheme,
}

impl LowRankFactors {
    pub fn product(&self) -> ComplexMatrix {
        matmul_nt(&self.u, &self.v).expect("factors share the proxy dimension")
    }

    /// Real part of `U Vᵀ`; the imaginary part cancels for real kernels up
    /// to rounding since the proxy points come in conjugate pairs.
    pub fn real_product(&self) -> RealMatrix {
        self.product().real()
    }
}

fn column_side(x: &[f64], y: f64) -> Result<ColumnSide> {
    let (lo, hi) = extent(x);
    if y > hi {
        Ok(ColumnSide::Right)
    } else if y < lo {
        Ok(ColumnSide::Left)
    } else {
        Err(Error::InvalidArgument(alloc::format!(
            "column point {y} lies within the row range [{lo}, {hi}]"
        )))
    }
}

pub fn factors<K: AnalyticKernel + ?Sized>(
    kernel: &K,
    x: &[f64],
    y: &[f64],
    scheme: &ProxyScheme,
) -> Result<LowRankFactors> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("point sets must be nonempty"));
    }
    let c = scheme.center;
    let offsets: Vec<Complex64> = x.iter().map(|&xi| Complex64::new(xi, 0.0) - c).collect();
    if offsets
        .iter()
        .any(|d| (d.norm() - scheme.quad_radius).abs() <= 1e-12 * scheme.quad_radius)
    {
        return Err(Error::invalid("row point on the quadrature circle"));
    }
    let u = cauchy_factor(&offsets, scheme);
    let z = proxy_points(scheme);
    let mut v = ComplexMatrix::zeros(y.len(), z.len());
    for (i, &yi) in y.iter().enumerate() {
        let side = column_side(x, yi)?;
        for (j, &zj) in z.iter().enumerate() {
            v[(i, j)] = kernel.continuation(zj, yi, side)?;
        }
    }
    if !u.all_finite() || !v.all_finite() {
        return Err(Error::NonFinite("proxy factors"));
    }
    Ok(LowRankFactors {
        u,
        v,
        scheme: *scheme,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorNorm {
    FrobeniusAbs,
    FrobeniusRel,
}

impl ErrorNorm {
    pub fn measure(self, exact: &RealMatrix, approx: &RealMatrix) -> Result<f64> {
        let diff = frobenius_norm(&exact.sub(approx)?);
        Ok(match self {
            ErrorNorm::FrobeniusAbs => diff,
            ErrorNorm::FrobeniusRel => {
                let base = frobenius_norm(exact);
                if base == 0.0 {
                    diff
                } else {
                    diff / base
                }
            }
        })
    }
}

/// Result of a successful [`min_p`] search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinP {
    pub p: usize,
    pub error: f64,
}

/// Smallest `p` in `4..=p_max` whose proxy approximation of `k(X, Y)` meets
/// `tol`, using [`make_scheme`] geometry.
pub fn min_p<K: AnalyticKernel + ?Sized>(
    kernel: &K,
    x: &[f64],
    y: &[f64],
    tol: f64,
    norm: ErrorNorm,
    p_max: usize,
) -> Result<MinP> {
    let base = make_scheme(x, y, 4)?;
    min_p_with(kernel, x, y, tol, norm, p_max, |p| base.with_points(p))
}

/// As [`min_p`], with the scheme for each `p` supplied by `scheme_for`.
pub fn min_p_with<K, S>(
    kernel: &K,
    x: &[f64],
    y: &[f64],
    tol: f64,
    norm: ErrorNorm,
    p_max: usize,
    scheme_for: S,
) -> Result<MinP>
where
    K: AnalyticKernel + ?Sized,
    S: Fn(usize) -> Result<ProxyScheme>,
{
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let exact = kernel.dense(x, y)?;
    let mut best = MinP {
        p: 0,
        error: f64::INFINITY,
    };
    for p in 4..=p_max {
        let f = factors(kernel, x, y, &scheme_for(p)?)?;
        let error = norm.measure(&exact, &f.real_product())?;
        if error <= tol {
            return Ok(MinP { p, error });
        }
        if error < best.error {
            best = MinP { p, error };
        }
    }
    Err(Error::NotReached {
        tol,
        p_max,
        best_p: best.p,
        best_error: best.error,
    })
}
