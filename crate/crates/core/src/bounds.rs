//! A priori error bounds for proxy point approximations.

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{AnalyticKernel, ColumnSide, GeneratingFunction};
use crate::proxy::ProxyScheme;

/// Boundary samples used for maxima over circles.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 512;

/// Replaces `α(2) ≈ 12.57` in the per-level bound.
const LEVEL_ALPHA: f64 = 14.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Termwise,
    MatrixAbs,
    MatrixRel,
    Growth,
    Level,
    HssBlock,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Termwise => "termwise",
            BoundKind::MatrixAbs => "matrix_abs",
            BoundKind::MatrixRel => "matrix_rel",
            BoundKind::Growth => "growth",
            BoundKind::Level => "level",
            BoundKind::HssBlock => "hss_block",
        }
    }
}

/// Inputs echoed into a [`BoundReport`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundInputs {
    pub n: Option<usize>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub height: Option<usize>,
    pub samples: Option<usize>,
    /// Radius of the circle on which the kernel maximum was sampled.
    pub boundary_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub p: Option<usize>,
    pub f_max_on_boundary: Option<f64>,
    pub inputs: BoundInputs,
}

impl BoundReport {
    fn new(kind: BoundKind, value: f64) -> Self {
        BoundReport {
            kind,
            value,
            alpha: None,
            beta: None,
            rho: None,
            p: None,
            f_max_on_boundary: None,
            inputs: BoundInputs::default(),
        }
    }
}

/// `α(ρ) = 2ρ^{1/4} / (ρ^{1/4} - 1)`.
pub fn alpha(rho: f64) -> f64 {
    let q = rho.powf(0.25);
    2.0 * q / (q - 1.0)
}

/// `β(ρ) = 2ρ^{3/4} (1 + ρ^{-2}) / (1 - ρ^{-1/4})²`.
pub fn beta(rho: f64) -> f64 {
    let t = 1.0 - rho.powf(-0.25);
    2.0 * rho.powf(0.75) * (1.0 + rho.powi(-2)) / (t * t)
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 1.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!(
            "separation ratio must exceed 1, got {rho}"
        )))
    }
}

/// `ρ^{p/4} - 1`.
fn decay_denominator(rho: f64, p: usize) -> f64 {
    rho.powf(p as f64 / 4.0) - 1.0
}

fn circle_point(center: Complex64, radius: f64, m: usize, samples: usize) -> Complex64 {
    let theta = core::f64::consts::TAU * m as f64 / samples as f64;
    center + Complex64::new(radius * theta.cos(), radius * theta.sin())
}

/// Radius `r ρ^{3/4}` of the disk whose boundary controls the bound.
pub fn boundary_radius(scheme: &ProxyScheme) -> f64 {
    scheme.inner_radius() * scheme.rho().powf(0.75)
}

/// `max |k(z, y)|` over `y ∈ Y` and `samples` points `z` on the circle of
/// radius `r ρ^{3/4}` about the scheme centre.
pub fn boundary_max<K: AnalyticKernel + ?Sized>(
    kernel: &K,
    y: &[f64],
    scheme: &ProxyScheme,
    samples: usize,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("boundary sampling needs at least one point"));
    }
    let c = scheme.center();
    let radius = boundary_radius(scheme);
    let mut best = 0.0f64;
    for &yi in y {
        if (Complex64::new(yi, 0.0) - c).norm() <= radius {
            return Err(Error::InvalidArgument(alloc::format!(
                "column point {yi} inside the bounding disk"
            )));
        }
        let side = if yi > c.re {
            ColumnSide::Right
        } else {
            ColumnSide::Left
        };
        for m in 0..samples {
            let v = kernel.continuation(circle_point(c, radius, m, samples), yi, side)?;
            best = best.max(v.norm());
        }
    }
    Ok(best)
}

/// Bound on `|k(x, y) - (U Vᵀ)_{xy}|` for every row point inside the inner
/// radius and every `y ∈ Y`.
pub fn termwise_bound<K: AnalyticKernel + ?Sized>(
    kernel: &K,
    y: &[f64],
    scheme: &ProxyScheme,
    samples: usize,
) -> Result<BoundReport> {
    let rho = scheme.rho();
    let a = alpha(rho);
    let fmax = boundary_max(kernel, y, scheme, samples)?;
    let mut r = BoundReport::new(BoundKind::Termwise, a * fmax / decay_denominator(rho, scheme.p()));
    r.alpha = Some(a);
    r.rho = Some(rho);
    r.p = Some(scheme.p());
    r.f_max_on_boundary = Some(fmax);
    r.inputs.cols = Some(y.len());
    r.inputs.samples = Some(samples);
    r.inputs.boundary_radius = Some(boundary_radius(scheme));
    Ok(r)
}

/// `|X|·|Y|` times the termwise bound; dominates the spectral and Frobenius
/// errors of the block.
pub fn matrix_bound_abs<K: AnalyticKernel + ?Sized>(
    kernel: &K,
    x: &[f64],
    y: &[f64],
    scheme: &ProxyScheme,
    samples: usize,
) -> Result<BoundReport> {
    let mut r = termwise_bound(kernel, y, scheme, samples)?;
    r.kind = BoundKind::MatrixAbs;
    r.value *= (x.len() * y.len()) as f64;
    r.inputs.rows = Some(x.len());
    Ok(r)
}

/// Relative spectral bound `l m α (1 + β) / (ρ^{p/4} - 1)` for kernels of
/// univalent functions; `l ≥ 2` row points are required.
pub fn matrix_bound_rel(l: usize, m: usize, rho: f64, p: usize) -> Result<BoundReport> {
    if l < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "relative bound needs at least 2 row points, got {l}"
        )));
    }
    check_rho(rho)?;
    let a = alpha(rho);
    let b = beta(rho);
    let mut r = BoundReport::new(
        BoundKind::MatrixRel,
        (l * m) as f64 * a * (1.0 + b) / decay_denominator(rho, p),
    );
    r.alpha = Some(a);
    r.beta = Some(b);
    r.rho = Some(rho);
    r.p = Some(p);
    r.inputs.rows = Some(l);
    r.inputs.cols = Some(m);
    Ok(r)
}

/// `(n/2)³ |f'(n/2)| + |f(n/2)|`, a bound for `|f|` on `B(n/2, n/2)` when
/// `f` is univalent there.
pub fn growth_bound(f: &GeneratingFunction, n: usize) -> Result<BoundReport> {
    let h = n as f64 / 2.0;
    let z = Complex64::new(h, 0.0);
    let (fv, dv) = (f.eval(z), f.deriv(z));
    if !(fv.norm().is_finite() && dv.norm().is_finite()) {
        return Err(Error::NonFinite(f.name()));
    }
    let mut r = BoundReport::new(BoundKind::Growth, h * h * h * dv.norm() + fv.norm());
    r.inputs.n = Some(n);
    Ok(r)
}

/// Scheme of the per-level bound for a node of `2^{height+2}` points:
/// inner radius `2^height`, outer radius twice that, centre 0.
pub fn level_scheme(height: usize, p: usize) -> Result<ProxyScheme> {
    let r = (1u64 << height) as f64;
    ProxyScheme::new(Complex64::new(0.0, 0.0), r, 2.0 * r, p)
}

/// Entrywise bound `14 max |f(y - z)| / (2^{p/4} - 1)` for the far-field
/// rows of any node at `height` against all columns outside the node. The
/// maximum runs over `z` on the circle of radius `2^{height + 3/4}` about
/// the node centre and over every column offset realised by some node of
/// that height.
pub fn level_termwise_bound(
    f: &GeneratingFunction,
    n: usize,
    height: usize,
    p: usize,
    samples: usize,
) -> Result<BoundReport> {
    let size = 1usize
        .checked_shl(height as u32 + 2)
        .filter(|&s| s <= n / 2)
        .ok_or_else(|| {
            Error::InvalidArgument(alloc::format!("height {height} too large for n = {n}"))
        })?;
    if samples == 0 {
        return Err(Error::invalid("boundary sampling needs at least one point"));
    }
    let scheme = level_scheme(height, p)?;
    let radius = boundary_radius(&scheme);
    let half = size as f64 / 2.0;
    let mut fmax = 0.0f64;
    // Column offsets from the node centre: k + ½ for k in size/2 ..= n - size/2 - 1.
    let mut d = half + 0.5;
    while d <= n as f64 - half - 0.5 {
        for m in 0..samples {
            let arg = Complex64::new(d, 0.0) - circle_point(Complex64::new(0.0, 0.0), radius, m, samples);
            if let Some(disk) = f.analytic_disk() {
                if !disk.contains(arg) {
                    return Err(Error::OutsideAnalyticDomain {
                        name: f.name(),
                        re: arg.re,
                        im: arg.im,
                    });
                }
            }
            fmax = fmax.max(f.eval(arg).norm());
        }
        d += 1.0;
    }
    let mut r = BoundReport::new(
        BoundKind::Level,
        LEVEL_ALPHA * fmax / decay_denominator(2.0, p),
    );
    r.alpha = Some(LEVEL_ALPHA);
    r.rho = Some(2.0);
    r.p = Some(p);
    r.f_max_on_boundary = Some(fmax);
    r.inputs.n = Some(n);
    r.inputs.height = Some(height);
    r.inputs.samples = Some(samples);
    r.inputs.boundary_radius = Some(radius);
    Ok(r)
}

/// Frobenius bound `(7n² / (2^{p/4+1} - 2)) ((n³/8) |f'(n/2)| + |f(n/2)|)` on
/// the far-field proxy approximation of any HSS block row.
pub fn hss_block_bound(f: &GeneratingFunction, n: usize, p: usize) -> Result<BoundReport> {
    let growth = growth_bound(f, n)?.value;
    let nf = n as f64;
    let denom = 2f64.powf(p as f64 / 4.0 + 1.0) - 2.0;
    let mut r = BoundReport::new(BoundKind::HssBlock, 7.0 * nf * nf / denom * growth);
    r.rho = Some(2.0);
    r.p = Some(p);
    r.inputs.n = Some(n);
    Ok(r)
}
