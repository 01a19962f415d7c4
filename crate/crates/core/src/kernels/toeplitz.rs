use alloc::vec::Vec;

use num_complex::Complex64;

use super::GeneratingFunction;
use crate::error::{Error, Result};
use crate::numerics::RealMatrix;

/// Toeplitz matrix `T_{i,j} = t_{j-i}` with `t_k = f_plus(k)` for `k > 0`,
/// `t_{-k} = f_minus(k)` for `k > 0` and diagonal `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzSpec {
    n: usize,
    pub f_plus: GeneratingFunction,
    pub f_minus: GeneratingFunction,
    pub t0: f64,
}

impl ToeplitzSpec {
    pub fn new(
        n: usize,
        f_plus: GeneratingFunction,
        f_minus: GeneratingFunction,
        t0: f64,
    ) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(alloc::format!(
                "matrix size {n} must be a power of two >= 8"
            )));
        }
        Self::any_size(n, f_plus, f_minus, t0)
    }

    /// Like [`ToeplitzSpec::new`] without the power-of-two requirement, for
    /// entry and block evaluation only. HSS construction rejects such specs.
    pub fn any_size(
        n: usize,
        f_plus: GeneratingFunction,
        f_minus: GeneratingFunction,
        t0: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix size must be positive"));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("t0 must be finite"));
        }
        Ok(ToeplitzSpec {
            n,
            f_plus,
            f_minus,
            t0,
        })
    }

    /// `T_{i,j} = f(|j - i|)`.
    pub fn symmetric(f: GeneratingFunction, t0: f64) -> Result<Self> {
        Self::new(f.n(), f, f, t0)
    }

    /// `T_{i,j} = sign(j - i) f(|j - i|)`.
    pub fn skew(f: GeneratingFunction, t0: f64) -> Result<Self> {
        Self::new(f.n(), f, f.negated(), t0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.f_plus == self.f_minus
    }

    /// Entry for a signed index difference `d = j - i`.
    pub fn coefficient(&self, d: i64) -> Result<f64> {
        if d == 0 {
            return Ok(self.t0);
        }
        let (f, arg) = if d > 0 {
            (&self.f_plus, d as f64)
        } else {
            (&self.f_minus, -d as f64)
        };
        real_value(f, arg)
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(Error::IndexOutOfRange { i, j, n: self.n });
        }
        Ok(())
    }
}

fn real_value(f: &GeneratingFunction, arg: f64) -> Result<f64> {
    let v = f.eval_real(arg);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonFinite(f.name()));
    }
    if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
        return Err(Error::ComplexResidue {
            name: f.name(),
            arg,
            residue: v.im,
        });
    }
    Ok(v.re)
}

/// `T_{i,j}` for 1-based `i, j`.
pub fn toeplitz_entry(spec: &ToeplitzSpec, i: usize, j: usize) -> Result<f64> {
    spec.check(i, j)?;
    spec.coefficient(j as i64 - i as i64)
}

/// Ordered 1-based row and column index sets of a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBlockRequest {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl KernelBlockRequest {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        KernelBlockRequest { rows, cols }
    }

    /// Contiguous block `[r0, r1] × [c0, c1]`, inclusive and 1-based.
    pub fn ranges(r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        KernelBlockRequest {
            rows: (r0..=r1).collect(),
            cols: (c0..=c1).collect(),
        }
    }

    pub fn entries(&self) -> usize {
        self.rows.len() * self.cols.len()
    }
}

/// Dense `T[rows, cols]`. Each distinct index difference is evaluated once
/// when that is cheaper than evaluating every entry.
pub fn dense_block(spec: &ToeplitzSpec, req: &KernelBlockRequest) -> Result<RealMatrix> {
    let (rows, cols) = (&req.rows, &req.cols);
    for &i in rows {
        spec.check(i, 1)?;
    }
    for &j in cols {
        spec.check(1, j)?;
    }
    if rows.is_empty() || cols.is_empty() {
        return Ok(RealMatrix::zeros(rows.len(), cols.len()));
    }
    let rmin = *rows.iter().min().unwrap() as i64;
    let rmax = *rows.iter().max().unwrap() as i64;
    let cmin = *cols.iter().min().unwrap() as i64;
    let cmax = *cols.iter().max().unwrap() as i64;
    let (dmin, dmax) = (cmin - rmax, cmax - rmin);
    let span = (dmax - dmin + 1) as usize;
    if span <= req.entries() {
        let table = (dmin..=dmax)
            .map(|d| spec.coefficient(d))
            .collect::<Result<Vec<f64>>>()?;
        Ok(RealMatrix::from_fn(rows.len(), cols.len(), |a, b| {
            table[(cols[b] as i64 - rows[a] as i64 - dmin) as usize]
        }))
    } else {
        let mut data = Vec::with_capacity(req.entries());
        for &i in rows {
            for &j in cols {
                data.push(spec.coefficient(j as i64 - i as i64)?);
            }
        }
        RealMatrix::from_vec(rows.len(), cols.len(), data)
    }
}

/// Position of a column index relative to the rows of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnSide {
    /// Column index larger than every row index.
    Right,
    /// Column index smaller than every row index.
    Left,
}

/// Analytic continuation `z ↦ T(z, y)` in the row variable.
pub fn eval_analytic(spec: &ToeplitzSpec, z: Complex64, y: f64, side: ColumnSide) -> Result<Complex64> {
    let (f, arg) = match side {
        ColumnSide::Right => (&spec.f_plus, Complex64::new(y, 0.0) - z),
        ColumnSide::Left => (&spec.f_minus, z - y),
    };
    if let Some(disk) = f.analytic_disk() {
        if !disk.contains(arg) {
            return Err(Error::OutsideAnalyticDomain {
                name: f.name(),
                re: arg.re,
                im: arg.im,
            });
        }
    }
    let v = f.eval(arg);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NonFinite(f.name()));
    }
    Ok(v)
}

/// A kernel `k(x, y)` on real points that continues analytically in `x`
/// away from the column points.
pub trait AnalyticKernel {
    fn entry(&self, x: f64, y: f64) -> Result<f64>;

    fn continuation(&self, z: Complex64, y: f64, side: ColumnSide) -> Result<Complex64>;

    /// Dense `k(x_i, y_j)`.
    fn dense(&self, x: &[f64], y: &[f64]) -> Result<RealMatrix> {
        let mut data = Vec::with_capacity(x.len() * y.len());
        for &xi in x {
            for &yj in y {
                data.push(self.entry(xi, yj)?);
            }
        }
        RealMatrix::from_vec(x.len(), y.len(), data)
    }
}

impl AnalyticKernel for ToeplitzSpec {
    fn entry(&self, x: f64, y: f64) -> Result<f64> {
        if x == y {
            Ok(self.t0)
        } else if y > x {
            real_value(&self.f_plus, y - x)
        } else {
            real_value(&self.f_minus, x - y)
        }
    }

    fn continuation(&self, z: Complex64, y: f64, side: ColumnSide) -> Result<Complex64> {
        eval_analytic(self, z, y, side)
    }
}

/// `k(x, y) = value` everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantKernel(pub f64);

impl AnalyticKernel for ConstantKernel {
    fn entry(&self, _x: f64, _y: f64) -> Result<f64> {
        Ok(self.0)
    }

    fn continuation(&self, _z: Complex64, _y: f64, _side: ColumnSide) -> Result<Complex64> {
        Ok(Complex64::new(self.0, 0.0))
    }
}
