use alloc::string::ToString;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const BUILTIN_NAMES: &str = "cos_quarter, cos_over_n, shifted_square, cauchy_scaled, bmb_entropy";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `cos(πz/4)`
    CosQuarter,
    /// `cos(πz/n)`
    CosOverN,
    /// `(z - n/2)²`
    ShiftedSquare,
    /// `n/z`
    CauchyScaled,
    /// `(1-z) log((z-1)/z) + (z+1) log(z/(z+1))`, principal branches.
    BmbEntropy,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::CosQuarter,
        Builtin::CosOverN,
        Builtin::ShiftedSquare,
        Builtin::CauchyScaled,
        Builtin::BmbEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::CosQuarter => "cos_quarter",
            Builtin::CosOverN => "cos_over_n",
            Builtin::ShiftedSquare => "shifted_square",
            Builtin::CauchyScaled => "cauchy_scaled",
            Builtin::BmbEntropy => "bmb_entropy",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::UnknownBuiltin {
                name: name.to_string(),
                builtins: BUILTIN_NAMES,
            })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Open disk in the complex plane centred on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

/// An analytic function with exact derivative, parametrised by the matrix
/// size `n` and an overall real scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingFunction {
    kind: Builtin,
    n: usize,
    scale: f64,
}

impl GeneratingFunction {
    /// Looks up a builtin. The only recognised parameter is `scale`
    /// (default 1), which multiplies the function.
    pub fn builtin(name: &str, n: usize, params: &[(&str, f64)]) -> Result<Self> {
        let kind = Builtin::from_name(name)?;
        let mut f = Self::new(kind, n);
        for &(key, value) in params {
            match key {
                "scale" if value.is_finite() => f.scale = value,
                "scale" => return Err(Error::invalid("scale must be finite")),
                other => {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "unknown parameter `{other}` for {name}"
                    )))
                }
            }
        }
        Ok(f)
    }

    pub fn new(kind: Builtin, n: usize) -> Self {
        GeneratingFunction {
            kind,
            n,
            scale: 1.0,
        }
    }

    pub fn kind(&self) -> Builtin {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scaled(self, factor: f64) -> Self {
        GeneratingFunction {
            scale: self.scale * factor,
            ..self
        }
    }

    pub fn negated(self) -> Self {
        self.scaled(-1.0)
    }

    /// Disk on which the function is analytic, or `None` when it is entire.
    pub fn analytic_disk(&self) -> Option<Disk> {
        let n = self.n as f64;
        match self.kind {
            Builtin::CosQuarter | Builtin::CosOverN | Builtin::ShiftedSquare => None,
            Builtin::CauchyScaled => Some(Disk {
                center: n / 2.0,
                radius: n / 2.0,
            }),
            // Branch cuts run along [-1, 1].
            Builtin::BmbEntropy => Some(Disk {
                center: (n + 1.0) / 2.0,
                radius: (n - 1.0) / 2.0,
            }),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let n = self.n as f64;
        let v = match self.kind {
            Builtin::CosQuarter => (z * (core::f64::consts::PI / 4.0)).cos(),
            Builtin::CosOverN => (z * (core::f64::consts::PI / n)).cos(),
            Builtin::ShiftedSquare => {
                let w = z - n / 2.0;
                w * w
            }
            Builtin::CauchyScaled => Complex64::new(n, 0.0) / z,
            Builtin::BmbEntropy => bmb(z),
        };
        v * self.scale
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let n = self.n as f64;
        let v = match self.kind {
            Builtin::CosQuarter => {
                let a = core::f64::consts::PI / 4.0;
                -(z * a).sin() * a
            }
            Builtin::CosOverN => {
                let a = core::f64::consts::PI / n;
                -(z * a).sin() * a
            }
            Builtin::ShiftedSquare => (z - n / 2.0) * 2.0,
            Builtin::CauchyScaled => -Complex64::new(n, 0.0) / (z * z),
            Builtin::BmbEntropy => bmb_deriv(z),
        };
        v * self.scale
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }
}

/// Beyond this modulus the closed forms lose accuracy to cancellation and the
/// expansions in `1/z` are used instead.
const BMB_SERIES_RADIUS: f64 = 4.0;

fn bmb(z: Complex64) -> Complex64 {
    if z.norm() >= BMB_SERIES_RADIUS {
        // -2 Σ_{k odd} z^{-k} / (k (k + 1))
        let u = z.inv();
        let u2 = u * u;
        let mut term = u;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..40 {
            let k = (2 * m + 1) as f64;
            acc += term * (2.0 / (k * (k + 1.0)));
            term *= u2;
        }
        return -acc;
    }
    let one = Complex64::new(1.0, 0.0);
    let tail = (z + 1.0) * (z / (z + 1.0)).ln();
    if z == one {
        // (1 - z) log(z - 1) -> 0
        return tail;
    }
    (one - z) * ((z - 1.0) / z).ln() + tail
}

fn bmb_deriv(z: Complex64) -> Complex64 {
    if z.norm() >= BMB_SERIES_RADIUS {
        // -log(1 - z^{-2}) = Σ_{m≥1} z^{-2m} / m
        let u2 = z.inv() * z.inv();
        let mut term = u2;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 1..40 {
            acc += term / m as f64;
            term *= u2;
        }
        return acc;
    }
    (z / (z + 1.0)).ln() - ((z - 1.0) / z).ln()
}
