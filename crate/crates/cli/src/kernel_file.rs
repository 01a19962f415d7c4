//! JSON kernel descriptions: `{"name", "n", "params", "t0", "symmetric"}`.

use std::collections::BTreeMap;
use std::path::Path;

use proxyhss_core::kernels::{Builtin, GeneratingFunction, ToeplitzSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// A Toeplitz matrix generated by one builtin. `symmetric = false` gives the
/// skew matrix `T_{i,j} = sign(j - i) f(|j - i|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "yes")]
    pub symmetric: bool,
}

fn yes() -> bool {
    true
}

impl KernelFile {
    /// Builtin with its usual orientation: `cauchy_scaled` is skew
    /// (`n/(j - i)`), every other builtin symmetric.
    pub fn builtin(name: &str, n: usize) -> CliResult<Self> {
        let kind = Builtin::from_name(name)?;
        Ok(KernelFile {
            name: kind.name().to_string(),
            n,
            params: BTreeMap::new(),
            t0: 0.0,
            symmetric: kind != Builtin::CauchyScaled,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Kernel(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Interprets a `--kernel` argument: inline JSON, a path to a JSON file,
    /// or a builtin name. `n` overrides the size in a description and is
    /// required with a bare name.
    pub fn resolve(arg: &str, n: Option<usize>) -> CliResult<Self> {
        let trimmed = arg.trim_start();
        let mut file = if trimmed.starts_with('{') {
            Self::parse(trimmed)?
        } else if Path::new(arg).is_file() {
            Self::load(Path::new(arg))?
        } else {
            let n = n.ok_or_else(|| CliError::Usage(format!("--n is required with builtin kernel `{arg}`")))?;
            Self::builtin(arg, n)?
        };
        if let Some(n) = n {
            file.n = n;
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("kernel description serializes")
    }

    pub fn function(&self) -> CliResult<GeneratingFunction> {
        let params: Vec<(&str, f64)> = self.params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        Ok(GeneratingFunction::builtin(&self.name, self.n, &params)?)
    }

    /// The matrix; sizes that are not powers of two are accepted for entry
    /// and proxy work but rejected by HSS construction.
    pub fn to_spec(&self) -> CliResult<ToeplitzSpec> {
        let f = self.function()?;
        let minus = if self.symmetric { f } else { f.negated() };
        if self.n.is_power_of_two() && self.n >= 8 {
            Ok(ToeplitzSpec::new(self.n, f, minus, self.t0)?)
        } else {
            Ok(ToeplitzSpec::any_size(self.n, f, minus, self.t0)?)
        }
    }
}
