//! Binary container for HSS forms.
//!
//! Layout (little endian): 8-byte magic, `u32` version, header
//! `{n, L, r, p, f_bound}` followed by a length-prefixed JSON echo of the
//! matrix, then the leaf block, one generator and one coupling pair per
//! depth, and the build statistics. Floats are stored as raw bits, so a
//! save/load round trip is bit-identical.

use std::path::Path;

use proxyhss_core::hss::{BuildStats, Coupling, GeneratorRow, HssBuildConfig, HssForm, LevelGenerator};
use proxyhss_core::kernels::{Builtin, GeneratingFunction, ToeplitzSpec};
use proxyhss_core::numerics::RealMatrix;
use proxyhss_core::proxy::ProxyScheme;
use proxyhss_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MAGIC: [u8; 8] = *b"PXHSS\r\n\x1a";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FunctionEcho {
    name: String,
    n: usize,
    scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpecEcho {
    n: usize,
    t0: f64,
    f_plus: FunctionEcho,
    f_minus: FunctionEcho,
}

impl FunctionEcho {
    fn of(f: &GeneratingFunction) -> Self {
        FunctionEcho {
            name: f.name().to_string(),
            n: f.n(),
            scale: f.scale(),
        }
    }

    fn function(&self) -> CliResult<GeneratingFunction> {
        Ok(GeneratingFunction::new(Builtin::from_name(&self.name)?, self.n).scaled(self.scale))
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn bytes(&mut self, b: &[u8]) {
        self.usize(b.len());
        self.0.extend_from_slice(b);
    }
    fn indices(&mut self, v: &[usize]) {
        self.usize(v.len());
        for &x in v {
            self.usize(x);
        }
    }
    fn matrix(&mut self, m: &RealMatrix) {
        self.usize(m.rows());
        self.usize(m.cols());
        for &x in m.as_slice() {
            self.f64(x);
        }
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

fn corrupt(msg: impl Into<String>) -> CliError {
    CliError::Container(msg.into())
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> CliResult<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| corrupt("truncated file"))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> CliResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> CliResult<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> CliResult<usize> {
        usize::try_from(self.u64()?).map_err(|_| corrupt("size out of range"))
    }
    fn f64(&mut self) -> CliResult<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    /// Length prefix checked against the bytes left, assuming `unit` bytes
    /// per element.
    fn len(&mut self, unit: usize) -> CliResult<usize> {
        let k = self.usize()?;
        if k.checked_mul(unit).map_or(true, |b| b > self.data.len() - self.pos) {
            return Err(corrupt("length prefix exceeds file size"));
        }
        Ok(k)
    }
    fn bytes(&mut self) -> CliResult<&'a [u8]> {
        let k = self.len(1)?;
        self.take(k)
    }
    fn indices(&mut self) -> CliResult<Vec<usize>> {
        let k = self.len(8)?;
        (0..k).map(|_| self.usize()).collect()
    }
    fn matrix(&mut self) -> CliResult<RealMatrix> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let count = rows.checked_mul(cols).ok_or_else(|| corrupt("matrix too large"))?;
        if count.checked_mul(8).map_or(true, |b| b > self.data.len() - self.pos) {
            return Err(corrupt("matrix exceeds file size"));
        }
        let data = (0..count).map(|_| self.f64()).collect::<CliResult<Vec<f64>>>()?;
        Ok(RealMatrix::from_vec(rows, cols, data)?)
    }
}

fn write_generator(w: &mut Writer, g: &LevelGenerator) {
    w.usize(g.depth);
    w.usize(g.node_size);
    w.indices(&g.candidates);
    w.indices(&g.skeleton);
    w.usize(g.rows.len());
    for row in &g.rows {
        match *row {
            GeneratorRow::Skeleton(c) => {
                w.0.push(0);
                w.usize(c);
            }
            GeneratorRow::Interpolated(t) => {
                w.0.push(1);
                w.usize(t);
            }
        }
    }
    w.matrix(&g.expansion);
    w.indices(&g.far_columns);
    w.usize(g.near_count);
    w.usize(g.far_count);
    w.usize(g.rank);
    w.0.push(g.rank_reduced as u8);
    w.usize(g.swaps);
    let s = &g.scheme;
    w.f64(s.center().re);
    w.f64(s.center().im);
    w.f64(s.inner_radius());
    w.f64(s.outer_radius());
    w.f64(s.quad_radius());
    w.usize(s.p());
}

fn read_generator(r: &mut Reader) -> CliResult<LevelGenerator> {
    let depth = r.usize()?;
    let node_size = r.usize()?;
    let candidates = r.indices()?;
    let skeleton = r.indices()?;
    let count = r.len(9)?;
    let rows = (0..count)
        .map(|_| {
            let tag = r.take(1)?[0];
            let v = r.usize()?;
            match tag {
                0 => Ok(GeneratorRow::Skeleton(v)),
                1 => Ok(GeneratorRow::Interpolated(v)),
                t => Err(corrupt(format!("unknown generator row tag {t}"))),
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    let expansion = r.matrix()?;
    let far_columns = r.indices()?;
    let near_count = r.usize()?;
    let far_count = r.usize()?;
    let rank = r.usize()?;
    let rank_reduced = r.take(1)?[0] != 0;
    let swaps = r.usize()?;
    let center = C64::new(r.f64()?, r.f64()?);
    let (inner, outer, quad) = (r.f64()?, r.f64()?, r.f64()?);
    let p = r.usize()?;
    let scheme = ProxyScheme::with_quadrature_radius(center, inner, outer, quad, p)?;
    Ok(LevelGenerator {
        depth,
        node_size,
        candidates,
        skeleton,
        rows,
        expansion,
        far_columns,
        near_count,
        far_count,
        rank,
        rank_reduced,
        swaps,
        scheme,
    })
}

fn write_stats(w: &mut Writer, s: &BuildStats) {
    w.usize(s.d_entries);
    w.usize(s.b_entries);
    w.usize(s.b_check_entries);
    w.usize(s.generator_entry_evals);
    w.usize(s.cauchy_entries);
    w.f64(s.max_expansion);
    w.usize(s.rank_reductions);
    w.usize(s.swaps);
    w.indices(&s.skeleton_sizes);
}

fn read_stats(r: &mut Reader) -> CliResult<BuildStats> {
    Ok(BuildStats {
        d_entries: r.usize()?,
        b_entries: r.usize()?,
        b_check_entries: r.usize()?,
        generator_entry_evals: r.usize()?,
        cauchy_entries: r.usize()?,
        max_expansion: r.f64()?,
        rank_reductions: r.usize()?,
        swaps: r.usize()?,
        skeleton_sizes: r.indices()?,
    })
}

pub fn encode(form: &HssForm) -> Vec<u8> {
    let mut w = Writer(MAGIC.to_vec());
    w.u32(VERSION);
    let cfg = form.config();
    w.usize(form.n());
    w.usize(cfg.levels);
    w.usize(cfg.rank);
    w.usize(cfg.p);
    w.f64(cfg.f_bound);
    let spec = form.spec();
    let echo = SpecEcho {
        n: spec.n(),
        t0: spec.t0,
        f_plus: FunctionEcho::of(&spec.f_plus),
        f_minus: FunctionEcho::of(&spec.f_minus),
    };
    w.bytes(serde_json::to_string(&echo).expect("spec echo serializes").as_bytes());
    w.matrix(form.leaf_block());
    for g in form.generators() {
        write_generator(&mut w, g);
    }
    for c in form.couplings() {
        w.matrix(&c.left);
        w.matrix(&c.right);
    }
    write_stats(&mut w, form.stats());
    w.0
}

pub fn decode(data: &[u8]) -> CliResult<HssForm> {
    let mut r = Reader { data, pos: 0 };
    if r.take(8).map_err(|_| corrupt("not an HSS container"))? != MAGIC {
        return Err(corrupt("not an HSS container"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let n = r.usize()?;
    let config = HssBuildConfig {
        levels: r.usize()?,
        rank: r.usize()?,
        p: r.usize()?,
        f_bound: r.f64()?,
    };
    let echo: SpecEcho = serde_json::from_slice(r.bytes()?)?;
    if echo.n != n {
        return Err(corrupt("header size disagrees with the matrix echo"));
    }
    let spec = ToeplitzSpec::new(n, echo.f_plus.function()?, echo.f_minus.function()?, echo.t0)?;
    let leaf = r.matrix()?;
    let generators = (0..config.levels)
        .map(|_| read_generator(&mut r))
        .collect::<CliResult<Vec<_>>>()?;
    let couplings = (0..config.levels)
        .map(|_| {
            Ok(Coupling {
                left: r.matrix()?,
                right: r.matrix()?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let stats = read_stats(&mut r)?;
    if r.pos != data.len() {
        return Err(corrupt("trailing bytes after payload"));
    }
    Ok(HssForm::from_parts(spec, config, leaf, generators, couplings, stats)?)
}

pub fn save(form: &HssForm, path: &Path) -> CliResult<()> {
    std::fs::write(path, encode(form)).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> CliResult<HssForm> {
    let data = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&data)
}

/// SHA-256 of the encoded form, hex.
pub fn digest(form: &HssForm) -> String {
    Sha256::digest(encode(form))
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
