use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use proxyhss::container;
use proxyhss::kernel_file::KernelFile;
use proxyhss::output::{self, Format};
use proxyhss::repro::{self, ReproOptions, TableId};
use proxyhss::{CliError, CliResult};
use proxyhss_core::bounds::{
    growth_bound, hss_block_bound, level_termwise_bound, matrix_bound_abs, matrix_bound_rel,
    termwise_bound, BoundReport, DEFAULT_BOUNDARY_SAMPLES,
};
use proxyhss_core::hss::{block_error, build_hss, hss_matvec, HssBuildConfig, HssForm};
use proxyhss_core::kernels::ToeplitzSpec;
use proxyhss_core::proxy::{factors, make_scheme, min_p, ErrorNorm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Largest size at which `hss --verify` compares against dense entries.
const VERIFY_MAX_N: usize = 4096;

#[derive(Parser)]
#[command(name = "proxyhss", version, about = "Proxy point compression of Toeplitz matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an a priori error bound.
    Bound(BoundArgs),
    /// Proxy point approximation of one off-diagonal block.
    Lowrank(LowrankArgs),
    /// Build (or load) an HSS form and report on it.
    Hss(HssArgs),
    /// Reproduce a table: t1, t2, t3, t4, scaling or all.
    Repro(ReproArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Kind {
    Termwise,
    MatrixAbs,
    MatrixRel,
    Growth,
    Level,
    HssBlock,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum NormArg {
    FroAbs,
    FroRel,
}

impl From<NormArg> for ErrorNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::FroAbs => ErrorNorm::FrobeniusAbs,
            NormArg::FroRel => ErrorNorm::FrobeniusRel,
        }
    }
}

#[derive(Args)]
struct KernelArgs {
    /// Builtin name, JSON description, or path to a JSON file.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    n: Option<usize>,
}

impl KernelArgs {
    fn file(&self) -> CliResult<KernelFile> {
        let arg = self
            .kernel
            .as_deref()
            .ok_or_else(|| CliError::Usage("--kernel is required".into()))?;
        KernelFile::resolve(arg, self.n)
    }
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Row indices `a:b` (1-based, inclusive).
    #[arg(long)]
    rows: Option<String>,
    /// Column indices `c:d` (1-based, inclusive).
    #[arg(long)]
    cols: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Node height for `--kind level`.
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BOUNDARY_SAMPLES)]
    samples: usize,
}

#[derive(Args)]
struct LowrankArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    rows: String,
    #[arg(long)]
    cols: String,
    /// Fixed number of proxy points; without it the smallest p meeting
    /// `--tol` is searched for.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value = "fro_abs")]
    norm: NormArg,
    #[arg(long, default_value_t = 120)]
    p_max: usize,
}

#[derive(Args)]
struct HssArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long = "L")]
    levels: Option<usize>,
    #[arg(long, default_value_t = 32)]
    p: usize,
    #[arg(long, default_value_t = 28)]
    r: usize,
    #[arg(long, default_value_t = 2.0)]
    f_bound: f64,
    /// Compare against dense kernel entries (n ≤ 4096).
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    save: Option<PathBuf>,
    /// Read a saved form instead of building one.
    #[arg(long, conflicts_with_all = ["kernel", "levels"])]
    load: Option<PathBuf>,
    /// Seed of the random test vector used by `--verify`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative error accepted by `--verify`.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct ReproArgs {
    table: String,
    #[arg(long, default_value_t = 4096)]
    max_n: usize,
    #[arg(long, default_value_t = 2048)]
    svd_cap: usize,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    p_max: Option<usize>,
    /// Rank cap for the HSS cells.
    #[arg(long)]
    r: Option<usize>,
    /// Kernel of the scaling table.
    #[arg(long)]
    kernel: Option<String>,
    /// Leaf size of the scaling table.
    #[arg(long, default_value_t = 64)]
    leaf: usize,
}

fn parse_range(flag: &str, s: Option<&str>) -> CliResult<Vec<f64>> {
    let s = s.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))?;
    let bad = || CliError::Usage(format!("--{flag} expects `a:b` with 1 ≤ a ≤ b, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).map(|i| i as f64).collect())
}

fn need<T>(flag: &str, v: Option<T>) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this bound")))
}

fn report_json(r: &BoundReport) -> Value {
    json!({
        "kind": r.kind.name(),
        "value": r.value,
        "alpha": r.alpha,
        "beta": r.beta,
        "rho": r.rho,
        "p": r.p,
        "f_max_on_boundary": r.f_max_on_boundary,
        "inputs": {
            "n": r.inputs.n,
            "rows": r.inputs.rows,
            "cols": r.inputs.cols,
            "height": r.inputs.height,
            "samples": r.inputs.samples,
            "boundary_radius": r.inputs.boundary_radius,
        },
    })
}

fn cmd_bound(a: &BoundArgs) -> CliResult<Value> {
    let report = match a.kind {
        Kind::MatrixRel => matrix_bound_rel(need("l", a.l)?, need("m", a.m)?, need("rho", a.rho)?, need("p", a.p)?)?,
        Kind::Termwise | Kind::MatrixAbs => {
            let spec = a.kernel.file()?.to_spec()?;
            let x = parse_range("rows", a.rows.as_deref())?;
            let y = parse_range("cols", a.cols.as_deref())?;
            let scheme = make_scheme(&x, &y, need("p", a.p)?)?;
            if matches!(a.kind, Kind::Termwise) {
                termwise_bound(&spec, &y, &scheme, a.samples)?
            } else {
                matrix_bound_abs(&spec, &x, &y, &scheme, a.samples)?
            }
        }
        Kind::Growth => {
            let file = a.kernel.file()?;
            growth_bound(&file.function()?, file.n)?
        }
        Kind::Level => {
            let file = a.kernel.file()?;
            level_termwise_bound(&file.function()?, file.n, need("height", a.height)?, need("p", a.p)?, a.samples)?
        }
        Kind::HssBlock => {
            let file = a.kernel.file()?;
            hss_block_bound(&file.function()?, file.n, need("p", a.p)?)?
        }
    };
    Ok(report_json(&report))
}

fn cmd_lowrank(a: &LowrankArgs) -> CliResult<Value> {
    let file = a.kernel.file()?;
    let spec = file.to_spec()?;
    let x = parse_range("rows", Some(&a.rows))?;
    let y = parse_range("cols", Some(&a.cols))?;
    let norm = ErrorNorm::from(a.norm);
    let (p, error) = match a.p {
        Some(p) => {
            let scheme = make_scheme(&x, &y, p)?;
            let f = factors(&spec, &x, &y, &scheme)?;
            let exact = proxyhss_core::kernels::AnalyticKernel::dense(&spec, &x, &y)?;
            (p, norm.measure(&exact, &f.real_product())?)
        }
        None => {
            let m = min_p(&spec, &x, &y, a.tol, norm, a.p_max)?;
            (m.p, m.error)
        }
    };
    let scheme = make_scheme(&x, &y, p)?;
    Ok(json!({
        "kernel": file,
        "rows": x.len(),
        "cols": y.len(),
        "p": p,
        "error": error,
        "norm": match a.norm { NormArg::FroAbs => "fro_abs", NormArg::FroRel => "fro_rel" },
        "tol": a.p.is_none().then_some(a.tol),
        "scheme": {
            "center": scheme.center().re,
            "inner_radius": scheme.inner_radius(),
            "outer_radius": scheme.outer_radius(),
            "quad_radius": scheme.quad_radius(),
            "rho": scheme.rho(),
        },
    }))
}

/// Relative 2-norm error of `hss_matvec` against the entry oracle on a random
/// vector.
fn matvec_error(form: &HssForm, seed: u64) -> CliResult<f64> {
    let n = form.n();
    let spec = form.spec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let fast = hss_matvec(form, &x)?;
    let coef = (1 - n as i64..n as i64)
        .map(|d| spec.coefficient(d))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, fi) in fast.iter().enumerate() {
        // T[i, j] = t_{j - i}, stored at offset n - 1 + j - i.
        let row = &coef[n - 1 - i..2 * n - 1 - i];
        let exact: f64 = row.iter().zip(&x).map(|(t, xj)| t * xj).sum();
        num += (fi - exact).powi(2);
        den += exact * exact;
    }
    Ok((num / den).sqrt())
}

fn spec_echo(spec: &ToeplitzSpec) -> Value {
    json!({
        "name": spec.f_plus.name(),
        "n": spec.n(),
        "t0": spec.t0,
        "symmetric": spec.is_symmetric(),
    })
}

fn cmd_hss(a: &HssArgs) -> CliResult<(Value, bool)> {
    let start = Instant::now();
    let (form, kernel) = match &a.load {
        Some(path) => {
            let form = container::load(path)?;
            let echo = spec_echo(form.spec());
            (form, echo)
        }
        None => {
            let file = a.kernel.file()?;
            let spec = file.to_spec()?;
            let levels = a.levels.ok_or_else(|| CliError::Usage("--L is required".into()))?;
            let mut cfg = HssBuildConfig::new(levels, a.p, a.r);
            cfg.f_bound = a.f_bound;
            (build_hss(&spec, &cfg)?, serde_json::to_value(&file)?)
        }
    };
    let build_s = start.elapsed().as_secs_f64();
    if let Some(path) = &a.save {
        container::save(&form, path)?;
    }
    let stats = form.stats();
    let cfg = form.config();
    let mut ok = true;
    let verify = if !a.verify {
        Value::Null
    } else if form.n() > VERIFY_MAX_N {
        json!({ "skipped": format!("n > {VERIFY_MAX_N}") })
    } else {
        let left = block_error(&form, 1, true)?;
        let right = block_error(&form, 1, false)?;
        let mv = matvec_error(&form, a.seed)?;
        let pass = left.rel <= a.tol && right.rel <= a.tol && mv <= a.tol;
        ok = pass;
        json!({
            "top_block_rel_error": left.rel,
            "top_block_rel_error_right": right.rel,
            "matvec_rel_error": mv,
            "seed": a.seed,
            "tol": a.tol,
            "pass": pass,
        })
    };
    let summary = json!({
        "kernel": kernel,
        "n": form.n(),
        "L": form.levels(),
        "p": cfg.p,
        "r": cfg.rank,
        "f_bound": cfg.f_bound,
        "max_rank": form.max_rank(),
        "skeleton_sizes": stats.skeleton_sizes,
        "entry_calls": stats.kernel_entries(),
        "entries": {
            "leaf_block": stats.d_entries,
            "coupling": stats.b_entries,
            "coupling_check": stats.b_check_entries,
            "generator": stats.generator_entry_evals,
            "cauchy_factor": stats.cauchy_entries,
        },
        "max_expansion": stats.max_expansion,
        "rank_reductions": stats.rank_reductions,
        "swaps": stats.swaps,
        "seconds": build_s,
        "digest": container::digest(&form),
        "saved": a.save,
        "verify": verify,
    });
    Ok((summary, ok))
}

fn worker_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PROXYHSS_THREADS") {
        let t: usize = v
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Usage(format!("PROXYHSS_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(t);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_repro(a: &ReproArgs) -> CliResult<(String, bool)> {
    let tables: Vec<TableId> = if a.table == "all" {
        TableId::ALL.to_vec()
    } else {
        vec![a.table.parse()?]
    };
    let format: Format = a.format.parse()?;
    let kernel = a.kernel.as_deref().map(|k| KernelFile::resolve(k, Some(2048))).transpose()?;
    let opts = ReproOptions {
        max_n: a.max_n,
        svd_cap: a.svd_cap,
        only: a.only.clone(),
        p_max: a.p_max,
        tol: a.tol,
        rank: a.r,
        kernel,
        leaf_size: a.leaf,
    };
    let pool = worker_pool()?;
    let results = pool.install(|| tables.iter().map(|&t| repro::run(t, &opts)).collect::<CliResult<Vec<_>>>())?;
    let ok = !results.iter().any(|r| r.failed());
    Ok((output::render(&results, format)?, ok))
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Bound(a) => {
            emit(&output::to_json(&cmd_bound(&a)?));
            Ok(true)
        }
        Command::Lowrank(a) => {
            emit(&output::to_json(&cmd_lowrank(&a)?));
            Ok(true)
        }
        Command::Hss(a) => {
            let (summary, ok) = cmd_hss(&a)?;
            emit(&output::to_json(&summary));
            Ok(ok)
        }
        Command::Repro(a) => {
            let (text, ok) = cmd_repro(&a)?;
            emit(text.trim_end());
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
