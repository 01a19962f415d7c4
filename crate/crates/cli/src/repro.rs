//! Reproduction grids for the four published tables and the entry-count
//! scaling table.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use proxyhss_core::hss::{block_error, build_hss, HssBuildConfig};
use proxyhss_core::kernels::{dense_block, Builtin, GeneratingFunction, KernelBlockRequest, ToeplitzSpec};
use proxyhss_core::numerics::numerical_rank;
use proxyhss_core::proxy::{make_scheme, min_p_with, ErrorNorm, ProxyScheme};
use proxyhss_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::kernel_file::KernelFile;
use crate::reference::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    Scaling,
}

impl TableId {
    pub const ALL: [TableId; 5] = [TableId::T1, TableId::T2, TableId::T3, TableId::T4, TableId::Scaling];

    pub fn name(self) -> &'static str {
        match self {
            TableId::T1 => "t1",
            TableId::T2 => "t2",
            TableId::T3 => "t3",
            TableId::T4 => "t4",
            TableId::Scaling => "scaling",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown table `{s}` (expected t1, t2, t3, t4 or scaling)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Info,
}

impl Status {
    fn from_pass(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproRow {
    pub table: TableId,
    pub cell: String,
    pub n: usize,
    pub levels: Option<usize>,
    pub p: Option<usize>,
    pub r: Option<usize>,
    pub metric: &'static str,
    pub measured: Option<f64>,
    pub reference: Option<f64>,
    pub tolerance: String,
    pub status: Status,
    pub runtime_s: f64,
    pub entry_calls: Option<u64>,
    /// Largest interpolation coefficient over all factorizations in the cell.
    pub max_expansion: Option<f64>,
    pub note: String,
    /// Generator construction work (kernel entries plus Cauchy factor
    /// entries) of a scaling cell.
    #[serde(skip)]
    pub generator_work: Option<u64>,
}

impl ReproRow {
    fn new(table: TableId, cell: String, n: usize, metric: &'static str) -> Self {
        ReproRow {
            table,
            cell,
            n,
            levels: None,
            p: None,
            r: None,
            metric,
            measured: None,
            reference: None,
            tolerance: String::new(),
            status: Status::Info,
            runtime_s: 0.0,
            entry_calls: None,
            max_expansion: None,
            note: String::new(),
            generator_work: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproResult {
    pub table: TableId,
    pub rows: Vec<ReproRow>,
}

impl ReproResult {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.status == Status::Fail)
    }
}

#[derive(Debug, Clone)]
pub struct ReproOptions {
    /// Cells with larger `n` are reported as skipped.
    pub max_n: usize,
    /// Largest `n` for which t4 ranks are computed.
    pub svd_cap: usize,
    /// Run only the cell with this id.
    pub only: Option<String>,
    pub p_max: Option<usize>,
    /// Overrides the published tolerance of Tables 1 and 2.
    pub tol: Option<f64>,
    /// Rank cap: t3, t4 and scaling default to 28; t2 to none.
    pub rank: Option<usize>,
    /// Matrix for the scaling table (its size is replaced per cell).
    pub kernel: Option<KernelFile>,
    /// Leaf size of the scaling table.
    pub leaf_size: usize,
}

impl Default for ReproOptions {
    fn default() -> Self {
        ReproOptions {
            max_n: 4096,
            svd_cap: 2048,
            only: None,
            p_max: None,
            tol: None,
            rank: None,
            kernel: None,
            leaf_size: 64,
        }
    }
}

#[derive(Debug, Clone)]
enum Cell {
    T1 { n: usize, reference: usize },
    T2 { n: usize, levels: usize, reference: usize },
    Hss { table: TableId, n: usize, levels: usize, p: usize, reference: f64 },
    Rank { n: usize, reference: usize },
    Scaling { n: usize },
}

impl Cell {
    fn id(&self) -> String {
        match *self {
            Cell::T1 { n, .. } | Cell::Scaling { n } => format!("n{n}"),
            Cell::T2 { n, levels, .. } => format!("n{n}-L{levels}"),
            Cell::Hss { n, levels, p, .. } => format!("n{n}-L{levels}-p{p}"),
            Cell::Rank { n, .. } => format!("n{n}-rank"),
        }
    }

    fn n(&self) -> usize {
        match *self {
            Cell::T1 { n, .. }
            | Cell::T2 { n, .. }
            | Cell::Hss { n, .. }
            | Cell::Rank { n, .. }
            | Cell::Scaling { n } => n,
        }
    }
}

fn cells(table: TableId) -> Vec<Cell> {
    match table {
        TableId::T1 => T1_MIN_P.iter().map(|&(n, reference)| Cell::T1 { n, reference }).collect(),
        TableId::T2 => T2_MIN_P
            .iter()
            .map(|&(n, levels, reference)| Cell::T2 { n, levels, reference })
            .collect(),
        TableId::T3 => T3_ERRORS
            .iter()
            .map(|&(n, levels, p, reference)| Cell::Hss { table, n, levels, p, reference })
            .collect(),
        TableId::T4 => T4_ERRORS
            .iter()
            .map(|&(n, levels, p, reference)| Cell::Hss { table, n, levels, p, reference })
            .chain(T4_RANKS.iter().map(|&(n, reference)| Cell::Rank { n, reference }))
            .collect(),
        TableId::Scaling => (11..=14).map(|e| Cell::Scaling { n: 1 << e }).collect(),
    }
}

/// Cell ids of a table, in output order.
pub fn cell_ids(table: TableId) -> Vec<String> {
    cells(table).iter().map(Cell::id).collect()
}

fn symmetric(kind: Builtin, n: usize) -> CliResult<ToeplitzSpec> {
    let f = GeneratingFunction::new(kind, n);
    Ok(ToeplitzSpec::any_size(n, f, f, 0.0)?)
}

fn hss_spec(table: TableId, n: usize) -> CliResult<ToeplitzSpec> {
    let f = GeneratingFunction::new(
        if table == TableId::T3 {
            Builtin::ShiftedSquare
        } else {
            Builtin::CauchyScaled
        },
        n,
    );
    let minus = if table == TableId::T3 { f } else { f.negated() };
    Ok(ToeplitzSpec::new(n, f, minus, 0.0)?)
}

fn range(a: usize, b: usize) -> Vec<f64> {
    (a..=b).map(|i| i as f64).collect()
}

/// First-leaf far-field block of the `n`-point cosine matrix against the
/// rest of the matrix, with the contour radius `(√2/2)·|leaf|`.
fn run_t1(row: &mut ReproRow, n: usize, reference: usize, opts: &ReproOptions) -> CliResult<()> {
    let spec = symmetric(Builtin::CosQuarter, n)?;
    let x = range(n / 8 + 1, 3 * n / 8);
    let y = range(n / 2 + 1, n);
    let base = make_scheme(&x, &y, 4)?;
    let radius = std::f64::consts::FRAC_1_SQRT_2 * (n / 2) as f64;
    let tol = opts.tol.unwrap_or(T1_TOL);
    let p_max = opts.p_max.unwrap_or(120);
    row.reference = Some(reference as f64);
    row.tolerance = format!("±{T1_SLACK}");
    let result = min_p_with(&spec, &x, &y, tol, ErrorNorm::FrobeniusAbs, p_max, |p| {
        ProxyScheme::with_quadrature_radius(base.center(), base.inner_radius(), base.outer_radius(), radius, p)
    });
    let last_p = match result {
        Ok(m) => {
            row.measured = Some(m.p as f64);
            row.p = Some(m.p);
            row.status = Status::from_pass(m.p.abs_diff(reference) <= T1_SLACK);
            row.note = format!("error {:.3e}", m.error);
            m.p
        }
        Err(Error::NotReached { best_p, best_error, .. }) => {
            row.status = Status::Fail;
            row.note = format!("no p <= {p_max} reaches {tol:e}; best {best_error:.3e} at p = {best_p}");
            p_max
        }
        Err(e) => return Err(e.into()),
    };
    let continuation: usize = (4..=last_p).map(|p| p * y.len()).sum();
    row.entry_calls = Some((x.len() * y.len() + continuation) as u64);
    Ok(())
}

fn run_t2(row: &mut ReproRow, n: usize, levels: usize, reference: usize, opts: &ReproOptions) -> CliResult<()> {
    let spec = symmetric(Builtin::CosOverN, n)?;
    let tol = opts.tol.unwrap_or(T2_TOL);
    let p_max = opts.p_max.unwrap_or(64);
    let rank = opts.rank.unwrap_or(usize::MAX);
    row.levels = Some(levels);
    row.r = opts.rank;
    row.reference = Some(reference as f64);
    row.tolerance = format!("±{T2_SLACK}");
    let mut max_e: f64 = 0.0;
    let mut best = (0, f64::INFINITY);
    for p in 4..=p_max {
        let form = build_hss(&spec, &HssBuildConfig::new(levels, p, rank))?;
        max_e = max_e.max(form.stats().max_expansion);
        let err = block_error(&form, 1, true)?.rel;
        if err < best.1 {
            best = (p, err);
        }
        if err <= tol {
            row.measured = Some(p as f64);
            row.p = Some(p);
            row.status = Status::from_pass(p.abs_diff(reference) <= T2_SLACK);
            row.entry_calls = Some(form.stats().kernel_entries() as u64);
            row.note = format!("relative error {err:.3e}");
            row.max_expansion = Some(max_e);
            return Ok(());
        }
    }
    row.status = Status::Fail;
    row.max_expansion = Some(max_e);
    row.note = format!("no p <= {p_max} reaches {tol:e}; best {:.3e} at p = {}", best.1, best.0);
    Ok(())
}

fn run_hss(row: &mut ReproRow, table: TableId, n: usize, levels: usize, p: usize, reference: f64, opts: &ReproOptions) -> CliResult<()> {
    let rank = opts.rank.unwrap_or(HSS_RANK_CAP);
    let form = build_hss(&hss_spec(table, n)?, &HssBuildConfig::new(levels, p, rank))?;
    let err = block_error(&form, 1, true)?;
    let limit = ERROR_FACTOR * reference;
    row.levels = Some(levels);
    row.p = Some(p);
    row.r = Some(rank);
    row.measured = Some(err.rel);
    row.reference = Some(reference);
    row.tolerance = format!("<= {limit:.4e}");
    row.status = Status::from_pass(err.rel <= limit);
    row.entry_calls = Some(form.stats().kernel_entries() as u64);
    row.max_expansion = Some(form.stats().max_expansion);
    row.note = format!("skeleton sizes {:?}", form.stats().skeleton_sizes);
    Ok(())
}

fn run_rank(row: &mut ReproRow, n: usize, reference: usize) -> CliResult<()> {
    let spec = hss_spec(TableId::T4, n)?;
    let h = n / 2;
    let top = dense_block(&spec, &KernelBlockRequest::ranges(1, h, h + 1, n))?;
    let rank = numerical_rank(&top, T4_RANK_TOL)?;
    row.measured = Some(rank as f64);
    row.reference = Some(reference as f64);
    row.tolerance = format!("±{T4_RANK_SLACK}");
    row.status = Status::from_pass(rank.abs_diff(reference) <= T4_RANK_SLACK);
    row.entry_calls = Some((h * h) as u64);
    row.note = format!("tau = {T4_RANK_TOL:e}");
    Ok(())
}

fn run_scaling(row: &mut ReproRow, n: usize, opts: &ReproOptions) -> CliResult<()> {
    let mut file = match &opts.kernel {
        Some(k) => k.clone(),
        None => KernelFile::builtin("cauchy_scaled", n)?,
    };
    file.n = n;
    let spec = file.to_spec()?;
    let leaf = opts.leaf_size;
    if !leaf.is_power_of_two() || leaf < 4 || leaf > n / 2 {
        return Err(CliError::Usage(format!("leaf size {leaf} must be a power of two in 4..={}", n / 2)));
    }
    let levels = (n / leaf).trailing_zeros() as usize;
    let p = opts.p_max.unwrap_or(32);
    let rank = opts.rank.unwrap_or(HSS_RANK_CAP);
    let form = build_hss(&spec, &HssBuildConfig::new(levels, p, rank))?;
    let s = form.stats();
    row.levels = Some(levels);
    row.p = Some(p);
    row.r = Some(rank);
    row.measured = Some(s.kernel_entries() as f64);
    row.entry_calls = Some(s.kernel_entries() as u64);
    row.max_expansion = Some(s.max_expansion);
    row.generator_work = Some((s.generator_entry_evals + s.cauchy_entries) as u64);
    row.note = format!(
        "kernel {}; leaf block {}; coupling {}; coupling check {}; generator {}; cauchy factor entries {}; n^2 = {}",
        file.name,
        s.d_entries,
        s.b_entries,
        s.b_check_entries,
        s.generator_entry_evals,
        s.cauchy_entries,
        n * n
    );
    Ok(())
}

fn run_cell(table: TableId, cell: &Cell, opts: &ReproOptions) -> CliResult<ReproRow> {
    let metric = match cell {
        Cell::T1 { .. } | Cell::T2 { .. } => "min_p",
        Cell::Hss { .. } => "rel_error",
        Cell::Rank { .. } => "numerical_rank",
        Cell::Scaling { .. } => "entry_calls",
    };
    let mut row = ReproRow::new(table, cell.id(), cell.n(), metric);
    let capped = match cell {
        Cell::Scaling { .. } => false,
        Cell::Rank { n, .. } => *n > opts.max_n || *n > opts.svd_cap,
        _ => cell.n() > opts.max_n,
    };
    if capped {
        row.status = Status::Skipped;
        row.note = "above --max-n or --svd-cap".into();
        return Ok(row);
    }
    let start = Instant::now();
    let outcome = match *cell {
        Cell::T1 { n, reference } => run_t1(&mut row, n, reference, opts),
        Cell::T2 { n, levels, reference } => run_t2(&mut row, n, levels, reference, opts),
        Cell::Hss { table, n, levels, p, reference } => run_hss(&mut row, table, n, levels, p, reference, opts),
        Cell::Rank { n, reference } => run_rank(&mut row, n, reference),
        Cell::Scaling { n } => run_scaling(&mut row, n, opts),
    };
    row.runtime_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => Ok(row),
        Err(CliError::Core(e @ Error::TooLarge { .. })) => {
            row.status = Status::Skipped;
            row.note = e.to_string();
            Ok(row)
        }
        Err(e) => Err(e),
    }
}

/// Least-squares slope of `log y` against `log x`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / k, sy / k);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

fn scaling_summary(rows: &[ReproRow]) -> Vec<ReproRow> {
    let pts: Vec<(usize, f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.n, r.measured?, r.generator_work? as f64)))
        .collect();
    if pts.len() < 2 {
        return Vec::new();
    }
    let (n0, n1) = (pts[0].0, pts[pts.len() - 1].0);
    let fit = |pick: fn(&(usize, f64, f64)) -> (f64, f64)| log_slope(&pts.iter().map(pick).collect::<Vec<_>>());
    let mut a = ReproRow::new(TableId::Scaling, "exponent-n".into(), n1, "slope_log_entries_vs_log_n");
    a.measured = Some(fit(|&(n, m, _)| (n as f64, m)));
    a.note = format!("entry calls ~ n^a over n = {n0}..{n1}; a < 1 is sublinear");
    let mut b = ReproRow::new(TableId::Scaling, "exponent-logn".into(), n1, "slope_log_entries_vs_log_log_n");
    b.measured = Some(fit(|&(n, m, _)| ((n as f64).log2(), m)));
    b.note = format!("entry calls ~ (log2 n)^b over n = {n0}..{n1}");
    let mut g = ReproRow::new(TableId::Scaling, "generator-logn".into(), n1, "slope_log_generator_work_vs_log_log_n");
    g.measured = Some(fit(|&(n, _, w)| ((n as f64).log2(), w)));
    g.note = format!("generator kernel entries plus Cauchy factor entries ~ (log2 n)^g over n = {n0}..{n1}");
    vec![a, b, g]
}

/// Runs a table. Cells run on the current rayon pool; rows come back in grid
/// order.
pub fn run(table: TableId, opts: &ReproOptions) -> CliResult<ReproResult> {
    let mut selected = cells(table);
    if let Some(only) = &opts.only {
        selected.retain(|c| &c.id() == only);
        if selected.is_empty() {
            return Err(CliError::Usage(format!(
                "no cell `{only}` in {table}; cells are {}",
                cell_ids(table).join(", ")
            )));
        }
    }
    let mut rows = selected
        .par_iter()
        .map(|c| run_cell(table, c, opts))
        .collect::<CliResult<Vec<_>>>()?;
    if table == TableId::Scaling && opts.only.is_none() {
        let summary = scaling_summary(&rows);
        rows.extend(summary);
    }
    Ok(ReproResult { table, rows })
}
