//! Grid sweeps over the verification checks, with a flat CSV report.
//!
//! Configuration is TOML, versioned by `schema_version`:
//!
//! ```toml
//! schema_version = 1
//! n_list = [2, 3, 5]
//! x_list = [0.0, 0.25, 0.5]
//! function_ids = ["sq", "abshalf"]
//! checks = ["convex-order", "partial-sum", "error-monotone",
//!           "kozniewska", "claim1", "partition"]
//! c = { count = 6, max = 5.0 }   # or c = ["boundary", "boundary/2", 0.0, 0.5]
//!
//! [tolerances]                   # optional overrides
//! margin = 1e-12
//!
//! [partition]                    # optional
//! max_den = 12
//! ```
//!
//! `c = { count, max }` expands per cell to [`auto_grid`] plus `0`. An
//! explicit list is used as given; the symbols `boundary` and `boundary/2`
//! resolve per cell and entries outside the admissible range are skipped
//! with a recorded reason.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PolyaError, Result};
use crate::interlace::{build_partition, verify_claim1, Rational};
use crate::operators::{lookup, TestFunction};
use crate::ordering::{
    auto_grid, check_convex_order, check_error_monotone, check_partial_sum_monotone, Tolerances,
};
use crate::polya::{kozniewska_residuals, min_replacement, StandardParams, INTERIOR_MARGIN};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "check,n,x,k_or_t,c1,c2,function,margin,pass";

/// Environment variable selecting the worker count (`0` or unset = auto).
pub const THREADS_ENV: &str = "POLYA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    ConvexOrder,
    PartialSum,
    ErrorMonotone,
    Kozniewska,
    Claim1,
    Partition,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::ConvexOrder,
        CheckKind::PartialSum,
        CheckKind::ErrorMonotone,
        CheckKind::Kozniewska,
        CheckKind::Claim1,
        CheckKind::Partition,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::ConvexOrder => "convex-order",
            CheckKind::PartialSum => "partial-sum",
            CheckKind::ErrorMonotone => "error-monotone",
            CheckKind::Kozniewska => "kozniewska",
            CheckKind::Claim1 => "claim1",
            CheckKind::Partition => "partition",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckKind {
    type Err = PolyaError;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| PolyaError::Report(format!("unknown check `{s}`")))
    }
}

/// One entry of an explicit c list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CValue {
    Value(f64),
    Symbol(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CSpec {
    List(Vec<CValue>),
    Auto { count: usize, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionSpec {
    /// Partition cells use every reduced `p/q` in `(0, 1)` with `q <= max_den`.
    pub max_den: i64,
}

impl Default for PartitionSpec {
    fn default() -> Self {
        Self { max_den: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub x_list: Vec<f64>,
    pub c: CSpec,
    #[serde(default)]
    pub function_ids: Vec<String>,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub partition: PartitionSpec,
}

impl SweepConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SweepConfig =
            toml::from_str(s).map_err(|e| PolyaError::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PolyaError::ConfigParse(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn validate(&self) -> Result<()> {
        let invalid = |cell: &str, reason: String| PolyaError::ConfigInvalid {
            cell: cell.to_string(),
            reason,
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n == 0) {
            return Err(invalid("n_list", format!("n = {n} must be at least 1")));
        }
        if let Some(x) = self.x_list.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(invalid("x_list", format!("x = {x} outside [0, 1]")));
        }
        for id in &self.function_ids {
            lookup(id).map_err(|e| invalid("function_ids", e.to_string()))?;
        }
        match &self.c {
            CSpec::Auto { count, max } => {
                if *count == 0 || !max.is_finite() || *max <= 0.0 {
                    return Err(invalid(
                        "c",
                        "auto grid needs count >= 1 and max > 0".into(),
                    ));
                }
            }
            CSpec::List(values) => {
                for v in values {
                    if let CValue::Symbol(s) = v {
                        if s != "boundary" && s != "boundary/2" {
                            return Err(invalid("c", format!("unknown symbol `{s}`")));
                        }
                    }
                }
            }
        }
        if self.partition.max_den < 2 {
            return Err(invalid("partition.max_den", "must be at least 2".into()));
        }
        Ok(())
    }

    fn functions(&self) -> Vec<&'static TestFunction> {
        self.function_ids
            .iter()
            .map(|id| lookup(id).expect("validated"))
            .collect()
    }

    fn describe_c(&self) -> String {
        match &self.c {
            CSpec::Auto { count, max } => format!("auto(count={count}, max={max})"),
            CSpec::List(values) => {
                let parts: Vec<String> = values
                    .iter()
                    .map(|v| match v {
                        CValue::Value(c) => c.to_string(),
                        CValue::Symbol(s) => s.clone(),
                    })
                    .collect();
                format!("[{}]", parts.join(", "))
            }
        }
    }

    /// The ascending c grid for one `(n, x)` cell, with the entries that
    /// had to be dropped and why.
    pub fn resolve_grid(&self, n: usize, x: f64) -> (Vec<f64>, Vec<String>) {
        let boundary = min_replacement(n, x);
        let mut skipped = Vec::new();
        let mut grid: Vec<f64> = match &self.c {
            CSpec::Auto { count, max } => {
                let mut g = auto_grid(n, x, *count, *max).expect("validated auto spec");
                g.push(0.0);
                g
            }
            CSpec::List(values) => values
                .iter()
                .filter_map(|v| match (v, boundary) {
                    (CValue::Value(c), _) => Some(*c),
                    (CValue::Symbol(s), Some(b)) => Some(if s == "boundary" { b } else { b / 2.0 }),
                    (CValue::Symbol(s), None) => {
                        skipped.push(format!("c = {s}: no lower bound for n = 1"));
                        None
                    }
                })
                .collect(),
        };
        grid.retain(|&c| {
            let ok = StandardParams::new(n, x, c).is_ok();
            if !ok {
                skipped.push(format!("c = {c} violates the compatibility condition"));
            }
            ok
        });
        grid.sort_by(f64::total_cmp);
        // 0 and -0 (boundary at x = 0 or 1) collapse to one point
        grid.dedup_by(|a, b| a == b);
        (grid, skipped)
    }
}

/// One row of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub check: CheckKind,
    pub n: usize,
    pub x: f64,
    pub k_or_t: Option<usize>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub function: Option<String>,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCell {
    pub check: CheckKind,
    pub cell: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDescription {
    pub n_list: Vec<usize>,
    pub x_list: Vec<f64>,
    pub c: String,
    pub function_ids: Vec<String>,
    pub checks: Vec<CheckKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub grid: GridDescription,
    pub records: Vec<CellRecord>,
    pub skipped: Vec<SkippedCell>,
    pub worst_margin: f64,
    pub failures: usize,
}

/// Worst margin and failure count of one check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckSummary {
    pub cells: usize,
    pub failures: usize,
    pub worst_margin: f64,
}

enum Outcome {
    Rows(Vec<CellRecord>),
    Skip(SkippedCell),
}

/// A unit of work: one `(check, n, x)` combination, or one partition size.
#[derive(Debug, Clone, Copy)]
struct Task {
    check: CheckKind,
    n: usize,
    x: f64,
}

fn fmt_cell(check: CheckKind, n: usize, x: f64) -> String {
    format!("{check} n={n} x={x}")
}

fn record(check: CheckKind, n: usize, x: f64) -> CellRecord {
    CellRecord {
        check,
        n,
        x,
        k_or_t: None,
        c1: None,
        c2: None,
        function: None,
        margin: 0.0,
        pass: true,
    }
}

fn reduced_fractions(max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in 2..=max_den {
        for p in 1..q {
            if p.gcd(&q) == 1 {
                out.push(Rational::new(p, q));
            }
        }
    }
    out
}

fn run_task(cfg: &SweepConfig, task: Task) -> Result<Vec<Outcome>> {
    let tol = &cfg.tolerances;
    let Task { check, n, x } = task;
    let mut out = Vec::new();
    let (grid, dropped) = cfg.resolve_grid(n, x);
    if check != CheckKind::Partition {
        out.extend(dropped.into_iter().map(|reason| {
            Outcome::Skip(SkippedCell {
                check,
                cell: fmt_cell(check, n, x),
                reason,
            })
        }));
    }
    let skip = |reason: &str| {
        Outcome::Skip(SkippedCell {
            check,
            cell: fmt_cell(check, n, x),
            reason: reason.to_string(),
        })
    };
    if matches!(check, CheckKind::PartialSum | CheckKind::ErrorMonotone) && grid.len() < 2 {
        out.push(skip("c grid has fewer than two admissible points"));
        return Ok(out);
    }
    match check {
        CheckKind::ConvexOrder => {
            let mut rows = Vec::new();
            for (i, &c1) in grid.iter().enumerate() {
                for &c2 in &grid[i + 1..] {
                    let m = check_convex_order(n, x, c1, c2)?;
                    rows.push(CellRecord {
                        k_or_t: Some(m.at),
                        c1: Some(c1),
                        c2: Some(c2),
                        margin: m.value,
                        pass: m.value >= -tol.margin,
                        ..record(check, n, x)
                    });
                }
            }
            out.push(Outcome::Rows(rows));
        }
        CheckKind::PartialSum => {
            let mut rows = Vec::new();
            for k in 0..=n {
                let m = check_partial_sum_monotone(n, x, k, &grid)?;
                let interior = x > 0.0 && x < 1.0 && k < n && n >= 2;
                let pass = m.value >= -tol.margin && (!interior || m.value > tol.strict);
                rows.push(CellRecord {
                    k_or_t: Some(k),
                    c1: Some(grid[m.at]),
                    c2: Some(grid[m.at + 1]),
                    margin: m.value,
                    pass,
                    ..record(check, n, x)
                });
            }
            out.push(Outcome::Rows(rows));
        }
        CheckKind::ErrorMonotone => {
            if n < 2 {
                out.push(skip("Bernstein-Stancu operators need n >= 2"));
                return Ok(out);
            }
            let mut rows = Vec::new();
            for f in cfg.functions() {
                let r = check_error_monotone(f, n, x, &grid, tol).map_err(|e| {
                    PolyaError::ConfigInvalid {
                        cell: format!("{} function={}", fmt_cell(check, n, x), f.id),
                        reason: e.to_string(),
                    }
                })?;
                rows.push(CellRecord {
                    c1: Some(grid[r.margin.at]),
                    c2: Some(grid[r.margin.at + 1]),
                    function: Some(f.id.to_string()),
                    margin: r.margin.value,
                    pass: r.passes(tol),
                    ..record(check, n, x)
                });
            }
            out.push(Outcome::Rows(rows));
        }
        CheckKind::Kozniewska => {
            let mut rows = Vec::new();
            for &c in &grid {
                let params = StandardParams::new(n, x, c)?;
                let (s, worst) =
                    (1..=n)
                        .zip(kozniewska_residuals(&params))
                        .fold(
                            (1, 0.0_f64),
                            |best, cur| if cur.1 > best.1 { cur } else { best },
                        );
                rows.push(CellRecord {
                    k_or_t: Some(s),
                    c1: Some(c),
                    margin: -worst,
                    pass: worst <= tol.residual,
                    ..record(check, n, x)
                });
            }
            out.push(Outcome::Rows(rows));
        }
        CheckKind::Claim1 => {
            if n < 2 || x <= 0.0 || x >= 1.0 {
                out.push(skip("needs n >= 2 and 0 < x < 1"));
                return Ok(out);
            }
            let lower = min_replacement(n, x).expect("n >= 2");
            let mut rows = Vec::new();
            for &c in &grid {
                if c < lower + INTERIOR_MARGIN {
                    out.push(Outcome::Skip(SkippedCell {
                        check,
                        cell: format!("{} c={c}", fmt_cell(check, n, x)),
                        reason: "c is not an interior point".into(),
                    }));
                    continue;
                }
                let (k, margin) = (0..n)
                    .map(|k| verify_claim1(n, k, x, c).map(|r| (k, r.margin())))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(
                        (0, f64::INFINITY),
                        |best, cur| if cur.1 < best.1 { cur } else { best },
                    );
                rows.push(CellRecord {
                    k_or_t: Some(k),
                    c1: Some(c),
                    margin,
                    pass: margin > 0.0,
                    ..record(check, n, x)
                });
            }
            out.push(Outcome::Rows(rows));
        }
        CheckKind::Partition => {
            if n < 3 {
                out.push(skip("partition needs n >= 3"));
                return Ok(out);
            }
            let mut rows = Vec::new();
            for xr in reduced_fractions(cfg.partition.max_den) {
                let xf = xr.to_f64().expect("small rational");
                for k in 1..=n - 2 {
                    let row = match build_partition(n, k, xr) {
                        Ok(p) => {
                            let slack = p.min_slack(xr);
                            CellRecord {
                                k_or_t: Some(k),
                                margin: slack.to_f64().expect("small rational"),
                                pass: p.is_partition() && p.bounds_hold(xr),
                                ..record(check, n, xf)
                            }
                        }
                        Err(PolyaError::InterlaceTie { .. }) => CellRecord {
                            k_or_t: Some(k),
                            margin: f64::NAN,
                            pass: false,
                            ..record(check, n, xf)
                        },
                        Err(e) => return Err(e),
                    };
                    rows.push(row);
                }
            }
            out.push(Outcome::Rows(rows));
        }
    }
    Ok(out)
}

/// Runs every selected check over the configured grid.
///
/// Cells are computed in parallel on the current rayon pool; rows come out
/// in grid order regardless of completion order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    if cfg.checks.contains(&CheckKind::ErrorMonotone) {
        if let Some(f) = cfg.functions().into_iter().find(|f| !f.is_convex) {
            return Err(PolyaError::ConfigInvalid {
                cell: format!("error-monotone function={}", f.id),
                reason: PolyaError::NonConvexFunction(f.id.to_string()).to_string(),
            });
        }
    }
    let mut tasks = Vec::new();
    for &check in &cfg.checks {
        for &n in &cfg.n_list {
            if check == CheckKind::Partition {
                tasks.push(Task { check, n, x: 0.0 });
                continue;
            }
            for &x in &cfg.x_list {
                tasks.push(Task { check, n, x });
            }
        }
    }
    let outcomes = tasks
        .par_iter()
        .map(|&t| run_task(cfg, t))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes.into_iter().flatten() {
        match outcome {
            Outcome::Rows(rows) => records.extend(rows),
            Outcome::Skip(s) => skipped.push(s),
        }
    }
    Ok(SweepReport::new(
        GridDescription {
            n_list: cfg.n_list.clone(),
            x_list: cfg.x_list.clone(),
            c: cfg.describe_c(),
            function_ids: cfg.function_ids.clone(),
            checks: cfg.checks.clone(),
        },
        records,
        skipped,
    ))
}

/// [`run_sweep`] on a dedicated pool of `threads` workers (`0` = auto).
pub fn run_sweep_with_threads(cfg: &SweepConfig, threads: usize) -> Result<SweepReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PolyaError::ConfigInvalid {
            cell: THREADS_ENV.into(),
            reason: e.to_string(),
        })?;
    pool.install(|| run_sweep(cfg))
}

/// Worker count from [`THREADS_ENV`]; unset or unparsable means auto.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| PolyaError::Report(format!("bad float `{s}`")))
}

impl SweepReport {
    pub fn new(grid: GridDescription, records: Vec<CellRecord>, skipped: Vec<SkippedCell>) -> Self {
        let failures = records.iter().filter(|r| !r.pass).count();
        let worst_margin = worst(&records);
        Self {
            grid,
            records,
            skipped,
            worst_margin,
            failures,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn by_check(&self) -> BTreeMap<CheckKind, CheckSummary> {
        let mut groups: BTreeMap<CheckKind, Vec<&CellRecord>> = BTreeMap::new();
        for r in &self.records {
            groups.entry(r.check).or_default().push(r);
        }
        groups
            .into_iter()
            .map(|(k, rows)| {
                (
                    k,
                    CheckSummary {
                        cells: rows.len(),
                        failures: rows.iter().filter(|r| !r.pass).count(),
                        worst_margin: rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
                    },
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        write_csv(&self.records)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "cells: {}  failures: {}  skipped: {}",
            self.records.len(),
            self.failures,
            self.skipped.len()
        );
        for (check, sum) in self.by_check() {
            let _ = writeln!(
                s,
                "  {:<15} cells {:>7}  failures {:>5}  worst margin {}",
                check.as_str(),
                sum.cells,
                sum.failures,
                format_float(sum.worst_margin)
            );
        }
        s
    }
}

fn worst(records: &[CellRecord]) -> f64 {
    records
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min)
}

pub fn write_csv(records: &[CellRecord]) -> String {
    let opt_f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.check,
            r.n,
            format_float(r.x),
            r.k_or_t.map(|k| k.to_string()).unwrap_or_default(),
            opt_f(r.c1),
            opt_f(r.c2),
            r.function.as_deref().unwrap_or(""),
            format_float(r.margin),
            r.pass
        );
    }
    out
}

/// Reads records back from [`write_csv`] output.
pub fn parse_csv(text: &str) -> Result<Vec<CellRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(PolyaError::Report(format!(
                "expected header `{CSV_HEADER}`, got {other:?}"
            )))
        }
    }
    fn opt(s: &str) -> Option<&str> {
        if s.is_empty() {
            None
        } else {
            Some(s)
        }
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 9 {
                return Err(PolyaError::Report(format!("expected 9 fields: `{line}`")));
            }
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| PolyaError::Report(format!("bad integer `{s}`")))
            };
            Ok(CellRecord {
                check: fields[0].parse()?,
                n: int(fields[1])?,
                x: parse_float(fields[2])?,
                k_or_t: opt(fields[3]).map(int).transpose()?,
                c1: opt(fields[4]).map(parse_float).transpose()?,
                c2: opt(fields[5]).map(parse_float).transpose()?,
                function: opt(fields[6]).map(str::to_string),
                margin: parse_float(fields[7])?,
                pass: match fields[8] {
                    "true" => true,
                    "false" => false,
                    other => return Err(PolyaError::Report(format!("bad pass flag `{other}`"))),
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(body: &str) -> SweepConfig {
        SweepConfig::from_toml_str(&format!("schema_version = 1\n{body}")).unwrap()
    }

    #[test]
    fn empty_grid_gives_empty_report() {
        let cfg = config("c = [0.0]\nchecks = [\"convex-order\"]");
        let r = run_sweep(&cfg).unwrap();
        assert_eq!((r.records.len(), r.failures), (0, 0));
        assert_eq!(r.to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn single_convex_order_cell() {
        let cfg =
            config("n_list = [2]\nx_list = [0.5]\nc = [-0.5, 0.5]\nchecks = [\"convex-order\"]");
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.records.len(), 1);
        let row = &r.records[0];
        assert!(row.pass && row.margin.abs() < 1e-15);
        assert_eq!((row.c1, row.c2), (Some(-0.5), Some(0.5)));
    }

    #[test]
    fn non_convex_function_rejected() {
        let cfg = config(
            "n_list = [3]\nx_list = [0.5]\nc = [0.0, 1.0]\nfunction_ids = [\"sq\", \"sin\"]\nchecks = [\"error-monotone\"]",
        );
        match run_sweep(&cfg) {
            Err(PolyaError::ConfigInvalid { cell, reason }) => {
                assert!(cell.contains("sin"), "{cell}");
                assert!(reason.contains("not declared convex"), "{reason}");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn config_errors() {
        let bad = [
            "schema_version = 2\nc = [0.0]",
            "schema_version = 1\nc = [0.0]\nfunction_ids = [\"nope\"]",
            "schema_version = 1\nc = [\"edge\"]",
            "schema_version = 1\nc = [0.0]\nx_list = [1.5]",
            "schema_version = 1\nc = [0.0]\nn_list = [0]",
            "schema_version = 1\nc = { count = 0, max = 5.0 }",
            "schema_version = 1\nc = [0.0]\nchecks = [\"bogus\"]",
            "schema_version = 1\nc = [0.0]\nsurprise = 3",
            "not toml at all [",
        ];
        for text in bad {
            assert!(SweepConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn grid_resolution() {
        let cfg = config("c = [\"boundary\", \"boundary/2\", 0.0, -0.9, 0.5]");
        let (grid, skipped) = cfg.resolve_grid(3, 0.4);
        assert_eq!(grid, vec![-0.2, -0.1, 0.0, 0.5]);
        assert_eq!(skipped.len(), 1);
        let (grid, skipped) = cfg.resolve_grid(1, 0.4);
        assert_eq!(grid, vec![-0.9, 0.0, 0.5]);
        assert_eq!(skipped.len(), 2);
        let (grid, _) = cfg.resolve_grid(3, 0.0);
        assert_eq!(grid, vec![0.0, 0.5]);

        let cfg = config("c = { count = 4, max = 5.0 }");
        let (grid, _) = cfg.resolve_grid(5, 0.5);
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], -0.125);
        assert!(grid.contains(&0.0));
    }

    #[test]
    fn csv_round_trip_keeps_failures() {
        let cfg = config(
            "n_list = [2, 4]\nx_list = [0.0, 0.3]\nc = [\"boundary\", 0.0, 1.0]\nfunction_ids = [\"sq\"]\n\
             checks = [\"convex-order\", \"partial-sum\", \"error-monotone\", \"kozniewska\", \"claim1\", \"partition\"]\n\
             [partition]\nmax_den = 4",
        );
        let mut r = run_sweep(&cfg).unwrap();
        r.records[0].pass = false;
        let r = SweepReport::new(r.grid, r.records, r.skipped);
        let back = parse_csv(&r.to_csv()).unwrap();
        assert_eq!(back.len(), r.records.len());
        assert_eq!(back.iter().filter(|c| !c.pass).count(), r.failures);
        assert_eq!(back, r.records);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(parse_csv("a,b\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\nconvex-order,2,x,,,,,0,true\n")).is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\nconvex-order,2,0.5,,,,,0,maybe\n")).is_err());
    }
}
