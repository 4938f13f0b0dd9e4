//! Numerical checks of the convex ordering of the standard Pólya urn in the
//! replacement parameter, and of the error monotonicity it implies for the
//! Bernstein-Stancu operators.
//!
//! All checks report a *margin*: the smallest observed gap in the direction
//! the inequality asserts. A negative margin beyond the tolerance is a
//! violation.

use serde::{Deserialize, Serialize};

use crate::error::{PolyaError, Result};
use crate::operators::{bernstein, bernstein_linear, stancu, TestFunction};
use crate::polya::{min_replacement, pmf_dc, StandardParams};

/// Thresholds shared by the checks and the sweep harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Margins below `-margin` fail.
    pub margin: f64,
    /// Interior partial-sum cells must exceed this.
    pub strict: f64,
    /// Largest accepted closed-form residual of the partial centered moment.
    pub residual: f64,
    /// `|B_n f(x) - B_1 f(x)|` above this makes strict error growth expected.
    pub strictness: f64,
    /// Below this the strictness condition is considered not to hold.
    pub strictness_floor: f64,
    /// Derivative-based margins below `-derivative` fail.
    pub derivative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            margin: 1e-12,
            strict: 1e-14,
            residual: 1e-12,
            strictness: 1e-9,
            strictness_floor: 1e-12,
            derivative: 1e-10,
        }
    }
}

/// `t -> E((t - X)_+)` at the integer breakpoints `t = 0..=n`.
///
/// Between integers the transform is affine, so dominance at the breakpoints
/// is dominance everywhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StopLossCurve {
    pub params: StandardParams,
    pub values: Vec<f64>,
}

pub fn stop_loss(params: &StandardParams) -> StopLossCurve {
    let pmf = params.pmf();
    StopLossCurve {
        params: *params,
        values: stop_loss_values(pmf.probs(), params.x(), 1.0),
    }
}

/// `sum_i (t - i)_+ w_i` for `t <= n x`. Above the mean it switches to
/// `shift (t - n x) + sum_i (i - t)_+ w_i`, which agrees when `w` is a pmf
/// with mean `n x` (`shift = 1`) or its c-derivative (`shift = 0`), and only
/// touches the short tail.
fn stop_loss_values(w: &[f64], x: f64, shift: f64) -> Vec<f64> {
    let n = w.len() - 1;
    let mean = n as f64 * x;
    (0..=n)
        .map(|t| {
            let tf = t as f64;
            if tf <= mean {
                (0..=t).map(|i| (t - i) as f64 * w[i]).sum()
            } else {
                let upper: f64 = (t + 1..=n).map(|i| (i - t) as f64 * w[i]).sum();
                shift * (tf - mean) + upper
            }
        })
        .collect()
}

/// `d/dc E((t - X)_+)` at integer `t`, from the analytic pmf derivative.
pub fn stop_loss_dc(params: &StandardParams) -> Result<Vec<f64>> {
    let dp = pmf_dc(params)?;
    Ok(stop_loss_values(&dp, params.x(), 0.0))
}

/// Smallest value of a check together with where it was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub value: f64,
    /// Breakpoint `t` (convex order) or index into the c grid of the left
    /// end of the worst consecutive pair.
    pub at: usize,
}

/// `min_t (SL_{c2}(t) - SL_{c1}(t))`; nonnegative iff `X(c1) <=cx X(c2)`.
pub fn check_convex_order(n: usize, x: f64, c1: f64, c2: f64) -> Result<Margin> {
    if c2 < c1 {
        return Err(PolyaError::InvalidGrid(format!(
            "need c1 <= c2, got c1 = {c1}, c2 = {c2}"
        )));
    }
    let lo = stop_loss(&StandardParams::new(n, x, c1)?);
    let hi = stop_loss(&StandardParams::new(n, x, c2)?);
    Ok(min_with_index(
        hi.values.iter().zip(&lo.values).map(|(h, l)| h - l),
    ))
}

/// Smallest `d/dc E((t - X)_+)` over the breakpoints at an interior `c`.
pub fn check_stop_loss_derivative(params: &StandardParams) -> Result<Margin> {
    Ok(min_with_index(stop_loss_dc(params)?.into_iter()))
}

fn min_with_index(values: impl Iterator<Item = f64>) -> Margin {
    values.enumerate().fold(
        Margin {
            value: f64::INFINITY,
            at: 0,
        },
        |best, (i, v)| {
            if v < best.value {
                Margin { value: v, at: i }
            } else {
                best
            }
        },
    )
}

/// `S_k(c) = sum_{i<=k} (x - i/n) p_i`, evaluated through its closed form
/// `(k+1) p_{k+1} (1 - x + (n-k-1)c) / n`, which avoids the cancellation of
/// the direct sum when `S_k` is tiny.
pub fn partial_sum(params: &StandardParams, k: usize) -> Result<f64> {
    let n = params.n();
    if k > n {
        return Err(PolyaError::OutOfRange {
            what: "k",
            value: k as i64,
            range: format!("0..={n}"),
        });
    }
    if k == n {
        return Ok(0.0);
    }
    let s = k + 1;
    let pmf = params.pmf();
    let tail = 1.0 - params.x() + (n - s) as f64 * params.c();
    Ok(s as f64 * pmf[s] * tail.max(0.0) / n as f64)
}

/// `S_k(c)` by direct summation.
pub fn partial_sum_direct(params: &StandardParams, k: usize) -> Result<f64> {
    let n = params.n();
    if k > n {
        return Err(PolyaError::OutOfRange {
            what: "k",
            value: k as i64,
            range: format!("0..={n}"),
        });
    }
    let pmf = params.pmf();
    let x = params.x();
    Ok((0..=k).map(|i| (x - i as f64 / n as f64) * pmf[i]).sum())
}

/// Rejects grids that are empty, unsorted, repeat a value, or leave the
/// admissible range.
pub fn validate_grid(n: usize, x: f64, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(PolyaError::InvalidGrid("empty c grid".into()));
    }
    if let Some(w) = grid
        .windows(2)
        .find(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(PolyaError::InvalidGrid(format!(
            "c grid must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    for &c in grid {
        StandardParams::new(n, x, c)?;
    }
    Ok(())
}

/// Smallest consecutive increment `S_k(c_{j+1}) - S_k(c_j)` over the grid.
pub fn check_partial_sum_monotone(n: usize, x: f64, k: usize, grid: &[f64]) -> Result<Margin> {
    validate_grid(n, x, grid)?;
    let sums = grid
        .iter()
        .map(|&c| partial_sum(&StandardParams::new(n, x, c)?, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(consecutive_min(&sums))
}

fn consecutive_min(values: &[f64]) -> Margin {
    if values.len() < 2 {
        return Margin { value: 0.0, at: 0 };
    }
    min_with_index(values.windows(2).map(|w| w[1] - w[0]))
}

/// Whether `B_n f(x) != B_1 f(x)`, decided with a dead zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strictness {
    Expected,
    NotExpected,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorMonotone {
    /// `|P_n^c f(x) - f(x)|` along the grid.
    pub errors: Vec<f64>,
    pub margin: Margin,
    /// `|B_n f(x) - B_1 f(x)|`.
    pub strictness_gap: f64,
    pub strictness: Strictness,
}

impl ErrorMonotone {
    pub fn strict_expected(&self) -> bool {
        self.strictness == Strictness::Expected
    }

    /// Every consecutive increment is positive.
    pub fn strictly_increasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] > w[0])
    }

    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.margin.value >= -tol.margin && (!self.strict_expected() || self.strictly_increasing())
    }
}

pub fn classify_strictness(gap: f64, tol: &Tolerances) -> Strictness {
    if gap > tol.strictness {
        Strictness::Expected
    } else if gap < tol.strictness_floor {
        Strictness::NotExpected
    } else {
        Strictness::Indeterminate
    }
}

/// Error of the Bernstein-Stancu operator along an ascending c grid.
pub fn check_error_monotone(
    f: &TestFunction,
    n: usize,
    x: f64,
    grid: &[f64],
    tol: &Tolerances,
) -> Result<ErrorMonotone> {
    if !f.is_convex {
        return Err(PolyaError::NonConvexFunction(f.id.to_string()));
    }
    validate_grid(n, x, grid)?;
    let errors = grid
        .iter()
        .map(|&c| stancu(f, n, x, c).map(|e| e.error.abs()))
        .collect::<Result<Vec<_>>>()?;
    let gap = (bernstein(f, n, x)?.value - bernstein_linear(f, x)).abs();
    Ok(ErrorMonotone {
        margin: consecutive_min(&errors),
        errors,
        strictness_gap: gap,
        strictness: classify_strictness(gap, tol),
    })
}

/// Ascending grid: the lower end of the admissible range followed by
/// `count - 1` points whose distance to it is geometric, ending at `max`.
/// The first geometric point sits at `1e-3` of the span.
///
/// For `n = 1` the range is unbounded below and `0` takes the place of the
/// lower end.
pub fn auto_grid(n: usize, x: f64, count: usize, max: f64) -> Result<Vec<f64>> {
    const SMALLEST_FRACTION: f64 = 1e-3;
    if count == 0 {
        return Err(PolyaError::InvalidGrid(
            "auto grid needs at least one point".into(),
        ));
    }
    let base = min_replacement(n, x).unwrap_or(0.0);
    if !max.is_finite() || max <= base {
        return Err(PolyaError::InvalidGrid(format!(
            "auto grid maximum {max} must exceed the lower end {base}"
        )));
    }
    let span = max - base;
    let steps = count - 1;
    let mut grid = Vec::with_capacity(count);
    grid.push(base);
    for j in 1..=steps {
        if j == steps {
            grid.push(max);
        } else {
            let exponent = (steps - j) as f64 / (steps - 1) as f64;
            grid.push(base + span * SMALLEST_FRACTION.powf(exponent));
        }
    }
    Ok(grid)
}
