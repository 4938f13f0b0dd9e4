//! Positive linear operators built on the Pólya pmf:
//!
//! ```text
//! P_n^{a,b,c}(f; x) = sum_k f(k/n) p_{n,k}^{a,b,c}
//! ```
//!
//! The Bernstein operator is the member `(x, 1-x, 0)`, the Bernstein-Stancu
//! operator `(x, 1-x, c)`, and `R_n` the Bernstein-Stancu operator at the
//! smallest admissible `c = -min(x, 1-x)/(n-1)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{PolyaError, Result};
use crate::polya::{binomial, min_replacement, PolyaParams};

/// A named real function on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    pub id: &'static str,
    pub description: &'static str,
    pub eval: fn(f64) -> f64,
    /// `excess(t, x) = f(t) - f(x) - s (t - x)` for a fixed (sub)gradient `s`
    /// at `x`, evaluated without cancellation. Nonnegative for convex `f`.
    pub excess: fn(f64, f64) -> f64,
    pub is_convex: bool,
}

impl TestFunction {
    pub const fn new(
        id: &'static str,
        description: &'static str,
        eval: fn(f64) -> f64,
        excess: fn(f64, f64) -> f64,
        is_convex: bool,
    ) -> Self {
        Self {
            id,
            description,
            eval,
            excess,
            is_convex,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn excess(&self, t: f64, x: f64) -> f64 {
        (self.excess)(t, x)
    }

    /// Midpoint convexity over all pairs of a 101-point grid on `[0, 1]`.
    pub fn midpoint_convex_on_grid(&self) -> bool {
        const TOL: f64 = 1e-12;
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        grid.iter().enumerate().all(|(i, &u)| {
            grid[i..]
                .iter()
                .all(|&v| self.at(0.5 * (u + v)) <= 0.5 * (self.at(u) + self.at(v)) + TOL)
        })
    }
}

fn square(t: f64) -> f64 {
    t * t
}

fn square_excess(t: f64, x: f64) -> f64 {
    (t - x) * (t - x)
}

fn abs_half(t: f64) -> f64 {
    (t - 0.5).abs()
}

// Subgradient +1 at the kink.
fn abs_half_excess(t: f64, x: f64) -> f64 {
    if (t < 0.5) == (x < 0.5) {
        0.0
    } else {
        2.0 * (t - 0.5).abs()
    }
}

fn exponential(t: f64) -> f64 {
    t.exp()
}

fn exponential_excess(t: f64, x: f64) -> f64 {
    let d = t - x;
    x.exp() * (d.exp_m1() - d)
}

fn neg_log(t: f64) -> f64 {
    -(t + 0.1).ln()
}

fn neg_log_excess(t: f64, x: f64) -> f64 {
    let u = (t - x) / (x + 0.1);
    u - u.ln_1p()
}

fn hinge(t: f64) -> f64 {
    (t - 0.3).max(0.0)
}

// Subgradient 1 at the kink.
fn hinge_excess(t: f64, x: f64) -> f64 {
    match (t < 0.3, x < 0.3) {
        (true, false) => 0.3 - t,
        (false, true) => t - 0.3,
        _ => 0.0,
    }
}

fn cube(t: f64) -> f64 {
    t * t * t
}

fn cube_excess(t: f64, x: f64) -> f64 {
    (t - x) * (t - x) * (t + 2.0 * x)
}

fn sine(t: f64) -> f64 {
    (2.0 * std::f64::consts::PI * t).sin()
}

fn sine_excess(t: f64, x: f64) -> f64 {
    use std::f64::consts::TAU;
    sine(t) - sine(x) - TAU * (TAU * x).cos() * (t - x)
}

fn identity(t: f64) -> f64 {
    t
}

fn constant(_: f64) -> f64 {
    1.0
}

fn affine_excess(_: f64, _: f64) -> f64 {
    0.0
}

static REGISTRY: [TestFunction; 9] = [
    TestFunction::new("sq", "t^2", square, square_excess, true),
    TestFunction::new("abshalf", "|t - 1/2|", abs_half, abs_half_excess, true),
    TestFunction::new("exp", "exp(t)", exponential, exponential_excess, true),
    TestFunction::new("neglog", "-log(t + 0.1)", neg_log, neg_log_excess, true),
    TestFunction::new("hinge", "max(0, t - 0.3)", hinge, hinge_excess, true),
    TestFunction::new("cube", "t^3", cube, cube_excess, true),
    TestFunction::new("sin", "sin(2 pi t)", sine, sine_excess, false),
    TestFunction::new("id", "t", identity, affine_excess, true),
    TestFunction::new("one", "1", constant, affine_excess, true),
];

/// Every registered function, in a fixed order.
pub fn registry() -> &'static [TestFunction] {
    &REGISTRY
}

/// The six nonlinear convex registry members.
pub fn nonlinear_convex() -> &'static [TestFunction] {
    &REGISTRY[..6]
}

pub fn lookup(id: &str) -> Result<&'static TestFunction> {
    REGISTRY
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| PolyaError::UnknownFunction(id.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    General,
    Bernstein,
    Stancu,
    Rn,
}

impl OperatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OperatorKind::General => "general",
            OperatorKind::Bernstein => "bernstein",
            OperatorKind::Stancu => "stancu",
            OperatorKind::Rn => "rn",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = PolyaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(OperatorKind::General),
            "bernstein" => Ok(OperatorKind::Bernstein),
            "stancu" => Ok(OperatorKind::Stancu),
            "rn" | "r_n" => Ok(OperatorKind::Rn),
            other => Err(PolyaError::InvalidParams(format!(
                "unknown operator `{other}` (expected general, bernstein, stancu or rn)"
            ))),
        }
    }
}

/// One operator evaluation `P(f; x)` with its signed error `P(f; x) - f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorEval {
    pub op: OperatorKind,
    pub n: usize,
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub value: f64,
    pub error: f64,
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(PolyaError::InvalidParams(format!(
            "x = {x} must lie in [0, 1]"
        )))
    }
}

fn evaluate(
    op: OperatorKind,
    f: &TestFunction,
    n: usize,
    x: f64,
    a: f64,
    b: f64,
    c: f64,
) -> Result<OperatorEval> {
    check_x(x)?;
    let pmf = PolyaParams::new(n, a, b, c)?.pmf();
    let value = pmf.expect(f.eval);
    // With mean `x` the error is `E excess(X/n, x)`, a sum of terms of one
    // sign for convex `f`.
    let error = if op == OperatorKind::General {
        value - f.at(x)
    } else {
        pmf.expect(|t| f.excess(t, x))
    };
    Ok(OperatorEval {
        op,
        n,
        x,
        a,
        b,
        c,
        value,
        error,
    })
}

/// `sum_k f(k/n) p_{n,k}^{a,b,c}` evaluated at the point `x`.
pub fn apply_general(
    f: &TestFunction,
    n: usize,
    x: f64,
    a: f64,
    b: f64,
    c: f64,
) -> Result<OperatorEval> {
    evaluate(OperatorKind::General, f, n, x, a, b, c)
}

/// `B_n(f; x)`.
pub fn bernstein(f: &TestFunction, n: usize, x: f64) -> Result<OperatorEval> {
    evaluate(OperatorKind::Bernstein, f, n, x, x, 1.0 - x, 0.0)
}

/// `B_n(f; x)` from the textbook sum `f(k/n) C(n,k) x^k (1-x)^(n-k)`.
pub fn bernstein_direct(f: &TestFunction, n: usize, x: f64) -> f64 {
    (0..=n)
        .map(|k| {
            f.at(k as f64 / n as f64)
                * binomial(n, k)
                * x.powi(k as i32)
                * (1.0 - x).powi((n - k) as i32)
        })
        .sum()
}

/// `B_1(f; x) = f(0)(1-x) + f(1)x`.
pub fn bernstein_linear(f: &TestFunction, x: f64) -> f64 {
    f.at(0.0) * (1.0 - x) + f.at(1.0) * x
}

fn require_n2(n: usize) -> Result<()> {
    if n < 2 {
        return Err(PolyaError::OutOfRange {
            what: "n",
            value: n as i64,
            range: "2..".into(),
        });
    }
    Ok(())
}

/// Bernstein-Stancu `P_n^c(f; x)`.
pub fn stancu(f: &TestFunction, n: usize, x: f64, c: f64) -> Result<OperatorEval> {
    require_n2(n)?;
    evaluate(OperatorKind::Stancu, f, n, x, x, 1.0 - x, c)
}

/// `R_n(f; x)`: Bernstein-Stancu at `c = -min(x, 1-x)/(n-1)`.
pub fn r_n(f: &TestFunction, n: usize, x: f64) -> Result<OperatorEval> {
    require_n2(n)?;
    check_x(x)?;
    let c = min_replacement(n, x).expect("n >= 2");
    evaluate(OperatorKind::Rn, f, n, x, x, 1.0 - x, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> &'static TestFunction {
        lookup("sq").unwrap()
    }

    #[test]
    fn registry_convexity_flags_hold() {
        for f in registry() {
            assert_eq!(f.midpoint_convex_on_grid(), f.is_convex, "{}", f.id);
        }
        assert_eq!(nonlinear_convex().len(), 6);
        assert!(nonlinear_convex().iter().all(|f| f.is_convex));
        assert!(matches!(
            lookup("nope"),
            Err(PolyaError::UnknownFunction(_))
        ));
    }

    #[test]
    fn excess_matches_definition() {
        let h = 1e-7;
        let points = [0.0, 0.05, 0.2, 0.45, 0.55, 0.7, 0.95, 1.0];
        for f in registry() {
            for &x in &[0.1, 0.37, 0.62, 0.9] {
                let slope = (f.at(x + h) - f.at(x - h)) / (2.0 * h);
                for &t in &points {
                    let direct = f.at(t) - f.at(x) - slope * (t - x);
                    let e = f.excess(t, x);
                    assert!(
                        (e - direct).abs() < 1e-7,
                        "{} t={t} x={x}: {e} vs {direct}",
                        f.id
                    );
                    if f.is_convex {
                        assert!(e >= 0.0, "{} t={t} x={x}", f.id);
                    }
                }
            }
        }
    }

    #[test]
    fn error_agrees_with_value_minus_f() {
        for f in registry() {
            for &(n, x, c) in &[(5, 0.3, 0.2), (12, 0.81, -0.01), (40, 0.5, 1.5)] {
                let e = stancu(f, n, x, c).unwrap();
                assert!((e.error - (e.value - f.at(x))).abs() < 1e-13, "{}", f.id);
            }
        }
        let hinge = lookup("hinge").unwrap();
        let e = r_n(hinge, 23, 0.95).unwrap();
        assert!(e.error > 0.0 && e.error < 1e-18, "{}", e.error);
    }

    #[test]
    fn general_examples() {
        let e = apply_general(sq(), 2, 0.5, 0.5, 0.5, 0.5).unwrap();
        assert!((e.value - 5.0 / 12.0).abs() < 1e-15);
        let id = lookup("id").unwrap();
        let e = apply_general(id, 9, 0.37, 0.37, 0.63, 0.8).unwrap();
        assert!((e.value - 0.37).abs() < 1e-13);
        let one = lookup("one").unwrap();
        let e = apply_general(one, 9, 0.37, 0.37, 0.63, 0.8).unwrap();
        assert!((e.value - 1.0).abs() < 1e-13);
        assert!(apply_general(one, 3, 0.5, 0.5, 0.5, -0.3).is_err());
    }

    #[test]
    fn bernstein_examples() {
        let e = bernstein(sq(), 2, 0.5).unwrap();
        assert!((e.value - 0.375).abs() < 1e-15);
        assert!((e.error - 0.125).abs() < 1e-15);
        assert!((bernstein(sq(), 1, 0.5).unwrap().value - 0.5).abs() < 1e-15);
        let id = lookup("id").unwrap();
        assert!((bernstein(id, 7, 0.3).unwrap().value - 0.3).abs() < 1e-15);
        assert!(bernstein(id, 7, 1.2).is_err());
    }

    #[test]
    fn stancu_examples() {
        assert!((stancu(sq(), 2, 0.5, 0.5).unwrap().value - 5.0 / 12.0).abs() < 1e-15);
        let e = stancu(sq(), 2, 0.5, -0.5).unwrap();
        assert_eq!((e.value, e.error), (0.25, 0.0));
        assert!(stancu(sq(), 1, 0.5, 0.0).is_err());
        assert!(stancu(sq(), 3, 0.5, -0.3).is_err());
    }

    #[test]
    fn r_n_examples() {
        let e = r_n(sq(), 2, 0.5).unwrap();
        assert_eq!((e.value, e.error), (0.25, 0.0));
        let id = lookup("id").unwrap();
        assert!((r_n(id, 5, 0.2).unwrap().value - 0.2).abs() < 1e-15);
        // c = -1/8: p = (10, 15, 3, 0)/28 by hand, value (15/9 + 3*4/9)/28 = 3/28
        let e = r_n(sq(), 3, 0.25).unwrap();
        assert!((e.c + 0.125).abs() < 1e-17);
        assert!((e.value - 3.0 / 28.0).abs() < 1e-15, "{}", e.value);
        assert!(e.value < bernstein(sq(), 3, 0.25).unwrap().value);
    }

    #[test]
    fn endpoints_interpolate() {
        for f in registry() {
            for n in [2usize, 5, 40] {
                for x in [0.0, 1.0] {
                    assert_eq!(bernstein(f, n, x).unwrap().value, f.at(x), "{}", f.id);
                    assert_eq!(r_n(f, n, x).unwrap().value, f.at(x), "{}", f.id);
                    assert_eq!(stancu(f, n, x, 2.0).unwrap().value, f.at(x), "{}", f.id);
                }
            }
        }
    }

    #[test]
    fn operator_names_round_trip() {
        for op in [
            OperatorKind::General,
            OperatorKind::Bernstein,
            OperatorKind::Stancu,
            OperatorKind::Rn,
        ] {
            assert_eq!(op.as_str().parse::<OperatorKind>().unwrap(), op);
        }
        assert!("lagrange".parse::<OperatorKind>().is_err());
    }
}
