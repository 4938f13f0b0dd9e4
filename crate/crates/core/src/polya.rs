//! Pólya urn distribution with real masses and real replacement parameter.
//!
//! An urn holds white mass `a` and black mass `b`. After each of `n` draws
//! the drawn colour gains `c` units. `X` counts white draws and
//!
//! ```text
//! P(X = k) = C(n,k) a^(k,c) b^(n-k,c) / (a+b)^(n,c)
//! ```
//!
//! where `x^(m,h) = x (x+h) ... (x+(m-1)h)` is the rising factorial with
//! increment `h`. The distribution is well defined for real `a, b >= 0` as
//! long as `a + (n-1)c >= 0` and `b + (n-1)c >= 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};
use serde::Serialize;

use crate::error::{PolyaError, Result};

/// Above this `n` the pmf is evaluated in log space.
pub const LOG_SPACE_THRESHOLD: usize = 30;

/// Largest negative rounding residue that is silently clamped to zero.
pub const CLAMP_LIMIT: f64 = 1e-15;

/// Largest `n` accepted by the path-enumeration oracles (cost `2^n`).
pub const BRUTE_FORCE_MAX_N: usize = 16;

/// Minimum distance from the lower end of the admissible `c` range required
/// by the derivative kernels.
pub const INTERIOR_MARGIN: f64 = 1e-9;

/// Relative size below which `base + i*c` is treated as an exact zero.
const ZERO_SNAP: f64 = 8.0 * f64::EPSILON;

/// `x (x+h) (x+2h) ... (x+(n-1)h)`; the empty product (`n = 0`) is 1.
pub fn rising_factorial(x: f64, n: usize, h: f64) -> f64 {
    (0..n).map(|i| x + i as f64 * h).product()
}

/// Lower end of the admissible replacement range for the standard urn
/// `(x, 1-x)`: `-min(x, 1-x)/(n-1)`. `None` for `n = 1`, where every real
/// `c` is admissible.
pub fn min_replacement(n: usize, x: f64) -> Option<f64> {
    if n < 2 {
        return None;
    }
    Some(-x.min(1.0 - x) / (n - 1) as f64)
}

/// Urn mass `base + i*c` after `i` reinforcements. Values that are pure
/// cancellation noise relative to their operands snap to an exact zero.
fn urn_factor(base: f64, i: usize, c: f64) -> f64 {
    let step = i as f64 * c;
    let v = base + step;
    if v.abs() <= ZERO_SNAP * (base.abs() + step.abs()) {
        0.0
    } else {
        v
    }
}

/// Compatibility slack `base + (n-1)c`, with values inside rounding noise
/// mapped to zero.
fn compat_slack(base: f64, n: usize, c: f64) -> f64 {
    if n < 2 {
        return base;
    }
    urn_factor(base, n - 1, c)
}

/// Parameters `(n, a, b, c)` of a Pólya urn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyaParams {
    n: usize,
    a: f64,
    b: f64,
    c: f64,
}

impl PolyaParams {
    pub fn new(n: usize, a: f64, b: f64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(PolyaError::InvalidParams("n must be at least 1".into()));
        }
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(PolyaError::InvalidParams(format!(
                "non-finite parameter (a = {a}, b = {b}, c = {c})"
            )));
        }
        if a < 0.0 || b < 0.0 {
            return Err(PolyaError::InvalidParams(format!(
                "masses must be nonnegative (a = {a}, b = {b})"
            )));
        }
        if a + b <= 0.0 {
            return Err(PolyaError::InvalidParams("a + b must be positive".into()));
        }
        if compat_slack(a, n, c) < 0.0 || compat_slack(b, n, c) < 0.0 {
            return Err(PolyaError::InvalidParams(format!(
                "compatibility condition a + (n-1)c >= 0, b + (n-1)c >= 0 fails \
                 (n = {n}, a = {a}, b = {b}, c = {c})"
            )));
        }
        Ok(Self { n, a, b, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `n a / (a + b)`.
    pub fn mean(&self) -> f64 {
        self.n as f64 * self.a / (self.a + self.b)
    }

    pub fn pmf(&self) -> Pmf {
        pmf(self)
    }
}

/// The standard urn `(n, x, 1-x, c)` behind the Bernstein-Stancu operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardParams {
    x: f64,
    urn: PolyaParams,
}

impl StandardParams {
    pub fn new(n: usize, x: f64, c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(PolyaError::InvalidParams(format!(
                "x = {x} must lie in [0, 1]"
            )));
        }
        let urn = PolyaParams::new(n, x, 1.0 - x, c).map_err(|e| match e {
            PolyaError::InvalidParams(_) => PolyaError::InvalidParams(format!(
                "c = {c} below the compatibility bound {} for n = {n}, x = {x}",
                min_replacement(n, x).unwrap_or(f64::NEG_INFINITY)
            )),
            other => other,
        })?;
        Ok(Self { x, urn })
    }

    /// The urn at the smallest admissible replacement (the `R_n` point).
    pub fn minimal(n: usize, x: f64) -> Result<Self> {
        let c = min_replacement(n, x)
            .ok_or_else(|| PolyaError::InvalidParams("minimal replacement needs n >= 2".into()))?;
        Self::new(n, x, c)
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.n(), self.x, c)
    }

    pub fn n(&self) -> usize {
        self.urn.n
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn c(&self) -> f64 {
        self.urn.c
    }

    pub fn min_replacement(&self) -> Option<f64> {
        min_replacement(self.n(), self.x)
    }

    pub fn as_polya(&self) -> &PolyaParams {
        &self.urn
    }

    pub fn pmf(&self) -> Pmf {
        pmf(&self.urn)
    }
}

impl From<StandardParams> for PolyaParams {
    fn from(p: StandardParams) -> Self {
        p.urn
    }
}

/// Probabilities `P(X = k)` for `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    params: PolyaParams,
    probs: Vec<f64>,
    clamped: f64,
}

impl Pmf {
    /// Clamps negative rounding residue to zero and records its magnitude.
    fn from_raw(params: PolyaParams, mut probs: Vec<f64>) -> Self {
        let mut clamped = 0.0_f64;
        for p in probs.iter_mut() {
            if *p < 0.0 {
                clamped = clamped.max(-*p);
                *p = 0.0;
            }
        }
        debug_assert!(clamped <= CLAMP_LIMIT, "clamped {clamped:e}");
        Self {
            params,
            probs,
            clamped,
        }
    }

    pub fn params(&self) -> &PolyaParams {
        &self.params
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// Largest magnitude of a negative entry that was clamped to zero.
    pub fn clamped(&self) -> f64 {
        self.clamped
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// Running sums `P(X <= k)`.
    pub fn cumulative(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// `E f(X/n)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.params.n as f64;
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| f(k as f64 / n) * p)
            .sum()
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.probs[k]
    }
}

/// Binomial coefficient in floating point. Exact while it fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut exact: u128 = 1;
    for i in 1..=k as u128 {
        match exact.checked_mul(n as u128 - k as u128 + i) {
            Some(v) => exact = v / i,
            None => return ln_binomial(n, k).exp(),
        }
    }
    exact as f64
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let direct = binomial_product(n, k);
    if direct.is_finite() {
        return direct.ln();
    }
    let mut acc = NeumaierSum::default();
    for i in 1..=k {
        acc.add(((n - k + i) as f64 / i as f64).ln());
    }
    acc.value()
}

fn binomial_product(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 1..=k {
        v = v * (n - k + i) as f64 / i as f64;
    }
    v
}

#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Evaluates the pmf, in log space when `n > LOG_SPACE_THRESHOLD`.
pub fn pmf(params: &PolyaParams) -> Pmf {
    if params.n > LOG_SPACE_THRESHOLD {
        pmf_log_space(params)
    } else {
        pmf_direct(params)
    }
}

/// Product evaluation, interleaving numerator and denominator factors so
/// every partial product stays bounded.
pub fn pmf_direct(params: &PolyaParams) -> Pmf {
    let &PolyaParams { n, a, b, c } = params;
    let fa: Vec<f64> = (0..n).map(|i| urn_factor(a, i, c)).collect();
    let fb: Vec<f64> = (0..n).map(|i| urn_factor(b, i, c)).collect();
    let fs: Vec<f64> = (0..n).map(|i| urn_factor(a + b, i, c)).collect();
    let probs = (0..=n)
        .map(|k| {
            let mut v = binomial(n, k);
            for i in 0..k {
                v *= fa[i] / fs[i];
            }
            for j in 0..n - k {
                v *= fb[j] / fs[k + j];
            }
            v
        })
        .collect();
    Pmf::from_raw(*params, probs)
}

/// Compensated prefix sums `L[m] = sum_{i<m} ln(ratio(i))` and the index of
/// the first zero ratio, past which the sums stop growing.
fn log_ratio_prefix(len: usize, ratio: impl Fn(usize) -> f64) -> (Vec<f64>, Option<usize>) {
    let mut out = Vec::with_capacity(len + 1);
    let mut acc = NeumaierSum::default();
    let mut first_zero = None;
    out.push(0.0);
    for i in 0..len {
        if first_zero.is_none() {
            let r = ratio(i);
            if r <= 0.0 {
                first_zero = Some(i);
            } else {
                acc.add(r.ln());
            }
        }
        out.push(acc.value());
    }
    (out, first_zero)
}

/// Log-space evaluation. Exact zero factors short-circuit to probability 0.
///
/// `ln p_k = G[k] + A[k] + B[n-k]` with `A` pairing `a + ic` against
/// `a + b + ic`, `B` pairing `b + ic` likewise, and `G` the remaining
/// binomial-like factor built from its ratio recurrence
/// `(n-k)/(k+1) * (a+b+kc) / (a+b+(n-k-1)c)`. Every summand stays moderate,
/// so no large prefix sums are subtracted.
pub fn pmf_log_space(params: &PolyaParams) -> Pmf {
    let &PolyaParams { n, a, b, c } = params;
    let fs: Vec<f64> = (0..n).map(|i| urn_factor(a + b, i, c)).collect();
    let (la, za) = log_ratio_prefix(n, |i| urn_factor(a, i, c) / fs[i]);
    let (lb, zb) = log_ratio_prefix(n, |i| urn_factor(b, i, c) / fs[i]);
    let (lg, _) = log_ratio_prefix(n, |i| {
        (n - i) as f64 / (i + 1) as f64 * (fs[i] / fs[n - 1 - i])
    });
    let kills = |zero: Option<usize>, len: usize| zero.is_some_and(|z| z < len);
    // An empty colour leaves a point mass.
    let point = match (za, zb) {
        (Some(0), _) => Some(0),
        (_, Some(0)) => Some(n),
        _ => None,
    };
    let probs = (0..=n)
        .map(|k| match point {
            Some(m) => f64::from(u8::from(k == m)),
            None if kills(za, k) || kills(zb, n - k) => 0.0,
            None => (lg[k] + la[k] + lb[n - k]).exp(),
        })
        .collect();
    Pmf::from_raw(*params, probs)
}

/// Sums the probability of every one of the `2^n` draw sequences, tracking
/// the urn contents draw by draw. Works over any exact or floating field.
fn enumerate_draws<T: Num + Clone>(n: usize, a: T, b: T, c: T) -> Vec<T> {
    let mut out = vec![T::zero(); n + 1];
    for mask in 0u32..(1u32 << n) {
        let mut white = a.clone();
        let mut black = b.clone();
        let mut prob = T::one();
        let mut successes = 0;
        for t in 0..n {
            let total = white.clone() + black.clone();
            if mask >> t & 1 == 1 {
                prob = prob * white.clone() / total;
                white = white + c.clone();
                successes += 1;
            } else {
                prob = prob * black.clone() / total;
                black = black + c.clone();
            }
            if prob.is_zero() {
                break;
            }
        }
        if !prob.is_zero() {
            out[successes] = out[successes].clone() + prob;
        }
    }
    out
}

/// Path-enumeration oracle for [`pmf`] in `f64`.
pub fn brute_force_pmf(params: &PolyaParams) -> Result<Pmf> {
    let &PolyaParams { n, a, b, c } = params;
    if n > BRUTE_FORCE_MAX_N {
        return Err(PolyaError::SizeLimit {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    Ok(Pmf::from_raw(*params, enumerate_draws(n, a, b, c)))
}

/// Path-enumeration oracle in exact rational arithmetic.
pub fn brute_force_pmf_exact(
    n: usize,
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
) -> Result<Vec<BigRational>> {
    if n > BRUTE_FORCE_MAX_N {
        return Err(PolyaError::SizeLimit {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    if n == 0 {
        return Err(PolyaError::InvalidParams("n must be at least 1".into()));
    }
    let steps = BigRational::from_integer(BigInt::from(n - 1));
    let compat = |m: &BigRational| !(m.clone() + &steps * c).is_negative();
    if a.is_negative() || b.is_negative() || (a + b).is_zero() || !compat(a) || !compat(b) {
        return Err(PolyaError::InvalidParams(format!(
            "rational urn (n = {n}, a = {a}, b = {b}, c = {c}) violates the compatibility condition"
        )));
    }
    Ok(enumerate_draws(n, a.clone(), b.clone(), c.clone()))
}

/// `sum_{k<s} (n x - k) p_k` by direct summation.
pub fn partial_centered_moment(params: &StandardParams, s: usize) -> Result<f64> {
    let n = params.n();
    check_moment_index(n, s)?;
    let pmf = params.pmf();
    let nx = n as f64 * params.x();
    Ok((0..s).map(|k| (nx - k as f64) * pmf[k]).sum())
}

/// Closed form `s p_s (1 - x + (n - s) c)` of the partial centered moment.
pub fn partial_centered_moment_closed(params: &StandardParams, s: usize) -> Result<f64> {
    let n = params.n();
    check_moment_index(n, s)?;
    let pmf = params.pmf();
    Ok(s as f64 * pmf[s] * urn_factor(1.0 - params.x(), n - s, params.c()))
}

/// Absolute gap between the direct partial centered moment and its closed
/// form.
pub fn check_kozniewska_identity(params: &StandardParams, s: usize) -> Result<f64> {
    let direct = partial_centered_moment(params, s)?;
    let closed = partial_centered_moment_closed(params, s)?;
    Ok((direct - closed).abs())
}

/// [`check_kozniewska_identity`] for every `s = 1..=n` from a single pmf.
pub fn kozniewska_residuals(params: &StandardParams) -> Vec<f64> {
    let n = params.n();
    let pmf = params.pmf();
    let nx = n as f64 * params.x();
    let mut direct = 0.0;
    (1..=n)
        .map(|s| {
            direct += (nx - (s - 1) as f64) * pmf[s - 1];
            let closed = s as f64 * pmf[s] * urn_factor(1.0 - params.x(), n - s, params.c());
            (direct - closed).abs()
        })
        .collect()
}

fn check_moment_index(n: usize, s: usize) -> Result<()> {
    if s == 0 || s > n {
        return Err(PolyaError::OutOfRange {
            what: "s",
            value: s as i64,
            range: format!("1..={n}"),
        });
    }
    Ok(())
}

/// Analytic `d p_k / d c` for the standard urn.
///
/// Uses the logarithmic derivative
/// `sum_{i<k} i/(x+ic) + sum_{i<n-k} i/(1-x+ic) - sum_{i<n} i/(1+ic)`.
/// Returns zeros for `n = 1` and for `x` in `{0, 1}`, where the pmf does not
/// depend on `c`.
pub fn pmf_dc(params: &StandardParams) -> Result<Vec<f64>> {
    let n = params.n();
    let x = params.x();
    let c = params.c();
    if n == 1 || x == 0.0 || x == 1.0 {
        return Ok(vec![0.0; n + 1]);
    }
    let min_c = params.min_replacement().expect("n >= 2");
    if c < min_c + INTERIOR_MARGIN {
        return Err(PolyaError::BoundaryParams {
            c,
            min: min_c,
            margin: INTERIOR_MARGIN,
        });
    }
    let log_derivative_prefix = |base: f64| -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for i in 0..n {
            acc += i as f64 / (base + i as f64 * c);
            out.push(acc);
        }
        out
    };
    let da = log_derivative_prefix(x);
    let db = log_derivative_prefix(1.0 - x);
    let ds = log_derivative_prefix(1.0);
    let pmf = params.pmf();
    Ok((0..=n)
        .map(|k| pmf[k] * (da[k] + db[n - k] - ds[n]))
        .collect())
}
