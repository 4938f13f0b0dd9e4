//! Interlacing partition of `{1, ..., n-1}` and the φ-sum inequality it
//! drives.
//!
//! For `0 < x < 1`, `n >= 3` and `1 <= k <= n-2` the set `{1, ..., n-1}`
//! splits into `n_1..n_k` and `m_1..m_{n-k-1}` with `n_i <= i/x` and
//! `m_i <= i/(1-x)`. The construction works on exact rationals because its
//! tie rules distinguish `i/x` landing exactly on an integer.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{PolyaError, Result};
use crate::polya::{min_replacement, INTERIOR_MARGIN};

/// Exact fraction in lowest terms with positive denominator.
pub type Rational = Ratio<i64>;

/// Parses `p/q` (or a bare integer) into a [`Rational`].
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || PolyaError::InvalidX(format!("`{s}` is not a fraction p/q"));
    let (num, den) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Output of [`build_partition`]: the final sequences and the raw values
/// before out-of-range entries were remapped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterlacePartition {
    pub n_seq: Vec<i64>,
    pub m_seq: Vec<i64>,
    pub raw_n: Vec<i64>,
    pub raw_m: Vec<i64>,
}

impl InterlacePartition {
    /// Size `n` of the underlying index set `{1, ..., n-1}`.
    pub fn n(&self) -> usize {
        self.n_seq.len() + self.m_seq.len() + 1
    }

    pub fn k(&self) -> usize {
        self.n_seq.len()
    }

    /// The remapping as `(raw value, slot)` pairs, ascending.
    pub fn remap(&self) -> Vec<(i64, i64)> {
        let raw = self.raw_n.iter().chain(&self.raw_m);
        let fin = self.n_seq.iter().chain(&self.m_seq);
        let mut pairs: Vec<_> = raw
            .zip(fin)
            .filter(|(r, f)| r != f)
            .map(|(r, f)| (*r, *f))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// Whether `n_seq` and `m_seq` together are exactly `{1, ..., n-1}`.
    pub fn is_partition(&self) -> bool {
        let n = self.n() as i64;
        let mut all: Vec<i64> = self.n_seq.iter().chain(&self.m_seq).copied().collect();
        all.sort_unstable();
        all.iter().copied().eq(1..n)
    }

    /// Smallest slack over `i/x - n_i` and `i/(1-x) - m_i`; nonnegative iff
    /// every bound holds.
    pub fn min_slack(&self, x: Rational) -> Rational {
        fn slack(seq: &[i64], w: Rational) -> impl Iterator<Item = Rational> + '_ {
            seq.iter()
                .enumerate()
                .map(move |(i, v)| Rational::from_integer(i as i64 + 1) / w - v)
        }
        let y = Rational::one() - x;
        slack(&self.n_seq, x)
            .chain(slack(&self.m_seq, y))
            .min()
            .unwrap_or_else(Rational::zero)
    }

    pub fn bounds_hold(&self, x: Rational) -> bool {
        self.min_slack(x) >= Rational::zero()
    }
}

/// Builds the interlacing partition.
///
/// Raw values: `n_i' = j` for `i/x ∈ (j, j+1]` and `m_i' = j` for
/// `i/(1-x) ∈ (j, j+1)`, except `m_i' = i/(1-x)` when that is an integer.
/// Raw values above `n-1` are sent to the unused slots of `{1, ..., n-1}`,
/// pairing both sides in ascending order.
pub fn build_partition(n: usize, k: usize, x: Rational) -> Result<InterlacePartition> {
    if n < 3 {
        return Err(PolyaError::OutOfRange {
            what: "n",
            value: n as i64,
            range: "3..".into(),
        });
    }
    if k < 1 || k > n - 2 {
        return Err(PolyaError::OutOfRange {
            what: "k",
            value: k as i64,
            range: format!("1..={}", n - 2),
        });
    }
    if x <= Rational::zero() || x >= Rational::one() {
        return Err(PolyaError::InvalidX(x.to_string()));
    }
    let y = Rational::one() - x;
    let raw_n: Vec<i64> = (1..=k as i64)
        .map(|i| (Rational::from_integer(i) / x).ceil().to_integer() - 1)
        .collect();
    let raw_m: Vec<i64> = (1..=(n - k - 1) as i64)
        .map(|i| (Rational::from_integer(i) / y).floor().to_integer())
        .collect();

    let top = n as i64 - 1;
    let mut seen = BTreeSet::new();
    for &v in raw_n.iter().chain(&raw_m) {
        if !seen.insert(v) {
            return Err(PolyaError::InterlaceTie {
                n,
                k,
                x: x.to_string(),
                value: v,
            });
        }
    }
    let overflow: Vec<i64> = seen.iter().copied().filter(|&v| v > top).collect();
    let free: Vec<i64> = (1..=top).filter(|v| !seen.contains(v)).collect();
    // distinct raw values are all >= 1, so the counts match
    debug_assert_eq!(overflow.len(), free.len());
    let remap: BTreeMap<i64, i64> = overflow.into_iter().zip(free).collect();
    let settle = |v: &i64| remap.get(v).copied().unwrap_or(*v);

    Ok(InterlacePartition {
        n_seq: raw_n.iter().map(settle).collect(),
        m_seq: raw_m.iter().map(settle).collect(),
        raw_n,
        raw_m,
    })
}

/// Both sides of the log-derivative inequality
/// `sum_{i<=k} i/(x+ic) + sum_{i<n-k} i/(1-x+ic) > sum_{i<n} i/(1+ic)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claim1 {
    pub lhs: f64,
    pub rhs: f64,
}

impl Claim1 {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn check_interior(n: usize, x: f64, c: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(PolyaError::InvalidX(x.to_string()));
    }
    let min_c = min_replacement(n, x).expect("n >= 2");
    if !c.is_finite() || c < min_c + INTERIOR_MARGIN {
        return Err(PolyaError::BoundaryParams {
            c,
            min: min_c,
            margin: INTERIOR_MARGIN,
        });
    }
    Ok(())
}

/// Evaluates both sides of the inequality at an interior point.
pub fn verify_claim1(n: usize, k: usize, x: f64, c: f64) -> Result<Claim1> {
    if n < 2 {
        return Err(PolyaError::OutOfRange {
            what: "n",
            value: n as i64,
            range: "2..".into(),
        });
    }
    if k > n - 1 {
        return Err(PolyaError::OutOfRange {
            what: "k",
            value: k as i64,
            range: format!("0..={}", n - 1),
        });
    }
    check_interior(n, x, c)?;
    let term = |base: f64, i: usize| i as f64 / (base + i as f64 * c);
    let lhs = (0..=k).map(|i| term(x, i)).sum::<f64>()
        + (0..n - k).map(|i| term(1.0 - x, i)).sum::<f64>();
    let rhs = (0..n).map(|i| term(1.0, i)).sum();
    Ok(Claim1 { lhs, rhs })
}

/// `u / (1 + u c)`, increasing wherever `1 + u c > 0`.
pub fn phi(u: f64, c: f64) -> f64 {
    u / (1.0 + u * c)
}

/// The chain `Σφ(i/x) + Σφ(i/(1-x)) >= Σφ(n_i) + Σφ(m_i) = Σ_{i<n} φ(i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiChain {
    /// `Σ_{i<=k} φ(i/x) + Σ_{i<n-k} φ(i/(1-x))`.
    pub upper: f64,
    /// `Σ φ(n_i) + Σ φ(m_i)` over the built partition.
    pub partition: f64,
    /// `Σ_{i=1}^{n-1} φ(i)`.
    pub base: f64,
    /// Every term satisfies `φ(n_i) <= φ(i/x)` and `φ(m_i) <= φ(i/(1-x))`.
    pub termwise: bool,
}

impl PhiChain {
    pub fn margin(&self) -> f64 {
        self.upper - self.base
    }
}

pub fn phi_chain(n: usize, k: usize, x: Rational, c: f64) -> Result<PhiChain> {
    let part = build_partition(n, k, x)?;
    let xf = x.to_f64().expect("small rational");
    check_interior(n, xf, c)?;
    let y = Rational::one() - x;
    let mut upper = 0.0;
    let mut partition = 0.0;
    let mut termwise = true;
    for (seq, w) in [(&part.n_seq, x), (&part.m_seq, y)] {
        for (i, &v) in seq.iter().enumerate() {
            let bound = (Rational::from_integer(i as i64 + 1) / w)
                .to_f64()
                .expect("small rational");
            let hi = phi(bound, c);
            let lo = phi(v as f64, c);
            termwise &= lo <= hi;
            upper += hi;
            partition += lo;
        }
    }
    let base = (1..n).map(|i| phi(i as f64, c)).sum();
    Ok(PhiChain {
        upper,
        partition,
        base,
        termwise,
    })
}
