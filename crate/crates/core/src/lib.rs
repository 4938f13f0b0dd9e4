//! Pólya urn distributions with a real replacement parameter, the
//! Bernstein / Bernstein-Stancu / `R_n` operators built on them, and
//! numerical checks of their convex ordering in the replacement parameter.
//!
//! ```
//! use polya_order::{lookup, r_n, bernstein, StandardParams};
//!
//! let p = StandardParams::new(2, 0.5, 0.5).unwrap().pmf();
//! assert!(p.probs().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
//!
//! let sq = lookup("sq").unwrap();
//! assert_eq!(r_n(sq, 2, 0.5).unwrap().error, 0.0);
//! assert!((bernstein(sq, 2, 0.5).unwrap().error - 0.125).abs() < 1e-15);
//! ```

pub mod error;
pub mod interlace;
pub mod operators;
pub mod ordering;
pub mod polya;
pub mod sweep;

pub use error::{PolyaError, Result};
pub use interlace::{
    build_partition, parse_rational, phi, phi_chain, verify_claim1, Claim1, InterlacePartition,
    PhiChain, Rational,
};
pub use operators::{
    apply_general, bernstein, bernstein_direct, bernstein_linear, lookup, nonlinear_convex, r_n,
    registry, stancu, OperatorEval, OperatorKind, TestFunction,
};
pub use ordering::{
    auto_grid, check_convex_order, check_error_monotone, check_partial_sum_monotone,
    check_stop_loss_derivative, partial_sum, partial_sum_direct, stop_loss, stop_loss_dc,
    ErrorMonotone, Margin, StopLossCurve, Strictness, Tolerances,
};
pub use polya::{
    binomial, brute_force_pmf, brute_force_pmf_exact, check_kozniewska_identity,
    kozniewska_residuals, min_replacement, partial_centered_moment, partial_centered_moment_closed,
    pmf, pmf_dc, pmf_direct, pmf_log_space, rising_factorial, Pmf, PolyaParams, StandardParams,
};
pub use sweep::{
    parse_csv, run_sweep, run_sweep_with_threads, write_csv, CellRecord, CheckKind, SweepConfig,
    SweepReport,
};
