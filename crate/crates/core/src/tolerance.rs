//! Global comparison tolerances.
//!
//! Every real comparison in the crate goes through [`approx_eq`],
//! [`approx_le`] or [`approx_ge`]. The defaults can be overridden once per
//! process (the CLI does this from environment variables).

use std::sync::OnceLock;

use serde::Serialize;

/// Default absolute tolerance for real comparisons.
pub const ABS_TOL: f64 = 1e-9;
/// Default relative tolerance for real comparisons.
pub const REL_TOL: f64 = 1e-6;

/// Tolerance used when a solver-based model quantity is compared.
pub const SOLVER_TOL: f64 = 1e-6;

/// Active tolerance pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: ABS_TOL,
            rel: REL_TOL,
        }
    }
}

static ACTIVE: OnceLock<Tolerances> = OnceLock::new();

/// Installs process-wide tolerances. Returns `false` if tolerances were
/// already fixed (either installed or read).
pub fn install(tol: Tolerances) -> bool {
    ACTIVE.set(tol).is_ok()
}

/// The tolerances in effect.
pub fn current() -> Tolerances {
    *ACTIVE.get_or_init(Tolerances::default)
}

/// Allowed slack when comparing two values of magnitude around `a` and `b`.
#[inline]
pub fn slack(a: f64, b: f64) -> f64 {
    let t = current();
    t.abs.max(t.rel * a.abs().max(b.abs()))
}

#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= slack(a, b)
}

#[inline]
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b || a - b <= slack(a, b)
}

#[inline]
pub fn approx_ge(a: f64, b: f64) -> bool {
    approx_le(b, a)
}

/// Strictly greater beyond tolerance.
#[inline]
pub fn definitely_gt(a: f64, b: f64) -> bool {
    !approx_le(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons_respect_absolute_slack() {
        assert!(approx_eq(1.0, 1.0 + 5e-10));
        assert!(!approx_eq(1.0, 1.0 + 1e-5));
        assert!(approx_eq(1000.0, 1000.0 + 1e-4));
        assert!(approx_le(2.0, 2.0 - 1e-10));
        assert!(definitely_gt(2.0, 1.999));
    }
}
