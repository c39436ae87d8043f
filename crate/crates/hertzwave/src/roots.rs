//! Safeguarded scalar root finding: bisection brackets with Newton polish.
//!
//! All root problems in this crate are smooth scalar equations on a known
//! sign-changing bracket, so a plain safeguarded Newton iteration — take the
//! Newton step when it stays inside the current bracket and shrinks the
//! residual, otherwise bisect — is both robust and quadratically convergent
//! near the root.

use thiserror::Error;

/// Iteration cap for [`solve`]; generous because bisection alone needs at
/// most ~60 steps to reach machine width on any sane bracket.
pub const MAX_ITER: usize = 200;

/// Default absolute tolerance on the root location.
pub const X_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root iteration produced a non-finite value near x = {x}")]
    NonFinite { x: f64 },
    #[error("root iteration hit the {max_iter}-step limit; best estimate {x} with residual {fx}")]
    IterationLimit { x: f64, fx: f64, max_iter: usize },
}

/// Solves `f(x) = 0` on the bracket `[lo, hi]`, which must straddle a sign
/// change. `df` is the derivative used for Newton steps. Converges to the
/// requested absolute tolerance on `x`, then polishes with two further
/// Newton steps so the returned root is accurate to rounding whenever `f`
/// is well conditioned.
pub fn solve(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    x_tol: f64,
) -> Result<f64, RootError> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(RootError::NonFinite { x: if f_lo.is_finite() { hi } else { lo } });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoBracket { lo, hi, f_lo, f_hi });
    }

    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for _ in 0..MAX_ITER {
        if !fx.is_finite() {
            return Err(RootError::NonFinite { x });
        }
        if fx == 0.0 {
            break;
        }
        // Shrink the bracket around the sign change.
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= x_tol {
            break;
        }
        // Prefer the Newton step when it lands strictly inside the bracket.
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        fx = f(x);
    }
    if hi - lo > x_tol && fx != 0.0 {
        return Err(RootError::IterationLimit { x, fx, max_iter: MAX_ITER });
    }

    // Newton polish: from inside a converged bracket two steps reach the
    // limits of double precision when f' is bounded away from zero.
    for _ in 0..2 {
        let d = df(x);
        if d == 0.0 {
            break;
        }
        let next = x - f(x) / d;
        if next.is_finite() && next >= lo - x_tol && next <= hi + x_tol {
            x = next;
        } else {
            break;
        }
    }
    Ok(x)
}

/// Doubles `hi` (starting from `hi0 > lo`) until `f` changes sign relative
/// to `f(lo)`, returning the expanded upper bound. Used for brackets whose
/// upper end is only known to exist because `f` eventually dominates.
pub fn expand_upper(f: impl Fn(f64) -> f64, lo: f64, hi0: f64) -> Result<f64, RootError> {
    let f_lo = f(lo);
    let mut hi = hi0.max(lo * (1.0 + 1e-12) + 1e-300);
    for _ in 0..MAX_ITER {
        let f_hi = f(hi);
        if !f_hi.is_finite() {
            return Err(RootError::NonFinite { x: hi });
        }
        if f_hi == 0.0 || f_hi.signum() != f_lo.signum() {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(RootError::NoBracket { lo, hi, f_lo, f_hi: f(hi) })
}
