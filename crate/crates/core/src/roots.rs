//! Scalar root finding: safeguarded Newton with a guaranteed bisection
//! fallback on a sign-changing bracket.
//!
//! The retardation solves in this crate are all of the form g(t) = 0 with g
//! strictly increasing (g' = 1 ± L' > 0 for a subluminal mirror), so once a
//! bracket is found the bisection fallback cannot fail and Newton only
//! accelerates it.

use crate::error::{CavityError, Result};

/// Outcome of a converged root solve.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub x: f64,
    /// Function value at `x` (the accepted residual).
    pub f: f64,
    pub iterations: u32,
}

const MAX_ITER: u32 = 200;

/// Solve f(x) = 0 on a bracket `[lo, hi]` with f(lo) <= 0 <= f(hi).
///
/// `f` returns the pair (value, derivative). Newton steps are taken from the
/// current iterate and rejected in favour of bisection whenever they leave
/// the bracket or the derivative vanishes. Convergence is declared when
/// |f(x)| <= tol_f or the bracket collapses to machine width.
pub fn newton_bisection(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    tol_f: f64,
) -> Result<RootResult> {
    debug_assert!(lo <= hi);
    let mut x = x0.clamp(lo, hi);
    let mut best_x = x;
    let mut best_f = f64::INFINITY;

    for it in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(CavityError::RootNoConverge(format!(
                "non-finite function value at x = {x}"
            )));
        }
        if fx.abs() < best_f.abs() {
            best_f = fx;
            best_x = x;
        }
        if fx.abs() <= tol_f {
            return Ok(RootResult {
                x,
                f: fx,
                iterations: it,
            });
        }
        // shrink the bracket with the sign of fx (f increasing)
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        // bracket exhausted at machine resolution: accept the best point seen
        if hi - lo <= f64::EPSILON * (lo.abs().max(hi.abs()).max(1.0)) {
            return Ok(RootResult {
                x: best_x,
                f: best_f,
                iterations: it,
            });
        }
    }
    Err(CavityError::RootNoConverge(format!(
        "residual {best_f:.3e} after {MAX_ITER} iterations (tolerance {tol_f:.3e})"
    )))
}

/// Grow a sign-changing bracket for an increasing function, starting from
/// `start` and expanding geometrically with initial `step`.
///
/// `domain`, when given, clips the search; failing to bracket inside it is
/// reported as a bracketing error (the trajectory is undefined beyond it).
pub fn grow_bracket(
    f: impl Fn(f64) -> f64,
    start: f64,
    step: f64,
    domain: Option<(f64, f64)>,
) -> Result<(f64, f64)> {
    debug_assert!(step > 0.0);
    let clamp = |x: f64| match domain {
        Some((a, b)) => x.clamp(a, b),
        None => x,
    };
    let x0 = clamp(start);
    let f0 = f(x0);
    if f0 == 0.0 {
        return Ok((x0, x0));
    }
    let mut s = step;
    let (mut a, mut fa) = (x0, f0);
    for _ in 0..64 {
        // increasing f: negative values move right, positive move left
        let b = clamp(if fa < 0.0 { a + s } else { a - s });
        let fb = f(b);
        if !fb.is_finite() {
            return Err(CavityError::Bracketing(format!(
                "non-finite function value at t = {b}"
            )));
        }
        if fa.signum() != fb.signum() || fb == 0.0 {
            return Ok(if a < b { (a, b) } else { (b, a) });
        }
        if b == a {
            // clipped against the domain edge without a sign change
            return Err(CavityError::Bracketing(format!(
                "no sign change before domain edge at t = {b}"
            )));
        }
        a = b;
        fa = fb;
        s *= 2.0;
    }
    Err(CavityError::Bracketing(format!(
        "no sign change within {} expansions from t = {start}",
        64
    )))
}
