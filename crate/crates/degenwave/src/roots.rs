//! Monotone root finding: bracketed bisection followed by a short Newton polish.

use crate::error::{Error, Result};

/// Solve f(x) = 0 for increasing `f` on [lo, hi] (f(lo) <= 0 <= f(hi)).
/// Bisection to a coarse bracket, then at most `newton_steps` Newton steps with
/// derivative `df`, falling back to the bisection midpoint when Newton leaves
/// the bracket.
pub fn bisect_newton<F, D>(
    f: &F,
    df: &D,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    newton_steps: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::Domain(format!(
            "root not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    // Bisection until the bracket is small enough for Newton to be safe.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-3 * rel_tol.max(1e-14) * mid.abs().max(1.0) + f64::MIN_POSITIVE {
            break;
        }
        let fm = f(mid);
        if fm <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 64.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..newton_steps {
        let fx = f(x);
        let d = df(x);
        if d == 0.0 {
            break;
        }
        let step = fx / d;
        let next = x - step;
        x = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if step.abs() <= rel_tol * x.abs().max(1e-300) {
            break;
        }
    }
    Ok(x)
}

/// Expand `hi` by doubling (starting from `lo + init_step`) until `f(hi) >= target`,
/// capped at `max_hi`. Returns the bracket (lo2, hi) with f(lo2) < target <= f(hi).
pub fn expand_upper<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    init_step: f64,
    target: f64,
    max_hi: f64,
) -> Result<(f64, f64)> {
    let mut prev = lo;
    let mut step = init_step.max(f64::MIN_POSITIVE);
    loop {
        let hi = (prev + step).min(max_hi);
        if f(hi) >= target {
            return Ok((prev, hi));
        }
        if hi >= max_hi {
            return Err(Error::Horizon {
                what: format!("target {target} not reached by {max_hi}"),
                t: max_hi,
            });
        }
        prev = hi;
        step *= 2.0;
    }
}
