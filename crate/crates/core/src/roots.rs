//! Bracketed scalar root finding shared by the landmark, cylinder and orbit
//! searches: bisection down to a coarse width, then safeguarded Newton.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct RootOptions {
    /// Bisect until the bracket is narrower than this before trying Newton.
    pub coarse_width: f64,
    pub newton_steps: usize,
    /// Accept the root only if `|f(root)|` is at most this.
    pub residual_tol: f64,
}

impl RootOptions {
    pub(crate) fn with_residual(residual_tol: f64) -> Self {
        RootOptions {
            coarse_width: 1e-8,
            newton_steps: 20,
            residual_tol,
        }
    }
}

/// Find a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// Newton steps that leave the current bracket fall back to bisection, so the
/// iterate never escapes. Iteration continues past the residual target until
/// the Newton step stalls at rounding level.
pub(crate) fn solve_bracketed<F, D>(f: F, df: D, lo: f64, hi: f64, opts: RootOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::convergence(format!(
            "no sign change on [{lo}, {hi}] (f={flo}, {fhi})"
        )));
    }

    let shrink = |x: f64, fx: f64, lo: &mut f64, hi: &mut f64, flo: &mut f64| {
        if fx.signum() == flo.signum() {
            *lo = x;
            *flo = fx;
        } else {
            *hi = x;
        }
    };

    for _ in 0..2000 {
        if hi - lo <= opts.coarse_width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        shrink(mid, fm, &mut lo, &mut hi, &mut flo);
    }

    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for _ in 0..opts.newton_steps {
        if fx == 0.0 {
            return Ok(x);
        }
        shrink(x, fx, &mut lo, &mut hi, &mut flo);
        let slope = df(x);
        let mut next = x - fx / slope;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        fx = f(x);
        if step <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    if fx.abs() > opts.residual_tol {
        // Newton stalled (flat or noisy f): finish by plain bisection.
        for _ in 0..2000 {
            shrink(x, fx, &mut lo, &mut hi, &mut flo);
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            x = mid;
            fx = f(x);
            if fx == 0.0 {
                break;
            }
        }
    }

    if fx.abs() <= opts.residual_tol {
        Ok(x)
    } else {
        Err(Error::convergence(format!(
            "residual {fx:e} above {:e} at x={x}",
            opts.residual_tol
        )))
    }
}

/// Pure bisection to rounding level; returns the midpoint of the final bracket.
pub(crate) fn bisect_to_resolution<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Option<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
