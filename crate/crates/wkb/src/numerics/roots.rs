//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Root of f in [lo, hi] by bisection with Illinois-style false position
/// steps. Stops when |f| < tol or the bracket is narrower than tol.
pub fn bracket_root(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut side = 0i8;
    for it in 0..300 {
        // alternate false position with plain bisection to guarantee shrinkage
        let x = if it % 3 == 2 {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        let x = if x > a.min(b) && x < a.max(b) {
            x
        } else {
            0.5 * (a + b)
        };
        let fx = f(x);
        if fx.abs() < tol || (b - a).abs() < tol {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}
