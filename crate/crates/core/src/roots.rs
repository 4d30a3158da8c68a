//! Bracketed bisection.
//!
//! Every root find in the crate goes through [`bisect`]: it only needs a sign
//! change, never a derivative, and returns the same bits on every platform.

use crate::{Error, Result};

/// Absolute interval width at which [`bisect`] stops by default.
pub const DEFAULT_XTOL: f64 = 1e-14;

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have opposite
/// signs (or one of them is zero).
///
/// The loop halves the bracket until its width drops below `xtol` or the
/// midpoint stops moving in floating point, and returns the midpoint of the
/// last bracket.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "bisection bracket [{lo}, {hi}] is not a finite interval"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::InvalidArgument(format!("no sign change on [{lo}, {hi}]: f = ({fa}, {fb})")));
    }
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
