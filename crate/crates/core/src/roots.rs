//! Bracketed bisection shared by the domain constructions.

use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

/// Root of `f` on `[lo, hi]`, where `f(lo)` and `f(hi)` must have opposite signs.
///
/// Stops once `|f| <= tol` and the bracket has collapsed below `1e-15 * (1 + |mid|)`,
/// or after [`MAX_ITERATIONS`] halvings.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::Bracket(format!(
            "f({lo}) = {f_lo:e} and f({hi}) = {f_hi:e} do not bracket a root"
        )));
    }
    let mut best = (f64::INFINITY, lo);
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() < best.0 {
            best = (f_mid.abs(), mid);
        }
        if f_mid == 0.0 || (f_mid.abs() <= tol && (hi - lo) <= 1e-15 * (1.0 + mid.abs())) {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    if best.0 <= tol {
        Ok(best.1)
    } else {
        Err(Error::Bracket(format!(
            "bisection ended with residual {:e} > {tol:e}",
            best.0
        )))
    }
}
