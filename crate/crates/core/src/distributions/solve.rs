//! Bracketed, safeguarded root finding for quantile inversion.

use crate::error::{Error, Result};

/// Solves `f(x) = target` for a nondecreasing `f` on `[lo, hi]`.
///
/// Bisection narrows the bracket until Newton steps (using `deriv`) are
/// safe; any Newton step that leaves the bracket or stalls falls back to
/// bisection, so convergence is guaranteed for a valid bracket.
pub fn invert_monotone<F, D>(
    f: F,
    deriv: D,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    f_tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut flo = f(lo) - target;
    let fhi = f(hi) - target;
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::Numerical(format!(
            "root not bracketed on [{lo}, {hi}]"
        )));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x) - target;
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let _ = flo;

        let d = deriv(x);
        let newton = if d > 0.0 { x - fx / d } else { f64::NAN };
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
             0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (x.abs() + 1.0) {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "quantile iteration did not converge (bracket [{lo}, {hi}])"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_cubic() {
        let f = |x: f64| x * x * x;
        let d = |x: f64| 3.0 * x * x;
        let root = invert_monotone(f, d, 8.0, 0.0, 10.0, 1e-13).unwrap();
        assert!((root - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_bracket() {
        let f = |x: f64| x;
        assert!(invert_monotone(f, |_| 1.0, 5.0, 0.0, 1.0, 1e-12).is_err());
    }
}
