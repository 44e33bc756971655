//! Adaptive quadrature on finite intervals.
//!
//! A single routine — globally adaptive Simpson with Richardson
//! extrapolation — covers every integral the crate needs: the cascade-gain
//! density is smooth, and the semi-infinite rate integrals are mapped onto
//! (0, 1) before they get here. The error budget is strict: an interval is
//! accepted only when its local Richardson estimate fits inside its share of
//! the caller's absolute tolerance, and running out of depth is an error
//! rather than a silent best-effort result.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("invalid integration bounds [{a}, {b}]")]
    InvalidBounds { a: f64, b: f64 },
    #[error("tolerance {tol:e} not reached at max depth {max_depth} (worst interval [{a:e}, {b:e}])")]
    ToleranceNotReached {
        tol: f64,
        max_depth: u32,
        a: f64,
        b: f64,
    },
    #[error("integrand returned a non-finite value at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of accepted per-interval Richardson error estimates.
    pub abs_error: f64,
    pub evals: usize,
}

struct Ctx<'a, F> {
    f: &'a F,
    max_depth: u32,
    evals: usize,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

impl<F: Fn(f64) -> f64> Ctx<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64, QuadError> {
        self.evals += 1;
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFiniteIntegrand { x })
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        err_acc: &mut f64,
    ) -> Result<f64, QuadError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        // 1/15 is the classical Richardson factor for Simpson bisection.
        if delta.abs() <= 15.0 * tol || b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            *err_acc += delta.abs() / 15.0;
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(QuadError::ToleranceNotReached {
                tol,
                max_depth: self.max_depth,
                a,
                b,
            });
        }
        let half_tol = 0.5 * tol;
        let l = self.refine(a, m, fa, flm, fm, left, half_tol, depth + 1, err_acc)?;
        let r = self.refine(m, b, fm, frm, fb, right, half_tol, depth + 1, err_acc)?;
        Ok(l + r)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<QuadResult, QuadError> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(QuadError::InvalidBounds { a, b });
    }
    let mut ctx = Ctx {
        f: &f,
        max_depth,
        evals: 0,
    };
    let fa = ctx.eval(a)?;
    let m = 0.5 * (a + b);
    let fm = ctx.eval(m)?;
    let fb = ctx.eval(b)?;
    let whole = simpson(fa, fm, fb, b - a);
    let mut err_acc = 0.0;
    let value = ctx.refine(a, b, fa, fm, fb, whole, abs_tol, 0, &mut err_acc)?;
    Ok(QuadResult {
        value,
        abs_error: err_acc,
        evals: ctx.evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cubic_is_exact() {
        // Simpson integrates cubics exactly; the top-level pass suffices.
        let r = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12, 30).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn smooth_exponential() {
        let r = adaptive_simpson(|x| (-x).exp(), 0.0, 10.0, 1e-12, 40).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 - (-10.0f64).exp(), epsilon = 1e-11);
    }

    #[test]
    fn boundary_layer_near_one() {
        // The shape of the mapped ergodic-rate integrand at high SNR: a
        // 1/(1-t) ramp cut off at 1-t = delta. Exact value ln((1+delta)/delta).
        let delta = 1e-7;
        let f = |t: f64| 1.0 / (1.0 - t + delta);
        let r = adaptive_simpson(f, 0.0, 1.0, 1e-9, 60).unwrap();
        let exact = ((1.0 + delta) / delta).ln();
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-7);
    }

    #[test]
    fn depth_exhaustion_is_an_error() {
        let r = adaptive_simpson(|x| 1.0 / (1e-9 + x * x), 0.0, 1.0, 1e-14, 4);
        assert!(matches!(r, Err(QuadError::ToleranceNotReached { .. })));
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(matches!(
            adaptive_simpson(|x| x, 1.0, 0.0, 1e-6, 10),
            Err(QuadError::InvalidBounds { .. })
        ));
        assert!(matches!(
            adaptive_simpson(|x| x, 0.0, f64::INFINITY, 1e-6, 10),
            Err(QuadError::InvalidBounds { .. })
        ));
    }

    #[test]
    fn non_finite_integrand_reported() {
        let r = adaptive_simpson(|x| 1.0 / x, 0.0, 1.0, 1e-9, 30);
        assert!(matches!(r, Err(QuadError::NonFiniteIntegrand { .. })));
    }
}
