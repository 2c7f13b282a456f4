//! Error function and scalar root finding.
//!
//! `erf` uses the everywhere-positive series
//! `erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (1*3*...*(2n+1))`
//! for `|x| < 2`, and the Laplace continued fraction for `erfc` beyond it, so
//! neither branch suffers cancellation. Absolute error is a few ulps for
//! `f64`; `erfc` keeps relative accuracy in the tail.

use crate::{Error, Real, Result};

const SERIES_LIMIT: f64 = 2.0;
const MAX_TERMS: usize = 1000;

/// Which algorithm produced a [`RootSolveReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Newton,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolveReport<T> {
    pub root: T,
    /// `|f(root)|`.
    pub residual: T,
    pub iterations: usize,
    pub method: SolveMethod,
}

fn check_finite<T: Real>(x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("erf/erfc argument must be finite", x.as_f64()))
    }
}

/// Series branch, valid for any x but used only for |x| < 2.
fn erf_series<T: Real>(x: T) -> T {
    let two_x2 = T::lit(2.0) * x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_TERMS {
        term = term * two_x2 / T::from_usize(2 * n + 1).unwrap();
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    T::FRAC_2_SQRT_PI() * (-x * x).exp() * sum
}

/// Continued fraction for erfc, x >= 2 (modified Lentz).
fn erfc_cf<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value();
    let half = T::lit(0.5);
    let mut f = x;
    let mut c = f;
    let mut d = T::zero();
    for n in 1..MAX_TERMS {
        let a = T::from_usize(n).unwrap() * half;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = d.recip();
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() / (T::PI().sqrt() * f)
}

pub fn erf<T: Real>(x: T) -> Result<T> {
    check_finite(x)?;
    let ax = x.abs();
    let v = if ax < T::lit(SERIES_LIMIT) {
        erf_series(ax)
    } else {
        T::one() - erfc_cf(ax)
    };
    Ok(if x.is_sign_negative() { -v } else { v })
}

pub fn erfc<T: Real>(x: T) -> Result<T> {
    check_finite(x)?;
    let ax = x.abs();
    let tail = if ax < T::lit(SERIES_LIMIT) {
        T::one() - erf_series(ax)
    } else {
        erfc_cf(ax)
    };
    Ok(if x.is_sign_negative() {
        T::lit(2.0) - tail
    } else {
        tail
    })
}

/// Plain Newton iteration, stopping once `|f(x)| <= tol`.
///
/// Fails with [`Error::Convergence`] (carrying the iterate with the smallest
/// residual) when the derivative vanishes, an iterate becomes non-finite, or
/// `max_iter` steps are exhausted.
pub fn solve_newton<T, F, D>(f: F, df: D, x0: T, tol: T, max_iter: usize) -> Result<RootSolveReport<T>>
where
    T: Real,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    if !(tol > T::zero()) {
        return Err(Error::domain("tolerance must be positive", tol.as_f64()));
    }
    let mut x = x0;
    let mut best = (x0, T::infinity());
    for it in 0..=max_iter {
        let fx = f(x);
        if !fx.is_finite() {
            break;
        }
        let r = fx.abs();
        if r < best.1 {
            best = (x, r);
        }
        if r <= tol {
            return Ok(RootSolveReport {
                root: x,
                residual: r,
                iterations: it,
                method: SolveMethod::Newton,
            });
        }
        if it == max_iter {
            break;
        }
        let dfx = df(x);
        if dfx == T::zero() || !dfx.is_finite() {
            break;
        }
        x = x - fx / dfx;
        if !x.is_finite() {
            break;
        }
    }
    Err(Error::Convergence {
        best: best.0.as_f64(),
        residual: best.1.as_f64(),
        iterations: max_iter,
    })
}

/// Newton iteration confined to `[lo, hi]`, which must bracket a sign change.
///
/// Whenever a Newton step would leave the current bracket (or the derivative
/// is unusable) a bisection step is taken instead; the bracket shrinks on
/// every iteration, so the method cannot diverge.
pub fn solve_newton_bracketed<T, F, D>(
    f: F,
    df: D,
    x0: T,
    lo: T,
    hi: T,
    tol: T,
    max_iter: usize,
) -> Result<RootSolveReport<T>>
where
    T: Real,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    if !(tol > T::zero()) {
        return Err(Error::domain("tolerance must be positive", tol.as_f64()));
    }
    if !(lo < hi) {
        return Err(Error::domain("bracket requires lo < hi", (hi - lo).as_f64()));
    }
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == T::zero() || f_hi == T::zero() {
        let root = if f_lo == T::zero() { lo } else { hi };
        return Ok(RootSolveReport {
            root,
            residual: T::zero(),
            iterations: 0,
            method: SolveMethod::Newton,
        });
    }
    if (f_lo > T::zero()) == (f_hi > T::zero()) {
        return Err(Error::Bracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: f_lo.as_f64(),
            f_hi: f_hi.as_f64(),
        });
    }
    let lo_positive = f_lo > T::zero();
    let (mut a, mut b) = (lo, hi);
    let mut x = if x0 > lo && x0 < hi { x0 } else { (lo + hi) * T::lit(0.5) };
    let mut best = (x, T::infinity());

    for it in 0..=max_iter {
        let fx = f(x);
        let r = fx.abs();
        if r < best.1 {
            best = (x, r);
        }
        if r <= tol {
            return Ok(RootSolveReport {
                root: x,
                residual: r,
                iterations: it,
                method: SolveMethod::Newton,
            });
        }
        if it == max_iter {
            break;
        }
        if (fx > T::zero()) == lo_positive {
            a = x;
        } else {
            b = x;
        }
        let mid = (a + b) * T::lit(0.5);
        if mid <= a || mid >= b {
            // bracket collapsed to adjacent floats without meeting tol
            break;
        }
        let dfx = df(x);
        let step = fx / dfx;
        let candidate = x - step;
        x = if dfx != T::zero() && candidate.is_finite() && candidate > a && candidate < b {
            candidate
        } else {
            mid
        };
    }
    Err(Error::Convergence {
        best: best.0.as_f64(),
        residual: best.1.as_f64(),
        iterations: max_iter,
    })
}

/// Bisection on `[lo, hi]` until the bracket is no wider than `tol`.
///
/// If `tol` is below the float spacing at the root the loop stops when the
/// bracket cannot shrink further.
pub fn solve_bisection<T, F>(f: F, lo: T, hi: T, tol: T) -> Result<RootSolveReport<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(tol > T::zero()) {
        return Err(Error::domain("tolerance must be positive", tol.as_f64()));
    }
    if !(lo < hi) {
        return Err(Error::domain("bracket requires lo < hi", (hi - lo).as_f64()));
    }
    let (mut a, mut b) = (lo, hi);
    let f_a = f(a);
    let f_b = f(b);
    if !(f_a * f_b < T::zero()) {
        return Err(Error::Bracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: f_a.as_f64(),
            f_hi: f_b.as_f64(),
        });
    }
    let a_positive = f_a > T::zero();
    let mut iterations = 0;
    while b - a > tol {
        let mid = (a + b) * T::lit(0.5);
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        let fm = f(mid);
        if fm == T::zero() {
            a = mid;
            b = mid;
            break;
        }
        if (fm > T::zero()) == a_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    let root = (a + b) * T::lit(0.5);
    Ok(RootSolveReport {
        root,
        residual: f(root).abs(),
        iterations,
        method: SolveMethod::Bisection,
    })
}
