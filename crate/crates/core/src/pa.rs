//! Soft-limiter power amplifier driven by a complex-Gaussian (OFDM) signal.
//!
//! The amplifier passes samples unchanged below the clipping amplitude
//! `sqrt(P_MAX)` and clamps their magnitude above it. Its operating point is
//! the input back-off `IBO = P_MAX / sigma^2`, always held in linear scale.
//! The output splits into `alpha * x` plus uncorrelated distortion, which
//! gives the closed-form SINR used throughout the crate.

use crate::numerics::{self, RootSolveReport};
use crate::{Error, Real, Result};

/// Slope of the dB-linear fit of the maximum SINR against `SNR_MAX`.
pub const SINR_FIT_SLOPE: f64 = 0.84;
/// Offset (dB) of the same fit.
pub const SINR_FIT_OFFSET_DB: f64 = 2.23;

/// Search interval for the SINR-optimal IBO, linear scale.
pub const OPTIMAL_IBO_BRACKET: (f64, f64) = (1e-8, 1e3);
const OPTIMAL_IBO_MAX_ITER: usize = 200;

/// Solved amplifier state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaOperatingPoint<T> {
    pub ibo_linear: T,
    /// Clipping power, watts.
    pub p_max: T,
    /// Mean input power, watts.
    pub sigma2: T,
    pub alpha: T,
    pub sinr_linear: T,
    pub snr_max_linear: T,
}

/// SINR-optimal back-off for a given `SNR_MAX`, before any power scale is
/// attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalIbo<T> {
    pub ibo_linear: T,
    pub alpha: T,
    pub sinr_linear: T,
    pub snr_max_linear: T,
    pub solve: RootSolveReport<T>,
}

impl<T: Real> OptimalIbo<T> {
    /// Attaches a clipping power; the mean input power follows from the IBO.
    pub fn with_p_max(&self, p_max: T) -> PaOperatingPoint<T> {
        PaOperatingPoint {
            ibo_linear: self.ibo_linear,
            p_max,
            sigma2: p_max / self.ibo_linear,
            alpha: self.alpha,
            sinr_linear: self.sinr_linear,
            snr_max_linear: self.snr_max_linear,
        }
    }
}

impl<T: Real> PaOperatingPoint<T> {
    pub fn ibo_db(&self) -> T {
        crate::units::linear_to_db(self.ibo_linear)
    }

    pub fn sinr_db(&self) -> T {
        crate::units::linear_to_db(self.sinr_linear)
    }

    /// Mean class-B supply power at this operating point.
    pub fn consumed_power(&self) -> Result<T> {
        pa_consumed_power(self.p_max, self.ibo_linear)
    }
}

fn check_ibo<T: Real>(ibo: T) -> Result<()> {
    if ibo > T::zero() && ibo.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("IBO must be positive and finite", ibo.as_f64()))
    }
}

/// Bussgang gain `1 - exp(-IBO) + sqrt(pi*IBO)/2 * erfc(sqrt(IBO))`.
pub fn bussgang_alpha<T: Real>(ibo_linear: T) -> Result<T> {
    check_ibo(ibo_linear)?;
    let z = ibo_linear.sqrt();
    let one_minus_exp = -(-ibo_linear).exp_m1();
    Ok(one_minus_exp + T::lit(0.5) * (T::PI() * ibo_linear).sqrt() * numerics::erfc(z)?)
}

/// `1 - alpha = exp(-IBO) - sqrt(pi*IBO)/2 * erfc(sqrt(IBO))`, accurate when
/// alpha is close to one. Unlike `1 - bussgang_alpha(ibo)`, it stays
/// resolvable for large back-off, where alpha itself rounds to one.
pub fn bussgang_alpha_complement<T: Real>(ibo_linear: T) -> Result<T> {
    check_ibo(ibo_linear)?;
    let z = ibo_linear.sqrt();
    Ok((-ibo_linear).exp() - T::lit(0.5) * (T::PI() * ibo_linear).sqrt() * numerics::erfc(z)?)
}

/// Distortion power normalised to the input power: `1 - alpha^2 - exp(-IBO)`.
pub fn distortion_ratio<T: Real>(ibo_linear: T) -> Result<T> {
    check_ibo(ibo_linear)?;
    if ibo_linear < T::one() {
        let alpha = bussgang_alpha(ibo_linear)?;
        Ok(-(-ibo_linear).exp_m1() - alpha * alpha)
    } else {
        // 1 - alpha^2 = (1 - alpha)(1 + alpha) avoids cancellation for large IBO
        let d = bussgang_alpha_complement(ibo_linear)?;
        Ok(d * (T::lit(2.0) - d) - (-ibo_linear).exp())
    }
}

/// Nonlinear distortion power in watts for mean input power `sigma2`.
pub fn distortion_power<T: Real>(sigma2: T, ibo_linear: T) -> Result<T> {
    Ok(sigma2 * distortion_ratio(ibo_linear)?)
}

/// Received SINR `alpha^2 / (1 - alpha^2 - exp(-IBO) + IBO/SNR_MAX)`.
pub fn sinr_of_ibo<T: Real>(ibo_linear: T, snr_max_linear: T) -> Result<T> {
    check_ibo(ibo_linear)?;
    if !(snr_max_linear > T::zero()) {
        return Err(Error::domain("SNR_MAX must be positive", snr_max_linear.as_f64()));
    }
    let alpha = bussgang_alpha(ibo_linear)?;
    let denom = distortion_ratio(ibo_linear)? + ibo_linear / snr_max_linear;
    Ok(alpha * alpha / denom)
}

/// Stationarity condition of the SINR in IBO:
/// `sqrt(pi)/2 * erfc(sqrt(IBO)) - sqrt(IBO)/SNR_MAX`.
///
/// Positive below the optimum, negative above it.
pub fn optimal_ibo_residual<T: Real>(ibo_linear: T, snr_max_linear: T) -> Result<T> {
    check_ibo(ibo_linear)?;
    let z = ibo_linear.sqrt();
    Ok(T::PI().sqrt() * T::lit(0.5) * numerics::erfc(z)? - z / snr_max_linear)
}

/// SINR-maximising IBO for the given `SNR_MAX`.
///
/// Solved with bracketed Newton in `z = sqrt(IBO)` on the condition scaled
/// by `SNR_MAX`, `g(z) = SNR_MAX*sqrt(pi)/2*erfc(z) - z`, which is convex and
/// strictly decreasing. The unscaled residual at the returned IBO is below
/// `1e-12` for `f64`.
pub fn optimal_ibo<T: Real>(snr_max_linear: T) -> Result<OptimalIbo<T>> {
    if !(snr_max_linear > T::zero()) || !snr_max_linear.is_finite() {
        return Err(Error::domain("SNR_MAX must be positive and finite", snr_max_linear.as_f64()));
    }
    let half_sqrt_pi = T::PI().sqrt() * T::lit(0.5);
    let scale = snr_max_linear * half_sqrt_pi;
    // erfc is finite for finite input; the closure cannot fail
    let g = |z: T| scale * numerics::erfc(z).unwrap_or_else(|_| T::nan()) - z;
    let dg = |z: T| -snr_max_linear * (-z * z).exp() - T::one();

    let lo = T::lit(OPTIMAL_IBO_BRACKET.0).sqrt();
    let hi = T::lit(OPTIMAL_IBO_BRACKET.1).sqrt();
    let guess = (T::one() + snr_max_linear).ln().sqrt().max(lo).min(hi);
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(256.0)) * snr_max_linear.min(T::one());

    let solve = numerics::solve_newton_bracketed(g, dg, guess, lo, hi, tol, OPTIMAL_IBO_MAX_ITER)?;
    let ibo = solve.root * solve.root;
    Ok(OptimalIbo {
        ibo_linear: ibo,
        alpha: bussgang_alpha(ibo)?,
        sinr_linear: sinr_of_ibo(ibo, snr_max_linear)?,
        snr_max_linear,
        solve,
    })
}

/// dB-linear fit of the maximum SINR: `0.84 * SNR_MAX_dB - 2.23`.
pub fn sinr_approx_db<T: Real>(snr_max_db: T) -> T {
    T::lit(SINR_FIT_SLOPE) * snr_max_db - T::lit(SINR_FIT_OFFSET_DB)
}

/// Inverse of [`sinr_approx_db`]: the `SNR_MAX` (dB) that the fit maps to a
/// target SINR.
pub fn snr_max_db_for_sinr_db<T: Real>(sinr_db: T) -> T {
    (sinr_db + T::lit(SINR_FIT_OFFSET_DB)) / T::lit(SINR_FIT_SLOPE)
}

/// Mean supply power of a class-B amplifier whose clipped output is averaged
/// over the Rayleigh amplitude distribution:
/// `2 * P_MAX / sqrt(pi*IBO) * erf(sqrt(IBO))`.
pub fn pa_consumed_power<T: Real>(p_max: T, ibo_linear: T) -> Result<T> {
    if !(p_max >= T::zero()) || !p_max.is_finite() {
        return Err(Error::domain("P_MAX must be non-negative and finite", p_max.as_f64()));
    }
    check_ibo(ibo_linear)?;
    let z = ibo_linear.sqrt();
    Ok(T::lit(2.0) * p_max / (T::PI() * ibo_linear).sqrt() * numerics::erf(z)?)
}
