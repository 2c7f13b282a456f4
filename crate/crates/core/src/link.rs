//! Uplink budget: urban-macro path gain, thermal noise, the scaled Shannon
//! rate and the clipping power needed to carry a given stream.
//!
//! No transmit-power cap is applied. `P_MAX` grows without bound with
//! distance; the only guard is against numeric overflow of the required SINR.

use crate::pa::{self, PaOperatingPoint, SINR_FIT_OFFSET_DB, SINR_FIT_SLOPE};
use crate::units::{db_to_linear, dbm_to_watts};
use crate::{Error, Real, Result};

/// Shortest distance (km) at which the path-gain model is evaluated.
pub const MIN_DISTANCE_KM: f64 = 0.01;
/// Largest `M*R/(beta*B)` accepted before the SINR target is declared infeasible.
pub const MAX_RATE_EXPONENT: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry<T> {
    pub distance_km: T,
    pub carrier_hz: T,
    /// Useful bandwidth B.
    pub bandwidth_hz: T,
    /// Cameras sharing the channel in TDMA.
    pub cameras: u32,
    pub rate_bps: T,
    /// Shannon scaling coefficient.
    pub beta: T,
}

impl<T: Real> LinkGeometry<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_km >= T::lit(MIN_DISTANCE_KM)) || !self.distance_km.is_finite() {
            return Err(Error::domain(
                "distance_km must be finite and at least the 0.01 km model floor",
                self.distance_km.as_f64(),
            ));
        }
        positive("carrier_hz must be positive", self.carrier_hz)?;
        positive("bandwidth_hz must be positive", self.bandwidth_hz)?;
        if self.cameras == 0 {
            return Err(Error::domain("cameras must be at least 1", 0.0));
        }
        if !(self.rate_bps >= T::zero()) || !self.rate_bps.is_finite() {
            return Err(Error::domain("rate_bps must be non-negative", self.rate_bps.as_f64()));
        }
        if !(self.beta > T::zero() && self.beta <= T::one()) {
            return Err(Error::domain("beta must lie in (0, 1]", self.beta.as_f64()));
        }
        Ok(())
    }

    fn rate_exponent(&self) -> T {
        T::from_u32(self.cameras).unwrap() * self.rate_bps / (self.beta * self.bandwidth_hz)
    }
}

/// Channel seen by one link: gain, noise and the clipping power sized for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState<T> {
    /// `10*log10(|h|^2)`.
    pub path_gain_db: T,
    pub noise_dbm: T,
    pub p_max_w: T,
}

impl<T: Real> ChannelState<T> {
    /// Evaluates path gain and noise for `geometry` and sizes `P_MAX`.
    pub fn for_geometry(geometry: &LinkGeometry<T>) -> Result<Self> {
        geometry.validate()?;
        let path_gain_db = path_gain_db(geometry.distance_km, geometry.carrier_hz)?;
        let noise_dbm = noise_dbm(geometry.bandwidth_hz)?;
        let p_max_w = required_p_max(geometry, path_gain_db, noise_dbm)?;
        Ok(ChannelState {
            path_gain_db,
            noise_dbm,
            p_max_w,
        })
    }

    pub fn path_gain_linear(&self) -> T {
        db_to_linear(self.path_gain_db)
    }

    pub fn noise_w(&self) -> T {
        dbm_to_watts(self.noise_dbm)
    }

    /// `|h|^2 * P_MAX / N`.
    pub fn snr_max_linear(&self) -> T {
        self.path_gain_linear() * self.p_max_w / self.noise_w()
    }
}

fn positive<T: Real>(what: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, x.as_f64()))
    }
}

/// `15 - (128.1 + 37.6*log10(d_km) + 21*log10(f / 2 GHz))`; the leading 15 dB
/// is the base-station antenna gain.
pub fn path_gain_db<T: Real>(distance_km: T, carrier_hz: T) -> Result<T> {
    if !(distance_km >= T::lit(MIN_DISTANCE_KM)) || !distance_km.is_finite() {
        return Err(Error::domain(
            "distance_km below the 0.01 km path-loss model floor",
            distance_km.as_f64(),
        ));
    }
    positive("carrier_hz must be positive", carrier_hz)?;
    let loss = T::lit(128.1)
        + T::lit(37.6) * distance_km.log10()
        + T::lit(21.0) * (carrier_hz / T::lit(2e9)).log10();
    Ok(T::lit(15.0) - loss)
}

/// Thermal noise over `bandwidth_hz` plus a 5 dB noise figure, in dBm.
pub fn noise_dbm<T: Real>(bandwidth_hz: T) -> Result<T> {
    positive("bandwidth_hz must be positive", bandwidth_hz)?;
    Ok(T::lit(-174.0) + T::lit(10.0) * bandwidth_hz.log10() + T::lit(5.0))
}

/// Per-camera rate `beta * B / M * log2(1 + SINR)`.
pub fn shannon_rate<T: Real>(bandwidth_hz: T, cameras: u32, beta: T, sinr_linear: T) -> T {
    beta * bandwidth_hz / T::from_u32(cameras).unwrap() * sinr_linear.ln_1p() / T::LN_2()
}

/// SINR needed for every camera to sustain `rate_bps`: `2^(M*R/(beta*B)) - 1`.
pub fn required_sinr<T: Real>(geometry: &LinkGeometry<T>) -> Result<T> {
    geometry.validate()?;
    let exponent = geometry.rate_exponent();
    if exponent > T::lit(MAX_RATE_EXPONENT) {
        return Err(Error::Infeasible {
            exponent: exponent.as_f64(),
            limit: MAX_RATE_EXPONENT,
        });
    }
    Ok((exponent * T::LN_2()).exp_m1())
}

/// Clipping power that, through the dB-linear SINR fit, delivers the
/// required SINR:
/// `P_MAX = N/|h|^2 * 10^(log10(2^(MR/(beta B)) - 1)/0.84 + 2.23/(10*0.84))`.
pub fn required_p_max<T: Real>(geometry: &LinkGeometry<T>, path_gain_db: T, noise_dbm: T) -> Result<T> {
    let sinr = required_sinr(geometry)?;
    if sinr == T::zero() {
        return Ok(T::zero());
    }
    let slope = T::lit(SINR_FIT_SLOPE);
    let exponent = sinr.log10() / slope + T::lit(SINR_FIT_OFFSET_DB) / (T::lit(10.0) * slope);
    let noise_w = dbm_to_watts(noise_dbm);
    let gain = db_to_linear(path_gain_db);
    Ok(noise_w / gain * T::lit(10.0).powf(exponent))
}

/// Full amplifier state for a link: `P_MAX` from the channel, `SNR_MAX`, the
/// SINR-optimal IBO and the resulting mean input power, gain and SINR.
pub fn operating_point<T: Real>(
    geometry: &LinkGeometry<T>,
    channel: &ChannelState<T>,
) -> Result<PaOperatingPoint<T>> {
    geometry.validate()?;
    let snr_max = channel.snr_max_linear();
    let opt = pa::optimal_ibo(snr_max)?;
    Ok(opt.with_p_max(channel.p_max_w))
}

/// Convenience wrapper: channel evaluation followed by [`operating_point`].
pub fn solve_link<T: Real>(geometry: &LinkGeometry<T>) -> Result<(ChannelState<T>, PaOperatingPoint<T>)> {
    let channel = ChannelState::for_geometry(geometry)?;
    let op = operating_point(geometry, &channel)?;
    Ok((channel, op))
}
