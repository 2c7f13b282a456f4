//! Transmitter power chain and the local-versus-offload comparison.
//!
//! A camera either spends `theta * R / Gamma` watts computing locally or
//! feeds its stream through video coder, channel coder, IFFT, two DACs, a
//! zero-IF LO with two mixers and the PA. With `M` cameras in TDMA the DACs,
//! mixers, IFFT and PA run only `1/M` of the time; the video coder, channel
//! coder and LO do not.

use serde::{Deserialize, Serialize};

use crate::link::{self, ChannelState, LinkGeometry};
use crate::pa::PaOperatingPoint;
use crate::units::watts_to_dbm;
use crate::{Error, Real, Result};

/// The two LTE-like transmitter configurations: `(f_s, B, N_OFDM)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandwidthProfile {
    /// 15.36 MHz sampling, 9 MHz useful band, 1024-point IFFT.
    #[serde(rename = "9mhz")]
    Mhz9,
    /// 30.72 MHz sampling, 18 MHz useful band, 2048-point IFFT.
    #[serde(rename = "18mhz")]
    Mhz18,
}

impl BandwidthProfile {
    pub const ALL: [BandwidthProfile; 2] = [BandwidthProfile::Mhz9, BandwidthProfile::Mhz18];

    pub fn sample_rate_hz(self) -> f64 {
        match self {
            BandwidthProfile::Mhz9 => 15.36e6,
            BandwidthProfile::Mhz18 => 30.72e6,
        }
    }

    pub fn bandwidth_hz(self) -> f64 {
        match self {
            BandwidthProfile::Mhz9 => 9e6,
            BandwidthProfile::Mhz18 => 18e6,
        }
    }

    pub fn n_ofdm(self) -> u32 {
        match self {
            BandwidthProfile::Mhz9 => 1024,
            BandwidthProfile::Mhz18 => 2048,
        }
    }
}

impl std::str::FromStr for BandwidthProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "9mhz" => Ok(BandwidthProfile::Mhz9),
            "18mhz" => Ok(BandwidthProfile::Mhz18),
            other => Err(format!("unknown bandwidth profile `{other}` (expected 9mhz or 18mhz)")),
        }
    }
}

impl std::fmt::Display for BandwidthProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BandwidthProfile::Mhz9 => "9mhz",
            BandwidthProfile::Mhz18 => "18mhz",
        })
    }
}

/// Transmitter and front-end constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams<T> {
    pub sample_rate_hz: T,
    pub bandwidth_hz: T,
    pub n_ofdm: u32,
    pub delta_f_hz: T,
    pub gamma_mod_flops_per_w: T,
    pub dac_bits: u32,
    pub v_dd: T,
    pub i_0: T,
    pub c_p: T,
    pub p_lo_w: T,
    pub p_mix_w: T,
    pub psi_w_per_bps: T,
    pub beta: T,
}

impl<T: Real> RadioParams<T> {
    /// Reference transmitter for the given bandwidth profile.
    pub fn reference(profile: BandwidthProfile) -> Self {
        let mut radio = RadioParams {
            sample_rate_hz: T::zero(),
            bandwidth_hz: T::zero(),
            n_ofdm: 0,
            delta_f_hz: T::lit(15e3),
            gamma_mod_flops_per_w: T::lit(120e9),
            dac_bits: 10,
            v_dd: T::lit(3.0),
            i_0: T::lit(5e-6),
            c_p: T::lit(1e-12),
            p_lo_w: T::lit(67.5e-3),
            p_mix_w: T::lit(21e-3),
            psi_w_per_bps: T::lit(0.1e-9),
            beta: T::lit(0.4),
        };
        radio.apply_profile(profile);
        radio
    }

    pub fn apply_profile(&mut self, profile: BandwidthProfile) {
        self.sample_rate_hz = T::lit(profile.sample_rate_hz());
        self.bandwidth_hz = T::lit(profile.bandwidth_hz());
        self.n_ofdm = profile.n_ofdm();
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sample_rate_hz must be positive", self.sample_rate_hz),
            ("bandwidth_hz must be positive", self.bandwidth_hz),
            ("delta_f_hz must be positive", self.delta_f_hz),
            ("gamma_mod_flops_per_w must be positive", self.gamma_mod_flops_per_w),
            ("v_dd must be positive", self.v_dd),
        ];
        for (what, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain(what, v.as_f64()));
            }
        }
        let non_negative = [
            ("i_0 must be non-negative", self.i_0),
            ("c_p must be non-negative", self.c_p),
            ("p_lo_w must be non-negative", self.p_lo_w),
            ("p_mix_w must be non-negative", self.p_mix_w),
            ("psi_w_per_bps must be non-negative", self.psi_w_per_bps),
        ];
        for (what, v) in non_negative {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::domain(what, v.as_f64()));
            }
        }
        if !(self.beta > T::zero() && self.beta <= T::one()) {
            return Err(Error::domain("beta must lie in (0, 1]", self.beta.as_f64()));
        }
        if !(self.sample_rate_hz > self.bandwidth_hz) {
            return Err(Error::domain(
                "sample_rate_hz must exceed bandwidth_hz",
                self.sample_rate_hz.as_f64(),
            ));
        }
        if !is_fft_size(self.n_ofdm) {
            return Err(Error::domain("n_ofdm must be a power of two >= 2", self.n_ofdm as f64));
        }
        let ratio = self.sample_rate_hz / self.delta_f_hz;
        let n = T::from_u32(self.n_ofdm).unwrap();
        if (ratio - n).abs() > T::lit(1e-9) * n {
            return Err(Error::domain(
                "n_ofdm must equal sample_rate_hz / delta_f_hz",
                ratio.as_f64(),
            ));
        }
        if !(1..=32).contains(&self.dac_bits) {
            return Err(Error::domain("dac_bits must be in 1..=32", self.dac_bits as f64));
        }
        Ok(())
    }
}

/// Scenario knobs for one camera deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentParams<T> {
    pub cameras: u32,
    pub distance_km: T,
    pub carrier_hz: T,
    pub rate_bps: T,
    pub p_video_w: T,
    pub gamma_flops_per_w: T,
    pub theta_flop_per_bit: T,
}

impl<T: Real> Default for DeploymentParams<T> {
    fn default() -> Self {
        DeploymentParams {
            cameras: 1,
            distance_km: T::lit(0.1),
            carrier_hz: T::lit(3.5e9),
            rate_bps: T::lit(6e6),
            p_video_w: T::lit(0.242),
            gamma_flops_per_w: T::lit(5e9),
            theta_flop_per_bit: T::lit(300.0),
        }
    }
}

impl<T: Real> DeploymentParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.cameras == 0 {
            return Err(Error::domain("cameras must be at least 1", 0.0));
        }
        let positive = [
            ("distance_km must be positive", self.distance_km),
            ("carrier_hz must be positive", self.carrier_hz),
            ("rate_bps must be positive", self.rate_bps),
            ("p_video_w must be positive", self.p_video_w),
            ("gamma_flops_per_w must be positive", self.gamma_flops_per_w),
            ("theta_flop_per_bit must be positive", self.theta_flop_per_bit),
        ];
        for (what, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain(what, v.as_f64()));
            }
        }
        Ok(())
    }

    pub fn geometry(&self, radio: &RadioParams<T>) -> LinkGeometry<T> {
        LinkGeometry {
            distance_km: self.distance_km,
            carrier_hz: self.carrier_hz,
            bandwidth_hz: radio.bandwidth_hz,
            cameras: self.cameras,
            rate_bps: self.rate_bps,
            beta: radio.beta,
        }
    }
}

/// Per-camera mean power of the offloading chain.
///
/// Every field already carries its duty-cycle factor (`1/M` or `2/M`), so
/// the components sum exactly to `total_w`. Multiply the duty-cycled fields
/// by `M` to recover the per-device draw while transmitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown<T> {
    pub video_w: T,
    pub cod_w: T,
    pub ofdm_w: T,
    pub dac_w: T,
    pub lo_w: T,
    pub mix_w: T,
    pub pa_w: T,
    pub total_w: T,
}

impl<T: Real> PowerBreakdown<T> {
    pub const COMPONENTS: [&'static str; 7] = ["video", "cod", "ofdm", "dac", "lo", "mix", "pa"];

    pub fn components(&self) -> [T; 7] {
        [
            self.video_w,
            self.cod_w,
            self.ofdm_w,
            self.dac_w,
            self.lo_w,
            self.mix_w,
            self.pa_w,
        ]
    }

    pub fn total_dbm(&self) -> T {
        watts_to_dbm(self.total_w)
    }

    pub fn components_dbm(&self) -> [T; 7] {
        self.components().map(watts_to_dbm)
    }
}

fn is_fft_size(n: u32) -> bool {
    n >= 2 && n.is_power_of_two()
}

fn non_negative<T: Real>(what: &'static str, x: T) -> Result<()> {
    if x >= T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, x.as_f64()))
    }
}

/// Power of running the task locally: `theta * R / Gamma`.
pub fn local_power<T: Real>(theta: T, rate_bps: T, gamma: T) -> Result<T> {
    non_negative("theta must be non-negative", theta)?;
    non_negative("rate_bps must be non-negative", rate_bps)?;
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(Error::domain("gamma must be positive", gamma.as_f64()));
    }
    Ok(theta * rate_bps / gamma)
}

/// Channel-coder power, proportional to the bit rate.
pub fn coding_power<T: Real>(rate_bps: T, psi: T) -> Result<T> {
    non_negative("rate_bps must be non-negative", rate_bps)?;
    non_negative("psi must be non-negative", psi)?;
    Ok(rate_bps * psi)
}

/// IFFT power: `(4N log2 N - 6N + 8) * delta_f / Gamma_MOD`.
pub fn ofdm_power<T: Real>(n_ofdm: u32, delta_f_hz: T, gamma_mod: T) -> Result<T> {
    if !is_fft_size(n_ofdm) {
        return Err(Error::domain("n_ofdm must be a power of two >= 2", n_ofdm as f64));
    }
    if !(delta_f_hz > T::zero()) || !(gamma_mod > T::zero()) {
        return Err(Error::domain(
            "delta_f and gamma_mod must be positive",
            delta_f_hz.min(gamma_mod).as_f64(),
        ));
    }
    let n = f64::from(n_ofdm);
    let log2n = f64::from(n_ofdm.trailing_zeros());
    let flop_per_symbol = T::lit(4.0 * n * log2n - 6.0 * n + 8.0);
    Ok(flop_per_symbol * delta_f_hz / gamma_mod)
}

/// Current-steering DAC: `V_dd I_0 (2^bits - 1) + 0.5 bits C_p f_s V_dd^2`.
pub fn dac_power<T: Real>(bits: u32, v_dd: T, i_0: T, c_p: T, f_s: T) -> Result<T> {
    if !(1..=32).contains(&bits) {
        return Err(Error::domain("DAC resolution must be in 1..=32 bits", bits as f64));
    }
    if !(v_dd > T::zero()) {
        return Err(Error::domain("v_dd must be positive", v_dd.as_f64()));
    }
    non_negative("i_0 must be non-negative", i_0)?;
    non_negative("c_p must be non-negative", c_p)?;
    non_negative("f_s must be non-negative", f_s)?;
    let levels = T::lit(2f64.powi(bits as i32) - 1.0);
    let bits = T::from_u32(bits).unwrap();
    Ok(v_dd * i_0 * levels + T::lit(0.5) * bits * c_p * f_s * v_dd * v_dd)
}

/// Offloading chain with its solved link and amplifier state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffloadSolution<T> {
    pub breakdown: PowerBreakdown<T>,
    pub channel: ChannelState<T>,
    pub operating_point: PaOperatingPoint<T>,
}

/// Solves the link and evaluates every chain component.
pub fn solve_offload<T: Real>(
    radio: &RadioParams<T>,
    deploy: &DeploymentParams<T>,
) -> Result<OffloadSolution<T>> {
    radio.validate()?;
    deploy.validate()?;
    let (channel, op) = link::solve_link(&deploy.geometry(radio))?;

    let m = T::from_u32(deploy.cameras).unwrap();
    let two = T::lit(2.0);
    let video_w = deploy.p_video_w;
    let cod_w = coding_power(deploy.rate_bps, radio.psi_w_per_bps)?;
    let ofdm_w = ofdm_power(radio.n_ofdm, radio.delta_f_hz, radio.gamma_mod_flops_per_w)? / m;
    let dac_w = two
        * dac_power(radio.dac_bits, radio.v_dd, radio.i_0, radio.c_p, radio.sample_rate_hz)?
        / m;
    let lo_w = radio.p_lo_w;
    let mix_w = two * radio.p_mix_w / m;
    let pa_w = op.consumed_power()? / m;
    let total_w = video_w + cod_w + ofdm_w + dac_w + lo_w + mix_w + pa_w;

    Ok(OffloadSolution {
        breakdown: PowerBreakdown {
            video_w,
            cod_w,
            ofdm_w,
            dac_w,
            lo_w,
            mix_w,
            pa_w,
            total_w,
        },
        channel,
        operating_point: op,
    })
}

pub fn offload_power<T: Real>(
    radio: &RadioParams<T>,
    deploy: &DeploymentParams<T>,
) -> Result<PowerBreakdown<T>> {
    Ok(solve_offload(radio, deploy)?.breakdown)
}

/// Complexity (FLOP per encoded bit) at which local processing costs as
/// much as offloading; tasks heavier than this are cheaper to offload.
pub fn breakeven_theta<T: Real>(radio: &RadioParams<T>, deploy: &DeploymentParams<T>) -> Result<T> {
    let total = offload_power(radio, deploy)?.total_w;
    Ok(deploy.gamma_flops_per_w * total / deploy.rate_bps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(profile: BandwidthProfile, m: u32, d: f64) -> (RadioParams<f64>, DeploymentParams<f64>) {
        let radio = RadioParams::reference(profile);
        let deploy = DeploymentParams {
            cameras: m,
            distance_km: d,
            ..Default::default()
        };
        (radio, deploy)
    }

    #[test]
    fn local_power_examples() {
        assert_eq!(local_power(0.0_f64, 6e6, 5e9).unwrap(), 0.0);
        assert!((local_power(320.0_f64, 6e6, 5e9).unwrap() - 0.384).abs() < 1e-15);
        assert!((local_power(1000.0_f64, 6e6, 5e9).unwrap() - 1.2).abs() < 1e-15);
        assert!(local_power(1.0, 6e6, 0.0).is_err());
        assert!(local_power(-1.0, 6e6, 5e9).is_err());
    }

    #[test]
    fn coding_power_examples() {
        assert_eq!(coding_power(0.0_f64, 1e-10).unwrap(), 0.0);
        assert!((coding_power(6e6_f64, 1e-10).unwrap() - 0.6e-3).abs() < 1e-18);
        assert!((coding_power(1e9_f64, 1e-10).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn ofdm_power_examples() {
        assert!((ofdm_power(1024, 15e3_f64, 120e9).unwrap() - 4.353e-3).abs() < 1e-15);
        assert!((ofdm_power(2048, 15e3_f64, 120e9).unwrap() - 9.729e-3).abs() < 1e-15);
        assert!((ofdm_power(2, 15e3_f64, 120e9).unwrap() - 4.0 * 15e3 / 120e9).abs() < 1e-20);
        assert!(ofdm_power(1000, 15e3, 120e9_f64).is_err());
        assert!(ofdm_power(1, 15e3, 120e9_f64).is_err());
    }

    #[test]
    fn dac_power_examples() {
        let p = dac_power(10, 3.0_f64, 5e-6, 1e-12, 30.72e6).unwrap();
        assert!((p - (15.345e-3 + 1.3824e-3)).abs() < 1e-15);
        let p = dac_power(10, 3.0_f64, 5e-6, 1e-12, 15.36e6).unwrap();
        assert!((p - (15.345e-3 + 0.6912e-3)).abs() < 1e-15);
        let p = dac_power(1, 3.0_f64, 5e-6, 0.0, 15.36e6).unwrap();
        assert!((p - 15e-6).abs() < 1e-18);
        assert!(dac_power(0, 3.0, 5e-6, 0.0, 1.0_f64).is_err());
    }

    #[test]
    fn reference_radio_is_valid() {
        for p in BandwidthProfile::ALL {
            RadioParams::<f64>::reference(p).validate().unwrap();
        }
        let mut r = RadioParams::<f64>::reference(BandwidthProfile::Mhz9);
        r.n_ofdm = 2048;
        assert!(r.validate().is_err());
        let mut r = RadioParams::<f64>::reference(BandwidthProfile::Mhz9);
        r.bandwidth_hz = 20e6;
        assert!(r.validate().is_err());
    }

    #[test]
    fn short_link_is_about_26_dbm() {
        let (radio, deploy) = scenario(BandwidthProfile::Mhz18, 1, 0.02);
        let b = offload_power(&radio, &deploy).unwrap();
        assert!((b.total_dbm() - 26.0).abs() <= 1.0, "{}", b.total_dbm());
        assert!((watts_to_dbm(b.video_w) - 23.84).abs() < 0.01);
    }

    #[test]
    fn many_cameras_limit() {
        let (radio, mut deploy) = scenario(BandwidthProfile::Mhz18, 1, 0.02);
        deploy.cameras = 1_000_000;
        // keep the rate exponent finite: M*R/(beta*B) must stay below 60
        deploy.rate_bps = 1.0;
        let b = offload_power(&radio, &deploy).unwrap();
        let floor = b.video_w + b.cod_w + b.lo_w;
        assert!((b.total_w - floor) / floor < 1e-6);
    }

    #[test]
    fn additivity() {
        let (radio, deploy) = scenario(BandwidthProfile::Mhz9, 10, 0.3);
        let b = offload_power(&radio, &deploy).unwrap();
        let sum: f64 = b.components().iter().sum();
        assert!(((sum - b.total_w) / b.total_w).abs() < 1e-12);
        assert!(b.components().iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn breakeven_round_trip() {
        let (radio, deploy) = scenario(BandwidthProfile::Mhz18, 10, 0.5);
        let theta = breakeven_theta(&radio, &deploy).unwrap();
        let local = local_power(theta, deploy.rate_bps, deploy.gamma_flops_per_w).unwrap();
        let total = offload_power(&radio, &deploy).unwrap().total_w;
        assert!(((local - total) / total).abs() < 1e-12);
    }

    #[test]
    fn f32_chain_runs() {
        let radio = RadioParams::<f32>::reference(BandwidthProfile::Mhz18);
        let deploy = DeploymentParams::<f32> {
            distance_km: 0.02,
            ..Default::default()
        };
        let theta = breakeven_theta(&radio, &deploy).unwrap();
        assert!((theta - 329.4).abs() < 0.5, "{theta}");
    }

    #[test]
    fn profile_parsing() {
        assert_eq!("9MHz".parse::<BandwidthProfile>().unwrap(), BandwidthProfile::Mhz9);
        assert!("5mhz".parse::<BandwidthProfile>().is_err());
    }
}
