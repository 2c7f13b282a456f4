//! Flat TOML scenario files.
//!
//! Every key is optional; missing keys keep the reference values. Units are
//! fixed per key and spelled out in the key name where ambiguous. The
//! optional `bandwidth_profile` key (`"9mhz"` or `"18mhz"`) sets
//! `sample_rate_hz`, `bandwidth_hz` and `n_ofdm` together; explicit values
//! for those keys then override the profile.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::chain::{BandwidthProfile, DeploymentParams, RadioParams};
use crate::{Error, Result};

/// Profile used when neither the file nor the command line picks one.
pub const DEFAULT_PROFILE: BandwidthProfile = BandwidthProfile::Mhz18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub radio: RadioParams<f64>,
    pub deploy: DeploymentParams<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            radio: RadioParams::reference(DEFAULT_PROFILE),
            deploy: DeploymentParams::default(),
        }
    }
}

impl Scenario {
    pub fn with_profile(mut self, profile: BandwidthProfile) -> Self {
        self.radio.apply_profile(profile);
        self
    }

    pub fn with_cameras(mut self, cameras: u32) -> Self {
        self.deploy.cameras = cameras;
        self
    }

    pub fn with_distance_km(mut self, distance_km: f64) -> Self {
        self.deploy.distance_km = distance_km;
        self
    }

    /// Checks every parameter, reporting the offending key by name.
    pub fn validate(&self) -> Result<()> {
        self.radio.validate().map_err(keyed)?;
        self.deploy.validate().map_err(keyed)?;
        Ok(())
    }

    /// Renders the scenario as a complete config file.
    pub fn to_toml(&self) -> String {
        let r = &self.radio;
        let d = &self.deploy;
        let mut out = String::new();
        let mut line = |key: &str, value: String, unit: &str| {
            let _ = writeln!(out, "{key} = {value:<16} # {unit}");
        };
        line("cameras", d.cameras.to_string(), "count, TDMA-shared");
        line("distance_km", fmt_toml(d.distance_km), "km, >= 0.01");
        line("carrier_hz", fmt_toml(d.carrier_hz), "Hz");
        line("rate_bps", fmt_toml(d.rate_bps), "bit/s per camera");
        line("p_video_w", fmt_toml(d.p_video_w), "W, video coder");
        line("gamma_flops_per_w", fmt_toml(d.gamma_flops_per_w), "FLOPS/W, local processor");
        line("theta_flop_per_bit", fmt_toml(d.theta_flop_per_bit), "FLOP per encoded bit");
        line("sample_rate_hz", fmt_toml(r.sample_rate_hz), "Hz, DAC rate f_s");
        line("bandwidth_hz", fmt_toml(r.bandwidth_hz), "Hz, useful band B");
        line("n_ofdm", r.n_ofdm.to_string(), "IFFT size = sample_rate_hz / delta_f_hz");
        line("delta_f_hz", fmt_toml(r.delta_f_hz), "Hz, subcarrier spacing");
        line("gamma_mod_flops_per_w", fmt_toml(r.gamma_mod_flops_per_w), "FLOPS/W, modem");
        line("dac_bits", r.dac_bits.to_string(), "bits");
        line("v_dd", fmt_toml(r.v_dd), "V");
        line("i_0", fmt_toml(r.i_0), "A per LSB");
        line("c_p", fmt_toml(r.c_p), "F");
        line("p_lo_w", fmt_toml(r.p_lo_w), "W, local oscillator");
        line("p_mix_w", fmt_toml(r.p_mix_w), "W, per mixer");
        line("psi_w_per_bps", fmt_toml(r.psi_w_per_bps), "W per bit/s, channel coder");
        line("beta", fmt_toml(r.beta), "Shannon scaling, 0.4 urban SIMO / 0.55 AWGN SISO");
        out
    }
}

fn fmt_toml(x: f64) -> String {
    // `{:?}` always keeps a decimal point or exponent, so TOML reads a float back
    format!("{x:?}")
}

fn keyed(err: Error) -> Error {
    match err {
        Error::Domain { what, value } => {
            let key = what.split(' ').next().unwrap_or(what);
            Error::ConfigValue {
                key,
                reason: format!("{what} (got {value})"),
            }
        }
        other => other,
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    bandwidth_profile: Option<BandwidthProfile>,
    cameras: Option<u32>,
    distance_km: Option<f64>,
    carrier_hz: Option<f64>,
    rate_bps: Option<f64>,
    p_video_w: Option<f64>,
    gamma_flops_per_w: Option<f64>,
    theta_flop_per_bit: Option<f64>,
    sample_rate_hz: Option<f64>,
    bandwidth_hz: Option<f64>,
    n_ofdm: Option<u32>,
    delta_f_hz: Option<f64>,
    gamma_mod_flops_per_w: Option<f64>,
    dac_bits: Option<u32>,
    v_dd: Option<f64>,
    i_0: Option<f64>,
    c_p: Option<f64>,
    p_lo_w: Option<f64>,
    p_mix_w: Option<f64>,
    psi_w_per_bps: Option<f64>,
    beta: Option<f64>,
}

/// Parses config text on top of the reference scenario.
pub fn parse_config(text: &str) -> Result<Scenario> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    let mut s = Scenario::default();
    if let Some(p) = file.bandwidth_profile {
        s.radio.apply_profile(p);
    }
    macro_rules! set {
        ($($target:ident . $field:ident),* $(,)?) => {
            $(if let Some(v) = file.$field { s.$target.$field = v; })*
        };
    }
    set!(
        deploy.cameras,
        deploy.distance_km,
        deploy.carrier_hz,
        deploy.rate_bps,
        deploy.p_video_w,
        deploy.gamma_flops_per_w,
        deploy.theta_flop_per_bit,
        radio.sample_rate_hz,
        radio.bandwidth_hz,
        radio.n_ofdm,
        radio.delta_f_hz,
        radio.gamma_mod_flops_per_w,
        radio.dac_bits,
        radio.v_dd,
        radio.i_0,
        radio.c_p,
        radio.p_lo_w,
        radio.p_mix_w,
        radio.psi_w_per_bps,
        radio.beta,
    );
    s.validate()?;
    Ok(s)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::ConfigParse(msg) => Error::ConfigParse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
