//! Seeded Monte-Carlo check of the closed-form amplifier results.
//!
//! Input samples are circular complex Gaussian, `x ~ CN(0, sigma2)`, drawn by
//! Box-Muller from two uniforms: `|x|^2 = -sigma2 * ln(u1)` with `u1` in
//! `(0, 1]` and phase `2*pi*u2`. Uniforms come from ChaCha8 seeded with
//! `seed`; the sample stream is cut into fixed chunks of [`CHUNK_SAMPLES`]
//! and chunk `k` uses ChaCha stream `k`. Chunks may be evaluated on any
//! number of threads, but their moments are merged in chunk order, so a
//! given `(seed, config)` always yields bit-identical estimates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Error, Result};

pub const CHUNK_SAMPLES: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    /// Mean input power, watts.
    pub sigma2: f64,
    /// Clipping power, watts.
    pub p_max: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// When set, receiver noise `p_max / snr_max` is added for the SINR estimate.
    pub snr_max_linear: Option<f64>,
}

impl McConfig {
    /// Config with `sigma2 = 1` at the given linear IBO.
    pub fn at_ibo(ibo_linear: f64, n_samples: u64, seed: u64) -> Self {
        McConfig {
            sigma2: 1.0,
            p_max: ibo_linear,
            n_samples,
            seed,
            snr_max_linear: None,
        }
    }

    pub fn ibo_linear(&self) -> f64 {
        self.p_max / self.sigma2
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::domain("n_samples must be at least 1", 0.0));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::domain("sigma2 must be positive", self.sigma2));
        }
        if !(self.p_max > 0.0) || !self.p_max.is_finite() {
            return Err(Error::domain("p_max must be positive", self.p_max));
        }
        if let Some(s) = self.snr_max_linear {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::domain("snr_max_linear must be positive", s));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// `Re(mean(x_out * conj(x))) / sigma2`.
    pub alpha_hat: f64,
    /// Imaginary part of the same cross-moment; zero in expectation.
    pub alpha_imag_hat: f64,
    /// `mean(|x_out - alpha_hat * x|^2)`, watts.
    pub distortion_power_hat: f64,
    pub sinr_hat: Option<f64>,
    /// `mean(4/pi * sqrt(|x_out|^2 * p_max))`, watts.
    pub pa_power_hat: f64,
    /// `mean(|x|)`; Rayleigh mean `sqrt(pi * sigma2) / 2`.
    pub mean_amplitude_hat: f64,
    pub stderr_alpha: f64,
    pub stderr_alpha_imag: f64,
    pub stderr_distortion: f64,
    /// Delta-method error of `sinr_hat`, treating alpha and distortion as independent.
    pub stderr_sinr: Option<f64>,
    pub stderr_pa: f64,
    pub stderr_amplitude: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Soft limiter: samples below `sqrt(p_max)` in magnitude pass unchanged,
/// larger ones are scaled onto the circle of radius `sqrt(p_max)`.
pub fn soft_limit(sample: Complex64, p_max: f64) -> Complex64 {
    let limit = p_max.sqrt();
    let mag = sample.norm();
    if mag < limit {
        sample
    } else {
        sample * (limit / mag)
    }
}

/// Running mean and centred second moment (Welford / Chan merge).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng, sigma2: f64) -> Complex64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let r = (-sigma2 * u1.ln()).sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * u2)
}

fn chunk_len(config: &McConfig, chunk: u64) -> u64 {
    (config.n_samples - chunk * CHUNK_SAMPLES).min(CHUNK_SAMPLES)
}

#[derive(Debug, Clone, Copy, Default)]
struct FirstPass {
    cross_re: Moments,
    cross_im: Moments,
    pa: Moments,
    amplitude: Moments,
}

impl FirstPass {
    fn merge(&mut self, o: &FirstPass) {
        self.cross_re.merge(&o.cross_re);
        self.cross_im.merge(&o.cross_im);
        self.pa.merge(&o.pa);
        self.amplitude.merge(&o.amplitude);
    }
}

fn merged<T: Default, F: Fn(&mut T, &T)>(parts: Vec<T>, merge: F) -> T {
    let mut acc = T::default();
    for p in &parts {
        merge(&mut acc, p);
    }
    acc
}

/// Draws `n_samples` inputs, passes them through the soft limiter and
/// estimates the Bussgang gain, distortion power, class-B supply power and
/// (optionally) SINR with their standard errors.
pub fn run_mc(config: &McConfig) -> Result<McEstimate> {
    config.validate()?;
    let n_chunks = config.n_samples.div_ceil(CHUNK_SAMPLES);
    let pa_scale = 4.0 / std::f64::consts::PI * config.p_max.sqrt();

    let first: Vec<FirstPass> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(config.seed, k);
            let mut acc = FirstPass::default();
            for _ in 0..chunk_len(config, k) {
                let x = gaussian(&mut rng, config.sigma2);
                let y = soft_limit(x, config.p_max);
                let cross = y * x.conj();
                acc.cross_re.push(cross.re);
                acc.cross_im.push(cross.im);
                acc.pa.push(pa_scale * y.norm());
                acc.amplitude.push(x.norm());
            }
            acc
        })
        .collect();
    let first = merged(first, FirstPass::merge);
    let alpha_hat = first.cross_re.mean / config.sigma2;

    let second: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(config.seed, k);
            let mut acc = Moments::default();
            for _ in 0..chunk_len(config, k) {
                let x = gaussian(&mut rng, config.sigma2);
                let y = soft_limit(x, config.p_max);
                acc.push((y - x * alpha_hat).norm_sqr());
            }
            acc
        })
        .collect();
    let distortion = merged(second, Moments::merge);

    let stderr_alpha = first.cross_re.stderr() / config.sigma2;
    let stderr_distortion = distortion.stderr();
    let (sinr_hat, stderr_sinr) = match config.snr_max_linear {
        Some(snr_max) => {
            let noise = config.p_max / snr_max;
            let interference = distortion.mean + noise;
            let sinr = alpha_hat * alpha_hat * config.sigma2 / interference;
            let d_alpha = 2.0 * alpha_hat * config.sigma2 / interference;
            let d_dist = -sinr / interference;
            let se = ((d_alpha * stderr_alpha).powi(2) + (d_dist * stderr_distortion).powi(2)).sqrt();
            (Some(sinr), Some(se))
        }
        None => (None, None),
    };

    let est = McEstimate {
        alpha_hat,
        alpha_imag_hat: first.cross_im.mean / config.sigma2,
        distortion_power_hat: distortion.mean,
        sinr_hat,
        pa_power_hat: first.pa.mean,
        mean_amplitude_hat: first.amplitude.mean,
        stderr_alpha,
        stderr_alpha_imag: first.cross_im.stderr() / config.sigma2,
        stderr_distortion,
        stderr_sinr,
        stderr_pa: first.pa.stderr(),
        stderr_amplitude: first.amplitude.stderr(),
        n_samples: config.n_samples,
        seed: config.seed,
    };
    let all_finite = [
        est.alpha_hat,
        est.distortion_power_hat,
        est.pa_power_hat,
        est.mean_amplitude_hat,
        est.stderr_alpha,
        est.stderr_distortion,
        est.stderr_pa,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !all_finite || sinr_hat.is_some_and(|s| !s.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite Monte-Carlo accumulation (seed {}, {} samples)",
            config.seed, config.n_samples
        )));
    }
    Ok(est)
}
