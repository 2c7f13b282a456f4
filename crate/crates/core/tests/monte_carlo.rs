use num_complex::Complex64;

use fog_offload::mc_oracle::{run_mc, soft_limit, McConfig, CHUNK_SAMPLES};
use fog_offload::pa::{bussgang_alpha, distortion_power, optimal_ibo, pa_consumed_power};
use fog_offload::units::db_to_linear;

fn within(analytic: f64, estimate: f64, stderr: f64, k: f64) -> bool {
    (estimate - analytic).abs() <= k * stderr
}

#[test]
fn soft_limit_preserves_phase() {
    let x = Complex64::new(3.0, 4.0);
    let y = soft_limit(x, 1.0);
    assert!((y.norm() - 1.0).abs() < 1e-15);
    assert!((y.arg() - x.arg()).abs() < 1e-15);
    assert_eq!(soft_limit(Complex64::new(0.1, -0.2), 1.0), Complex64::new(0.1, -0.2));
}

#[test]
fn identical_across_thread_counts() {
    let cfg = McConfig {
        snr_max_linear: Some(100.0),
        ..McConfig::at_ibo(1.0, 5 * CHUNK_SAMPLES + 123, 9)
    };
    let run_on = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_mc(&cfg).unwrap())
    };
    let one = run_on(1);
    assert_eq!(one, run_on(4));
    assert_eq!(one, run_mc(&cfg).unwrap());
    assert_ne!(one, run_mc(&McConfig { seed: 10, ..cfg }).unwrap());
}

#[test]
fn standard_error_shrinks_with_root_n() {
    let small = run_mc(&McConfig::at_ibo(1.0, 10_000, 3)).unwrap();
    let large = run_mc(&McConfig::at_ibo(1.0, 1_000_000, 3)).unwrap();
    let ratio = small.stderr_alpha / large.stderr_alpha;
    assert!((ratio - 10.0).abs() < 1.0, "ratio {ratio}");
    let ratio = small.stderr_pa / large.stderr_pa;
    assert!((ratio - 10.0).abs() < 1.0, "ratio {ratio}");
}

#[test]
fn input_amplitude_is_rayleigh() {
    let cfg = McConfig {
        sigma2: 2.5,
        p_max: 2.5,
        ..McConfig::at_ibo(1.0, 1_000_000, 11)
    };
    let est = run_mc(&cfg).unwrap();
    let mean = (std::f64::consts::PI * 2.5).sqrt() / 2.0;
    assert!(within(mean, est.mean_amplitude_hat, est.stderr_amplitude, 3.0));
    assert!(within(0.0, est.alpha_imag_hat, est.stderr_alpha_imag, 4.0));
}

#[test]
fn estimates_match_closed_forms_at_unit_backoff() {
    let est = run_mc(&McConfig::at_ibo(1.0, 2_000_000, 5)).unwrap();
    let alpha = bussgang_alpha(1.0).unwrap();
    assert!(within(alpha, est.alpha_hat, est.stderr_alpha, 4.0), "{} vs {alpha}", est.alpha_hat);
    let dist = distortion_power(1.0, 1.0).unwrap();
    assert!(within(dist, est.distortion_power_hat, est.stderr_distortion, 4.0));
    let pa = pa_consumed_power(1.0, 1.0).unwrap();
    assert!(within(pa, est.pa_power_hat, est.stderr_pa, 4.0));
    assert!(est.sinr_hat.is_none() && est.stderr_sinr.is_none());
}

#[test]
fn no_clipping_means_no_distortion() {
    let est = run_mc(&McConfig::at_ibo(1e6, 200_000, 1)).unwrap();
    // with nothing clipped, the only residual is alpha_hat's sampling error
    assert!(within(1.0, est.alpha_hat, est.stderr_alpha, 4.0));
    let residual = (1.0 - est.alpha_hat).powi(2);
    assert!(est.distortion_power_hat < 1.1 * residual + 1e-15);
}

#[test]
fn empirical_sinr_peaks_at_optimal_backoff() {
    let snr = db_to_linear(20.0);
    let opt = optimal_ibo(snr).unwrap();
    let sinr_at = |ibo: f64| {
        let cfg = McConfig {
            snr_max_linear: Some(snr),
            ..McConfig::at_ibo(ibo, 1_000_000, 21)
        };
        run_mc(&cfg).unwrap()
    };
    let best = sinr_at(opt.ibo_linear);
    let best_sinr = best.sinr_hat.unwrap();
    assert!(within(opt.sinr_linear, best_sinr, best.stderr_sinr.unwrap(), 3.0));
    for other in [opt.ibo_linear * 2.0, opt.ibo_linear / 2.0] {
        assert!(sinr_at(other).sinr_hat.unwrap() < best_sinr, "ibo {other}");
    }
}

#[test]
fn rejects_invalid_configs() {
    assert!(run_mc(&McConfig::at_ibo(1.0, 0, 1)).is_err());
    assert!(run_mc(&McConfig::at_ibo(-1.0, 10, 1)).is_err());
    assert!(run_mc(&McConfig {
        snr_max_linear: Some(0.0),
        ..McConfig::at_ibo(1.0, 10, 1)
    })
    .is_err());
}
