use proptest::prelude::*;

use fog_offload::chain::{
    breakeven_theta, local_power, offload_power, solve_offload, BandwidthProfile, DeploymentParams,
    RadioParams,
};
use fog_offload::link::{
    noise_dbm, path_gain_db, required_p_max, required_sinr, shannon_rate, solve_link, LinkGeometry,
};
use fog_offload::numerics::{erf, erfc, solve_bisection, solve_newton};
use fog_offload::pa::{
    bussgang_alpha, bussgang_alpha_complement, optimal_ibo, pa_consumed_power, sinr_approx_db,
    sinr_of_ibo,
};
use fog_offload::units::{db_to_linear, linear_to_db};

fn geometry(distance_km: f64, bandwidth_hz: f64, cameras: u32, rate_bps: f64) -> LinkGeometry<f64> {
    LinkGeometry {
        distance_km,
        carrier_hz: 3.5e9,
        bandwidth_hz,
        cameras,
        rate_bps,
        beta: 0.4,
    }
}

fn deployment(cameras: u32, distance_km: f64) -> DeploymentParams<f64> {
    DeploymentParams {
        cameras,
        distance_km,
        ..Default::default()
    }
}

fn profile() -> impl Strategy<Value = BandwidthProfile> {
    prop_oneof![Just(BandwidthProfile::Mhz9), Just(BandwidthProfile::Mhz18)]
}

proptest! {
    #[test]
    fn erf_is_odd(x in -8.0..8.0_f64) {
        prop_assert_eq!(erf(-x).unwrap(), -erf(x).unwrap());
    }

    #[test]
    fn erf_and_erfc_sum_to_one(x in 0.0..6.0_f64) {
        let s = erf(x).unwrap() + erfc(x).unwrap();
        prop_assert!((s - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn newton_agrees_with_bisection_on_monotone_functions(
        root in -5.0..5.0_f64,
        a in 0.1..10.0_f64,
        b in 0.0..5.0_f64,
        seed in 0.0..1.0_f64,
    ) {
        let f = |x: f64| a * (x - root) + b * (x - root).powi(3);
        let df = |x: f64| a + 3.0 * b * (x - root).powi(2);
        let (lo, hi) = (root - 3.0, root + 4.0);
        let n = solve_newton(f, df, lo + seed * (hi - lo), 1e-13, 200).unwrap();
        let bis = solve_bisection(f, lo, hi, 1e-14).unwrap();
        prop_assert!((n.root - bis.root).abs() <= 1e-8);
    }

    #[test]
    fn alpha_increases_with_backoff(i in 1e-6..50.0_f64, step in 1e-3..1.0_f64) {
        let j = (i * (1.0 + step)).min(50.0);
        prop_assume!(j > i);
        let a = bussgang_alpha(i).unwrap();
        let b = bussgang_alpha(j).unwrap();
        prop_assert!(a <= b);
        prop_assert!(a > 0.0 && b <= 1.0);
        // alpha itself rounds to 1 beyond IBO ~ 36; its complement stays resolvable
        prop_assert!(bussgang_alpha_complement(j).unwrap() < bussgang_alpha_complement(i).unwrap());
    }

    #[test]
    fn optimal_ibo_grows_with_snr(snr_db in -10.0..50.0_f64, step in 0.01..5.0_f64) {
        let lo = optimal_ibo(db_to_linear(snr_db)).unwrap().ibo_linear;
        let hi = optimal_ibo(db_to_linear(snr_db + step)).unwrap().ibo_linear;
        prop_assert!(lo < hi);
    }

    #[test]
    fn perturbing_optimal_ibo_never_helps(snr_db in -10.0..50.0_f64, f in prop_oneof![Just(0.9), Just(0.99), Just(1.01), Just(1.1)]) {
        let snr = db_to_linear(snr_db);
        let opt = optimal_ibo(snr).unwrap();
        prop_assert!(sinr_of_ibo(opt.ibo_linear * f, snr).unwrap() <= opt.sinr_linear);
    }

    #[test]
    fn approximation_error_is_bounded(snr_db in -10.0..50.0_f64) {
        let exact = linear_to_db(optimal_ibo(db_to_linear(snr_db)).unwrap().sinr_linear);
        prop_assert!((sinr_approx_db(snr_db) - exact).abs() < 0.511);
    }

    #[test]
    fn pa_power_scales_linearly_with_clip_power(p in 1e-6..10.0_f64, k in 0.01..100.0_f64, ibo_db in -10.0..20.0_f64) {
        let ibo = db_to_linear(ibo_db);
        let base = pa_consumed_power(p, ibo).unwrap();
        let scaled = pa_consumed_power(k * p, ibo).unwrap();
        prop_assert!((scaled - k * base).abs() <= 1e-12 * k * base);
    }

    #[test]
    fn required_sinr_is_monotone(b in 3e6..20e6_f64, m in 1u32..10, r in 1e5..6e6_f64) {
        let base = required_sinr(&geometry(0.1, b, m, r)).unwrap();
        prop_assert!(required_sinr(&geometry(0.1, b, m + 1, r)).unwrap() > base);
        prop_assert!(required_sinr(&geometry(0.1, b, m, r * 1.01)).unwrap() > base);
        prop_assert!(required_sinr(&geometry(0.1, b * 1.01, m, r)).unwrap() < base);
    }

    #[test]
    fn clip_power_is_monotone(d in 0.01..2.0_f64, b in 3e6..20e6_f64, m in 1u32..9, r in 1e5..6e6_f64) {
        let p_max = |g: LinkGeometry<f64>| {
            let gain = path_gain_db(g.distance_km, g.carrier_hz).unwrap();
            required_p_max(&g, gain, noise_dbm(g.bandwidth_hz).unwrap()).unwrap()
        };
        let base = p_max(geometry(d, b, m, r));
        prop_assert!(p_max(geometry(d * 1.01, b, m, r)) > base);
        prop_assert!(p_max(geometry(d, b, m + 1, r)) > base);
        prop_assert!(p_max(geometry(d, b, m, r * 1.01)) > base);
        prop_assert!(p_max(geometry(d, b * 1.01, m, r)) < base);
    }

    #[test]
    fn offload_power_grows_with_distance(p in profile(), m in prop_oneof![Just(1u32), Just(10)], d in 0.01..2.0_f64, f in 1.0..3.0_f64) {
        let radio = RadioParams::reference(p);
        let near = offload_power(&radio, &deployment(m, d)).unwrap().total_w;
        let far = offload_power(&radio, &deployment(m, d * f)).unwrap().total_w;
        prop_assert!(near <= far);
    }

    #[test]
    fn shared_channel_lowers_breakeven_at_short_range(d in 0.01..0.2_f64) {
        let radio = RadioParams::reference(BandwidthProfile::Mhz18);
        let one = breakeven_theta(&radio, &deployment(1, d)).unwrap();
        let ten = breakeven_theta(&radio, &deployment(10, d)).unwrap();
        prop_assert!(ten < one, "d = {d}: {ten} >= {one}");
    }

    #[test]
    fn link_delivers_requested_rate_within_fit_error(d in 0.01..2.0_f64, b in 3e6..20e6_f64, m in 1u32..10) {
        let g = geometry(d, b, m, 6e6);
        let required_db = linear_to_db(required_sinr(&g).unwrap());
        let (channel, op) = solve_link(&g).unwrap();
        let snr_db = linear_to_db(channel.snr_max_linear());
        prop_assert!((sinr_approx_db(snr_db) - required_db).abs() < 1e-9);
        // the linear dB fit is only calibrated on this SNR_MAX range
        prop_assume!((-10.0..=50.0).contains(&snr_db));
        let slack_db = 0.511;
        prop_assert!((op.sinr_db() - required_db).abs() < slack_db);
        let rate = shannon_rate(b, m, 0.4, op.sinr_linear);
        let s = db_to_linear(required_db);
        let bound = shannon_rate(b, m, 0.4, s * db_to_linear(slack_db)) - 6e6;
        prop_assert!((rate - 6e6).abs() <= bound, "rate {rate}, bound {bound}");
    }

    #[test]
    fn breakdown_is_additive(p in profile(), m in 1u32..=10, d in 0.01..2.0_f64) {
        let s = solve_offload(&RadioParams::reference(p), &deployment(m, d)).unwrap();
        let sum: f64 = s.breakdown.components().iter().sum();
        prop_assert!((sum - s.breakdown.total_w).abs() <= 1e-12 * s.breakdown.total_w);
        prop_assert!(s.breakdown.components().iter().all(|c| *c >= 0.0));
    }

    #[test]
    fn breakeven_round_trips(p in profile(), m in 1u32..=10, d in 0.01..2.0_f64) {
        let radio = RadioParams::reference(p);
        let deploy = deployment(m, d);
        let theta = breakeven_theta(&radio, &deploy).unwrap();
        let local = local_power(theta, deploy.rate_bps, deploy.gamma_flops_per_w).unwrap();
        let total = offload_power(&radio, &deploy).unwrap().total_w;
        prop_assert!((local - total).abs() <= 1e-9 * total);
    }
}

#[test]
fn shared_channel_lowers_breakeven_at_reference_distances() {
    let radio = RadioParams::reference(BandwidthProfile::Mhz18);
    for d in [0.02, 0.05, 0.1] {
        let one = breakeven_theta(&radio, &deployment(1, d)).unwrap();
        let ten = breakeven_theta(&radio, &deployment(10, d)).unwrap();
        assert!(ten < one, "d = {d}");
    }
}

#[test]
fn approximation_error_extremes() {
    let err = |x: f64| sinr_approx_db(x) - linear_to_db(optimal_ibo(db_to_linear(x)).unwrap().sinr_linear);
    assert!((err(-10.0) - 0.510856).abs() < 1e-5);
    assert!((err(-9.9) - 0.496950).abs() < 1e-5);
    assert!((err(2.5) + 0.500548).abs() < 1e-5);
    assert!((err(20.0) - 0.233330).abs() < 1e-5);
}
