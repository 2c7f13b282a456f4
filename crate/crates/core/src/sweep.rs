//! Parameter sweeps and the CSV tables they produce.
//!
//! Points are evaluated in parallel; rows always come out grouped by
//! scenario combination and ordered by ascending swept value. Numbers are
//! rendered with nine significant digits and no locale dependence, so
//! identical inputs give byte-identical CSV.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::chain::{self, BandwidthProfile};
use crate::config::Scenario;
use crate::mc_oracle::{self, McConfig};
use crate::units::{db_to_linear, linear_to_db, watts_to_dbm};
use crate::{link, pa, Error, Result};

/// Camera counts compared in the bandwidth and distance sweeps.
pub const CAMERA_COUNTS: [u32; 2] = [1, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    SnrMaxDb,
    BandwidthHz,
    DistanceKm,
    Theta,
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::SnrMaxDb => "snr_max_db",
            SweepVariable::BandwidthHz => "bandwidth_hz",
            SweepVariable::DistanceKm => "distance_km",
            SweepVariable::Theta => "theta_flop_per_bit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

/// One swept axis on top of a fixed scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: GridScale,
    pub fixed: Scenario,
    /// Variables pinned explicitly by the caller; the swept one may not be among them.
    pub overridden: Vec<SweepVariable>,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, from: f64, to: f64, steps: usize, fixed: Scenario) -> Self {
        SweepSpec {
            variable,
            from,
            to,
            steps,
            scale: GridScale::Linear,
            fixed,
            overridden: Vec::new(),
        }
    }

    pub fn log(mut self) -> Self {
        self.scale = GridScale::Log;
        self
    }

    pub fn with_overridden(mut self, overridden: &[SweepVariable]) -> Self {
        self.overridden = overridden.to_vec();
        self
    }

    /// A range is either `from < to` with at least two steps, or the single
    /// point `from == to` with one step.
    pub fn validate(&self) -> Result<()> {
        if !self.from.is_finite() || !self.to.is_finite() {
            return Err(Error::Sweep(format!("{} range must be finite", self.variable)));
        }
        let single = self.steps == 1 && self.from == self.to;
        if !single && !(self.from < self.to && self.steps >= 2) {
            return Err(Error::Sweep(format!(
                "{} range needs from < to and steps >= 2 (got {}..{}, {} steps)",
                self.variable, self.from, self.to, self.steps
            )));
        }
        if self.scale == GridScale::Log && !(self.from > 0.0) {
            return Err(Error::Sweep(format!("{} log grid must start above 0", self.variable)));
        }
        if self.overridden.contains(&self.variable) {
            return Err(Error::Sweep(format!(
                "{} is swept and cannot also be fixed by an override",
                self.variable
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.steps == 1 {
            return Ok(vec![self.from]);
        }
        let n = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| {
                let t = i as f64 / n;
                match self.scale {
                    GridScale::Linear => self.from + (self.to - self.from) * t,
                    GridScale::Log => self.from * (self.to / self.from).powf(t),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub columns: Vec<f64>,
}

/// CSV-ready result: header (swept column first), rows, and optional
/// `#`-prefixed trailer lines.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
    pub trailer: Vec<String>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| *h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| if idx == 0 { r.x } else { r.columns[idx - 1] })
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let mut line = format_number(row.x);
            for v in &row.columns {
                line.push(',');
                line.push_str(&format_number(*v));
            }
            writeln!(out, "{line}")?;
        }
        for t in &self.trailer {
            writeln!(out, "# {t}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    fn check_finite(&self) -> Result<()> {
        for row in &self.rows {
            if !row.x.is_finite() || row.columns.iter().any(|v| !v.is_finite()) {
                return Err(Error::Sweep(format!("non-finite value in row at x = {}", row.x)));
            }
        }
        Ok(())
    }
}

/// Nine significant digits: fixed notation for magnitudes in `[1e-4, 1e9)`,
/// scientific otherwise.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..9).contains(&exp) {
        format!("{:.*}", (8 - exp) as usize, x)
    } else {
        sci
    }
}

fn context(what: String) -> impl Fn(Error) -> Error {
    move |e| Error::Sweep(format!("{what}: {e}"))
}

/// Optimal IBO, exact maximum SINR and its dB-linear fit against `SNR_MAX`.
/// A trailer line reports the largest fit error.
pub fn sweep_fig3(from_db: f64, to_db: f64, steps: usize) -> Result<SweepTable> {
    let spec = SweepSpec::new(SweepVariable::SnrMaxDb, from_db, to_db, steps, Scenario::default());
    let rows = spec
        .points()?
        .into_par_iter()
        .map(|x| {
            let opt = pa::optimal_ibo(db_to_linear(x)).map_err(context(format!("snr_max_db = {x}")))?;
            Ok(SweepRow {
                x,
                columns: vec![
                    linear_to_db(opt.ibo_linear),
                    linear_to_db(opt.sinr_linear),
                    pa::sinr_approx_db(x),
                ],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_err = rows
        .iter()
        .map(|r| (r.columns[1] - r.columns[2]).abs())
        .fold(0.0, f64::max);
    let table = SweepTable {
        header: vec!["snr_max_db", "ibo_db_optimal", "sinr_db_exact", "sinr_db_approx"],
        rows,
        trailer: vec![format!("max_abs_approx_error_db,{}", format_number(max_err))],
    };
    table.check_finite()?;
    Ok(table)
}

/// Required SINR and resulting optimal IBO against useful bandwidth, for
/// one and ten cameras.
pub fn sweep_fig4(base: &Scenario, from_hz: f64, to_hz: f64, steps: usize) -> Result<SweepTable> {
    sweep_fig4_spec(&SweepSpec::new(SweepVariable::BandwidthHz, from_hz, to_hz, steps, *base))
}

pub fn sweep_fig4_spec(spec: &SweepSpec) -> Result<SweepTable> {
    let points = spec.points()?;
    let mut rows = Vec::new();
    for m in CAMERA_COUNTS {
        let part = points
            .par_iter()
            .map(|&b| {
                let mut s = spec.fixed.with_cameras(m);
                s.radio.bandwidth_hz = b;
                let g = s.deploy.geometry(&s.radio);
                let ctx = context(format!("bandwidth_hz = {b}, cameras = {m}"));
                let required = link::required_sinr(&g).map_err(&ctx)?;
                let (_, op) = link::solve_link(&g).map_err(&ctx)?;
                Ok(SweepRow {
                    x: b,
                    columns: vec![
                        f64::from(m),
                        linear_to_db(required),
                        linear_to_db(op.snr_max_linear),
                        op.ibo_db(),
                        op.sinr_db(),
                    ],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(part);
    }
    let table = SweepTable {
        header: vec!["bandwidth_hz", "cameras", "sinr_db", "snr_max_db", "ibo_db", "sinr_db_achieved"],
        rows,
        trailer: Vec::new(),
    };
    table.check_finite()?;
    Ok(table)
}

/// The four `(profile, cameras)` combinations plotted against distance.
pub fn combos() -> Vec<(BandwidthProfile, u32)> {
    BandwidthProfile::ALL
        .iter()
        .flat_map(|&p| CAMERA_COUNTS.iter().map(move |&m| (p, m)))
        .collect()
}

fn distance_sweep<F>(spec: &SweepSpec, header: Vec<&'static str>, eval: F) -> Result<SweepTable>
where
    F: Fn(&Scenario) -> Result<Vec<f64>> + Sync,
{
    let points = spec.points()?;
    let mut rows = Vec::new();
    for (profile, m) in combos() {
        let base = spec.fixed.with_profile(profile).with_cameras(m);
        let part = points
            .par_iter()
            .map(|&d| {
                let s = base.with_distance_km(d);
                let mut columns = vec![s.radio.bandwidth_hz, f64::from(m)];
                columns.extend(eval(&s).map_err(context(format!(
                    "distance_km = {d}, bandwidth_hz = {}, cameras = {m}",
                    s.radio.bandwidth_hz
                )))?);
                Ok(SweepRow { x: d, columns })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(part);
    }
    let table = SweepTable {
        header,
        rows,
        trailer: Vec::new(),
    };
    table.check_finite()?;
    Ok(table)
}

/// Offloading power and its components (dBm) against distance.
pub fn sweep_fig5(base: &Scenario, from_km: f64, to_km: f64, steps: usize) -> Result<SweepTable> {
    sweep_fig5_spec(&SweepSpec::new(SweepVariable::DistanceKm, from_km, to_km, steps, *base).log())
}

pub fn sweep_fig5_spec(spec: &SweepSpec) -> Result<SweepTable> {
    let header = vec![
        "distance_km",
        "bandwidth_hz",
        "cameras",
        "total_dbm",
        "video_dbm",
        "cod_dbm",
        "ofdm_dbm",
        "dac_dbm",
        "lo_dbm",
        "mix_dbm",
        "pa_dbm",
        "ibo_db",
    ];
    distance_sweep(spec, header, |s| {
        let sol = chain::solve_offload(&s.radio, &s.deploy)?;
        let mut cols = vec![sol.breakdown.total_dbm()];
        cols.extend(sol.breakdown.components_dbm());
        cols.push(sol.operating_point.ibo_db());
        Ok(cols)
    })
}

/// Break-even complexity against distance.
pub fn sweep_fig6(base: &Scenario, from_km: f64, to_km: f64, steps: usize) -> Result<SweepTable> {
    sweep_fig6_spec(&SweepSpec::new(SweepVariable::DistanceKm, from_km, to_km, steps, *base).log())
}

pub fn sweep_fig6_spec(spec: &SweepSpec) -> Result<SweepTable> {
    let header = vec!["distance_km", "bandwidth_hz", "cameras", "theta_star"];
    distance_sweep(spec, header, |s| {
        Ok(vec![chain::breakeven_theta(&s.radio, &s.deploy)?])
    })
}

/// Local versus offload power for one scenario, optionally swept over the
/// task complexity.
pub fn breakeven(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.variable != SweepVariable::Theta {
        return Err(Error::Sweep(format!("breakeven sweeps theta, not {}", spec.variable)));
    }
    let s = &spec.fixed;
    let offload = chain::offload_power(&s.radio, &s.deploy)?;
    let theta_star = chain::breakeven_theta(&s.radio, &s.deploy)?;
    let rows = spec
        .points()?
        .into_iter()
        .map(|theta| {
            let local = chain::local_power(theta, s.deploy.rate_bps, s.deploy.gamma_flops_per_w)?;
            Ok(SweepRow {
                x: theta,
                columns: vec![
                    s.deploy.distance_km,
                    s.radio.bandwidth_hz,
                    f64::from(s.deploy.cameras),
                    local,
                    offload.total_w,
                    theta_star,
                    if theta > theta_star { 1.0 } else { 0.0 },
                ],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = SweepTable {
        header: vec![
            "theta_flop_per_bit",
            "distance_km",
            "bandwidth_hz",
            "cameras",
            "local_w",
            "offload_w",
            "theta_star",
            "offload_wins",
        ],
        rows,
        trailer: Vec::new(),
    };
    table.check_finite()?;
    Ok(table)
}

/// Full link and power breakdown for one scenario.
pub fn link_power(s: &Scenario) -> Result<SweepTable> {
    let sol = chain::solve_offload(&s.radio, &s.deploy)?;
    let g = s.deploy.geometry(&s.radio);
    let b = &sol.breakdown;
    let op = &sol.operating_point;
    let mut columns = vec![
        s.radio.bandwidth_hz,
        f64::from(s.deploy.cameras),
        sol.channel.path_gain_db,
        sol.channel.noise_dbm,
        linear_to_db(link::required_sinr(&g)?),
        linear_to_db(op.snr_max_linear),
        op.p_max,
        op.ibo_db(),
        op.sigma2,
        op.alpha,
        op.sinr_db(),
    ];
    columns.extend(b.components());
    columns.push(b.total_w);
    columns.push(watts_to_dbm(b.total_w));
    let table = SweepTable {
        header: vec![
            "distance_km",
            "bandwidth_hz",
            "cameras",
            "path_gain_db",
            "noise_dbm",
            "required_sinr_db",
            "snr_max_db",
            "p_max_w",
            "ibo_db",
            "sigma2_w",
            "alpha",
            "sinr_db",
            "video_w",
            "cod_w",
            "ofdm_w",
            "dac_w",
            "lo_w",
            "mix_w",
            "pa_w",
            "total_w",
            "total_dbm",
        ],
        rows: vec![SweepRow {
            x: s.deploy.distance_km,
            columns,
        }],
        trailer: Vec::new(),
    };
    table.check_finite()?;
    Ok(table)
}

/// `|estimate - analytic| <= max(3 * stderr, 1% of |analytic|)`.
pub fn mc_agrees(analytic: f64, estimate: f64, stderr: f64) -> bool {
    (estimate - analytic).abs() <= (3.0 * stderr).max(0.01 * analytic.abs())
}

/// Monte-Carlo check of alpha, distortion power, PA power and SINR at each
/// IBO, with unit input power. Returns the table and whether every row passed.
pub fn mc_verify(ibo_db: &[f64], n_samples: u64, seed: u64, snr_max_db: f64) -> Result<(SweepTable, bool)> {
    let snr_max = db_to_linear(snr_max_db);
    let mut ibos = ibo_db.to_vec();
    ibos.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(ibos.len());
    let mut all_pass = true;
    for x in ibos {
        let ibo = db_to_linear(x);
        let ctx = context(format!("ibo_db = {x}"));
        let cfg = McConfig {
            snr_max_linear: Some(snr_max),
            ..McConfig::at_ibo(ibo, n_samples, seed)
        };
        let est = mc_oracle::run_mc(&cfg).map_err(&ctx)?;
        let alpha = pa::bussgang_alpha(ibo).map_err(&ctx)?;
        let dist = pa::distortion_power(cfg.sigma2, ibo).map_err(&ctx)?;
        let pa_w = pa::pa_consumed_power(cfg.p_max, ibo).map_err(&ctx)?;
        let sinr = pa::sinr_of_ibo(ibo, snr_max).map_err(&ctx)?;
        let sinr_hat = est.sinr_hat.unwrap_or(f64::NAN);
        let pass = mc_agrees(alpha, est.alpha_hat, est.stderr_alpha)
            && mc_agrees(dist, est.distortion_power_hat, est.stderr_distortion)
            && mc_agrees(pa_w, est.pa_power_hat, est.stderr_pa)
            && mc_agrees(sinr, sinr_hat, est.stderr_sinr.unwrap_or(0.0));
        all_pass &= pass;
        rows.push(SweepRow {
            x,
            columns: vec![
                alpha,
                est.alpha_hat,
                est.stderr_alpha,
                dist,
                est.distortion_power_hat,
                est.stderr_distortion,
                pa_w,
                est.pa_power_hat,
                est.stderr_pa,
                sinr,
                sinr_hat,
                if pass { 1.0 } else { 0.0 },
            ],
        });
    }
    let table = SweepTable {
        header: vec![
            "ibo_db",
            "alpha_analytic",
            "alpha_hat",
            "alpha_stderr",
            "distortion_w_analytic",
            "distortion_w_hat",
            "distortion_stderr",
            "pa_w_analytic",
            "pa_w_hat",
            "pa_stderr",
            "sinr_analytic",
            "sinr_hat",
            "pass",
        ],
        rows,
        trailer: vec![format!("samples,{n_samples}"), format!("seed,{seed}")],
    };
    table.check_finite()?;
    Ok((table, all_pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0.00000000");
        assert_eq!(format_number(-0.0), "0.00000000");
        assert_eq!(format_number(26.0), "26.0000000");
        assert_eq!(format_number(-2.23), "-2.23000000");
        assert_eq!(format_number(9e6), "9000000.00");
        assert_eq!(format_number(1.5e9), "1.50000000e9");
        assert_eq!(format_number(2.5e-7), "2.50000000e-7");
        assert_eq!(format_number(0.000123456789), "0.000123456789");
        // rounding across a decade
        assert_eq!(format_number(9.9999999999), "10.0000000");
    }

    #[test]
    fn spec_validation() {
        let s = Scenario::default();
        assert!(SweepSpec::new(SweepVariable::DistanceKm, 1.0, 0.5, 10, s).validate().is_err());
        assert!(SweepSpec::new(SweepVariable::DistanceKm, 0.1, 0.5, 1, s).validate().is_err());
        assert!(SweepSpec::new(SweepVariable::SnrMaxDb, 0.0, 0.0, 1, s).validate().is_ok());
        let pinned = SweepSpec::new(SweepVariable::DistanceKm, 0.1, 1.0, 5, s)
            .with_overridden(&[SweepVariable::DistanceKm]);
        assert!(pinned.validate().is_err());
        assert!(SweepSpec::new(SweepVariable::DistanceKm, 0.0, 1.0, 5, s).log().validate().is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let pts = SweepSpec::new(SweepVariable::DistanceKm, 0.01, 2.0, 50, Scenario::default())
            .log()
            .points()
            .unwrap();
        assert_eq!(pts.len(), 50);
        assert_eq!(pts[0], 0.01);
        assert!((pts[49] - 2.0).abs() < 1e-12);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fig3_single_point() {
        let t = sweep_fig3(0.0, 0.0, 1).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!((t.rows[0].columns[2] + 2.23).abs() < 1e-12);
    }

    #[test]
    fn fig4_infeasible_point_names_scenario() {
        let err = sweep_fig4(&Scenario::default(), 1e6, 2e6, 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cameras = 10"), "{msg}");
    }

    #[test]
    fn breakeven_requires_theta_axis() {
        let spec = SweepSpec::new(SweepVariable::DistanceKm, 0.1, 1.0, 2, Scenario::default());
        assert!(breakeven(&spec).is_err());
        let spec = SweepSpec::new(SweepVariable::Theta, 100.0, 1000.0, 10, Scenario::default());
        let t = breakeven(&spec).unwrap();
        let wins = t.column("offload_wins").unwrap();
        assert_eq!(wins[0], 0.0);
        assert_eq!(wins[9], 1.0);
    }

    #[test]
    fn link_power_row() {
        let t = link_power(&Scenario::default()).unwrap();
        assert_eq!(t.header.len(), t.rows[0].columns.len() + 1);
        let total = t.column("total_w").unwrap()[0];
        let parts: f64 = ["video_w", "cod_w", "ofdm_w", "dac_w", "lo_w", "mix_w", "pa_w"]
            .iter()
            .map(|c| t.column(c).unwrap()[0])
            .sum();
        assert!(((parts - total) / total).abs() < 1e-12);
    }

    #[test]
    fn mc_verify_small_sample_is_well_formed() {
        let (t, _) = mc_verify(&[0.0, -3.0], 10, 42, 20.0).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].x, -3.0);
        assert_eq!(t.header.len(), t.rows[0].columns.len() + 1);
    }
}
