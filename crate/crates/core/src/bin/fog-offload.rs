//! Command-line front end: figure sweeps, single-scenario reports and the
//! Monte-Carlo verification, all emitted as CSV.
//!
//! Parameter precedence, lowest first: reference values, the config file's
//! `bandwidth_profile`, explicit config-file keys, command-line flags.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use fog_offload::chain::BandwidthProfile;
use fog_offload::config::{self, Scenario};
use fog_offload::sweep::{self, SweepSpec, SweepTable, SweepVariable};

#[derive(Debug, Parser)]
#[command(name = "fog-offload", version, about = "Local versus fog-offload energy model for IoT video analytics")]
struct Cli {
    /// Flat TOML scenario file; missing keys keep reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Transmitter profile: 9mhz (15.36 MHz f_s, 1024 IFFT) or 18mhz (30.72 MHz f_s, 2048 IFFT).
    #[arg(long, global = true)]
    bandwidth_profile: Option<BandwidthProfile>,

    /// Cameras sharing the channel (TDMA).
    #[arg(long, global = true)]
    cameras: Option<u32>,

    /// Link distance in km.
    #[arg(long, global = true)]
    distance_km: Option<f64>,

    /// Monte-Carlo seed.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Monte-Carlo samples per operating point.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    samples: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal IBO and maximum SINR against SNR_MAX.
    Fig3 {
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        from_db: f64,
        #[arg(long, default_value_t = 50.0, allow_hyphen_values = true)]
        to_db: f64,
        #[arg(long, default_value_t = 601)]
        steps: usize,
    },
    /// Required SINR and optimal IBO against bandwidth, M = 1 and 10.
    Fig4 {
        #[arg(long, default_value_t = 3e6)]
        from_hz: f64,
        #[arg(long, default_value_t = 20e6)]
        to_hz: f64,
        #[arg(long, default_value_t = 35)]
        steps: usize,
    },
    /// Offloading power breakdown against distance (log grid).
    Fig5 {
        #[arg(long, default_value_t = 0.01)]
        from_km: f64,
        #[arg(long, default_value_t = 2.0)]
        to_km: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Break-even complexity against distance (log grid).
    Fig6 {
        #[arg(long, default_value_t = 0.01)]
        from_km: f64,
        #[arg(long, default_value_t = 2.0)]
        to_km: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Local versus offload power for the configured scenario.
    Breakeven {
        /// Sweep theta from this value (defaults to the configured theta).
        #[arg(long)]
        theta_from: Option<f64>,
        #[arg(long)]
        theta_to: Option<f64>,
        #[arg(long, default_value_t = 1)]
        theta_steps: usize,
    },
    /// Link budget, amplifier state and power breakdown for the configured scenario.
    LinkPower,
    /// Monte-Carlo check of the closed-form amplifier results.
    McVerify {
        /// Comma-separated IBO values in dB.
        #[arg(long, value_delimiter = ',', default_values_t = vec![-3.0, 0.0, 3.0, 6.0], allow_hyphen_values = true)]
        ibo_db: Vec<f64>,
        /// SNR_MAX used for the SINR estimate.
        #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
        snr_max_db: f64,
    },
    /// Print the reference scenario as a config file.
    PrintDefaults,
}

impl Cli {
    fn scenario(&self) -> Result<(Scenario, Vec<SweepVariable>)> {
        let mut s = match &self.config {
            Some(path) => config::load_config(path)?,
            None => Scenario::default(),
        };
        let mut pinned = Vec::new();
        if let Some(p) = self.bandwidth_profile {
            s = s.with_profile(p);
            pinned.push(SweepVariable::BandwidthHz);
        }
        if let Some(m) = self.cameras {
            s = s.with_cameras(m);
        }
        if let Some(d) = self.distance_km {
            s = s.with_distance_km(d);
            pinned.push(SweepVariable::DistanceKm);
        }
        s.validate().context("invalid scenario after command-line overrides")?;
        Ok((s, pinned))
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit(&self, table: &SweepTable) -> Result<()> {
        let mut out = self.sink()?;
        table.write_csv(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let (scenario, pinned) = cli.scenario()?;
    let table = match &cli.command {
        Command::Fig3 { from_db, to_db, steps } => sweep::sweep_fig3(*from_db, *to_db, *steps)?,
        Command::Fig4 { from_hz, to_hz, steps } => sweep::sweep_fig4_spec(
            &SweepSpec::new(SweepVariable::BandwidthHz, *from_hz, *to_hz, *steps, scenario)
                .with_overridden(&pinned),
        )?,
        Command::Fig5 { from_km, to_km, steps } => sweep::sweep_fig5_spec(
            &SweepSpec::new(SweepVariable::DistanceKm, *from_km, *to_km, *steps, scenario)
                .log()
                .with_overridden(&pinned),
        )?,
        Command::Fig6 { from_km, to_km, steps } => sweep::sweep_fig6_spec(
            &SweepSpec::new(SweepVariable::DistanceKm, *from_km, *to_km, *steps, scenario)
                .log()
                .with_overridden(&pinned),
        )?,
        Command::Breakeven {
            theta_from,
            theta_to,
            theta_steps,
        } => {
            let theta = scenario.deploy.theta_flop_per_bit;
            let from = theta_from.unwrap_or(theta);
            let to = theta_to.unwrap_or(from);
            sweep::breakeven(&SweepSpec::new(SweepVariable::Theta, from, to, *theta_steps, scenario))?
        }
        Command::LinkPower => sweep::link_power(&scenario)?,
        Command::McVerify { ibo_db, snr_max_db } => {
            let (table, pass) = sweep::mc_verify(ibo_db, cli.samples, cli.seed, *snr_max_db)?;
            cli.emit(&table)?;
            if !pass {
                let failing: Vec<String> = table
                    .rows
                    .iter()
                    .filter(|r| r.columns.last() == Some(&0.0))
                    .map(|r| format!("{} dB", r.x))
                    .collect();
                eprintln!("Monte-Carlo check failed at IBO {}", failing.join(", "));
            }
            return Ok(pass);
        }
        Command::PrintDefaults => {
            let mut out = cli.sink()?;
            out.write_all(scenario.to_toml().as_bytes())?;
            out.flush()?;
            return Ok(true);
        }
    };
    cli.emit(&table)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
