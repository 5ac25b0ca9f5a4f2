//! `cavity-billiard`: simulate parametric resonance in a vibrating
//! one-dimensional cavity via the optical-path (billiard) method.
//!
//! Exit codes: 0 ok, 1 config error, 2 compute error, 3 verify failure.

// validation guards use `!(x > 0.0)` so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_traj_kind, Mode, RunConfig};
use run::CliError;

#[derive(Parser)]
#[command(
    name = "cavity-billiard",
    version,
    about = "Vibrating-cavity field simulator built on the billiard function",
    after_help = "The CAVITY_BILLIARD_THREADS environment variable caps parallelism."
)]
struct Cli {
    /// Configuration file (INI-style); command-line flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Field mode: classical | quantum.
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Mirror worldline: static | sin | lawwu | file:PATH.
    #[arg(long, global = true)]
    traj: Option<String>,

    /// Unperturbed cavity length.
    #[arg(long = "L0", global = true)]
    l0: Option<f64>,

    /// Oscillation amplitude.
    #[arg(long = "dL", global = true)]
    dl: Option<f64>,

    /// Resonance order (omega_N = N pi / L0).
    #[arg(long = "N", global = true)]
    order: Option<u32>,

    /// Relative detuning (omega - omega_N)/omega of the sinusoidal drive;
    /// for scan-band, the half-width of the scanned detuning range.
    #[arg(long, global = true, allow_negative_numbers = true)]
    domega: Option<f64>,

    /// Bounce periods covered by the simulate energy curve.
    #[arg(long, global = true)]
    periods: Option<usize>,

    /// Starting point for the trajectory subcommand.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau0: Option<f64>,

    /// Bounce count for the trajectory subcommand.
    #[arg(long = "n", global = true)]
    bounces: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a field simulation: density snapshots, energy curve, peak table.
    Simulate,
    /// Scan the parametric-resonance band structure around omega_N.
    ScanBand,
    /// Emit the bounce table (T_k, T*_k, D_k, A_k) of one optical path.
    Trajectory,
    /// Cross-check the engine against every closed-form oracle.
    Verify {
        /// Test hook: perturb the engine side by this relative amount to
        /// prove the harness notices.
        #[arg(long, hide = true)]
        inject_error: Option<f64>,
    },
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| CliError::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(mode) = &cli.mode {
        cfg.mode = match mode.as_str() {
            "classical" => Mode::Classical,
            "quantum" => Mode::Quantum,
            other => {
                return Err(CliError::Config(format!(
                    "--mode: expected classical|quantum, got {other:?}"
                )))
            }
        };
    }
    if let Some(traj) = &cli.traj {
        cfg.traj = parse_traj_kind(traj).map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Some(l0) = cli.l0 {
        cfg.l0 = l0;
    }
    if let Some(dl) = cli.dl {
        cfg.dl = dl;
    }
    if let Some(order) = cli.order {
        cfg.order = order;
    }
    if let Some(domega) = cli.domega {
        match cli.cmd {
            Cmd::ScanBand => cfg.scan_halfwidth = domega,
            _ => cfg.domega_rel = domega,
        }
    }
    if let Some(periods) = cli.periods {
        cfg.periods = periods;
    }
    if let Some(tau0) = cli.tau0 {
        cfg.tau0 = tau0;
    }
    if let Some(bounces) = cli.bounces {
        cfg.bounces = bounces;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn init_threads() {
    if let Ok(v) = std::env::var("CAVITY_BILLIARD_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Simulate => run::cmd_simulate(&resolve_config(cli)?),
        Cmd::ScanBand => run::cmd_scan_band(&resolve_config(cli)?),
        Cmd::Trajectory => run::cmd_trajectory(&resolve_config(cli)?),
        Cmd::Verify { inject_error } => run::cmd_verify(inject_error.unwrap_or(0.0)),
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
