//! Command-line front end: radiation-resistance tables, sampled-mode
//! orthogonality checks, capacity convergence sweeps, degrees-of-freedom
//! counting, and the full validation suite, all emitting plot-ready CSV
//! plus JSON summaries and a manifest per run.
//!
//! Exit codes: 0 success, 1 validation/invariant failure, 2 bad input.

mod commands;

use clap::{Args, Parser, Subcommand};
use modecap_core::channel::PhysicalConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "modecap", version, about = "Spherical-mode channel studies")]
struct Cli {
    /// JSON config file (keys: k, r_v, r_s, alpha, n_max, power_w,
    /// n0_w_per_hz, bandwidth_hz, dipole_len_over_lambda, seed)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts
    #[arg(long, global = true, default_value = "modecap-out")]
    out: PathBuf,

    /// Seed override for stochastic draws
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Turn threshold misses into a non-zero exit
    #[arg(long, global = true)]
    strict: bool,

    #[command(flatten)]
    overrides: ConfigOverrides,

    #[command(subcommand)]
    command: Command,
}

/// Physical-input overrides; SI units are spelled out in the flag names.
#[derive(Args, Clone)]
struct ConfigOverrides {
    /// Wavenumber k [rad/m]
    #[arg(long = "k-rad-per-m", global = true)]
    k_rad_per_m: Option<f64>,
    /// Source-ball radius R_V [m]
    #[arg(long = "r-v-m", global = true)]
    r_v_m: Option<f64>,
    /// Receive-sphere radius R_S [m]
    #[arg(long = "r-s-m", global = true)]
    r_s_m: Option<f64>,
    /// Normalized receive-antenna density, 0 < alpha < 1
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Highest mode shell (M = 2 n_max (n_max + 2))
    #[arg(long = "n-max", global = true)]
    n_max: Option<u32>,
    /// Transmit power constraint [W]
    #[arg(long = "power-w", global = true)]
    power_w: Option<f64>,
    /// Noise power spectral density [W/Hz]
    #[arg(long = "n0-w-per-hz", global = true)]
    n0_w_per_hz: Option<f64>,
    /// Channel bandwidth [Hz]
    #[arg(long = "bandwidth-hz", global = true)]
    bandwidth_hz: Option<f64>,
    /// Dipole length as a fraction of the wavelength
    #[arg(long = "dipole-len-over-lambda", global = true)]
    dipole_len_over_lambda: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-mode norms, singular values, transmit coefficients and
    /// radiation resistance (plot-ready mode tables)
    RadResistance,
    /// Gram-defect table of the sampled mode matrix over a dipole-count sweep
    OrthoCheck {
        /// Dipole counts to sweep (rounded to multiples of 3)
        #[arg(long = "n-list", value_delimiter = ',', default_value = "625,2500,10000,40000")]
        n_list: Vec<usize>,
        /// Also export the largest dipole set as CSV
        #[arg(long = "export-dipoles")]
        export_dipoles: bool,
    },
    /// Finite-(N, M) water-filled capacity against the closed form and limit
    CapacitySweep {
        /// Mode-shell truncations to sweep
        #[arg(long = "n-max-list", value_delimiter = ',', default_value = "1,2,3")]
        n_max_list: Vec<u32>,
        /// Dipole counts to sweep
        #[arg(long = "n-list", value_delimiter = ',', default_value = "2500,10000")]
        n_list: Vec<usize>,
    },
    /// Degrees of freedom above radiation-resistance thresholds
    DofCount {
        /// Source radii as R_V/lambda
        #[arg(
            long = "r-v-over-lambda-list",
            value_delimiter = ',',
            default_value = "0.5,0.75,1,1.25,1.5,1.75,2,2.25,2.5,2.75,3,3.25,3.5,3.75,4"
        )]
        r_v_over_lambda_list: Vec<f64>,
        /// Thresholds [Ohm]
        #[arg(long = "thresholds-ohm", value_delimiter = ',', default_value = "10,25")]
        thresholds_ohm: Vec<f64>,
    },
    /// Run the invariant suite and emit a pass/fail report
    Validate {
        /// Scale factor applied to the wave impedance inside the
        /// Poynting-oracle field assembly (fault-injection hook)
        #[arg(long = "inject-eta-scale", default_value_t = 1.0, hide = true)]
        inject_eta_scale: f64,
    },
}

fn resolve_config(cli: &Cli) -> Result<PhysicalConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str::<PhysicalConfig>(&text)
                .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?
        }
        None => PhysicalConfig::default(),
    };
    let o = &cli.overrides;
    if let Some(v) = o.k_rad_per_m {
        cfg.k = v;
    }
    if let Some(v) = o.r_v_m {
        cfg.r_v = v;
    }
    if let Some(v) = o.r_s_m {
        cfg.r_s = v;
    }
    if let Some(v) = o.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = o.n_max {
        cfg.n_max = v;
    }
    if let Some(v) = o.power_w {
        cfg.power_w = v;
    }
    if let Some(v) = o.n0_w_per_hz {
        cfg.n0_w_per_hz = v;
    }
    if let Some(v) = o.bandwidth_hz {
        cfg.bandwidth_hz = v;
    }
    if let Some(v) = o.dipole_len_over_lambda {
        cfg.dipole_len_over_lambda = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match resolve_config(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create output directory {}: {e}", cli.out.display());
        return ExitCode::from(2);
    }
    let outcome = match &cli.command {
        Command::RadResistance => commands::rad_resistance(&cli.out, &config),
        Command::OrthoCheck { n_list, export_dipoles } => {
            commands::ortho_check(&cli.out, &config, n_list, *export_dipoles, cli.strict)
        }
        Command::CapacitySweep { n_max_list, n_list } => {
            commands::capacity_sweep(&cli.out, &config, n_max_list, n_list, cli.strict)
        }
        Command::DofCount { r_v_over_lambda_list, thresholds_ohm } => {
            commands::dof_count(&cli.out, &config, r_v_over_lambda_list, thresholds_ohm)
        }
        Command::Validate { inject_eta_scale } => {
            commands::validate(&cli.out, &config, *inject_eta_scale)
        }
    };
    match outcome {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::ValidationFailed(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(1)
        }
        Err(commands::CommandError::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::CommandError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
