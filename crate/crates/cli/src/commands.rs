//! Subcommand bodies: compute, write artifacts atomically, record a
//! manifest naming every output of the run.

use modecap_core::capacity::convergence_study;
use modecap_core::channel::{assemble_with_n, gram_defect, PhysicalConfig};
use modecap_core::dof::dof_sweep;
use modecap_core::power::ETA_OHM;
use modecap_core::report::{
    run_validation, standing_notes, write_capacity_csv, write_dof_csv, write_mode_table_csv,
    write_ortho_csv, write_rad_resistance_csv, OrthoRow,
};
use modecap_core::wavefunctions::ModeTable;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub enum Outcome {
    Success,
    ValidationFailed(String),
}

pub enum CommandError {
    BadInput(String),
    Runtime(String),
}

impl From<modecap_core::Error> for CommandError {
    fn from(e: modecap_core::Error) -> Self {
        match e {
            modecap_core::Error::Domain(m) | modecap_core::Error::Config(m) => {
                CommandError::BadInput(m)
            }
            other => CommandError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Runtime(e.to_string())
    }
}

type CmdResult = Result<Outcome, CommandError>;

/// Per-run metadata; every output file of a command is referenced by
/// exactly one manifest.
#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    /// Honors SOURCE_DATE_EPOCH so fixed inputs give byte-identical runs.
    timestamp_unix_s: u64,
    seed: u64,
    eta_ohm: f64,
    config: &'a PhysicalConfig,
    outputs: Vec<String>,
    notes: Vec<String>,
}

fn timestamp() -> u64 {
    if let Ok(v) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(secs) = v.parse::<u64>() {
            return secs;
        }
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Write via temp file + rename so readers never observe partial output.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

fn write_manifest(
    out: &Path,
    command: &str,
    config: &PhysicalConfig,
    outputs: &[PathBuf],
) -> Result<PathBuf, CommandError> {
    let manifest = RunManifest {
        tool: "modecap",
        version: env!("CARGO_PKG_VERSION"),
        command,
        timestamp_unix_s: timestamp(),
        seed: config.seed,
        eta_ohm: ETA_OHM,
        config,
        outputs: outputs
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
        notes: standing_notes(),
    };
    let path = out.join(format!("manifest_{}.json", command.replace('-', "_")));
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CommandError::Runtime(e.to_string()))?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

#[derive(Serialize)]
struct RadResistanceSummary {
    k_r_v: f64,
    mode_count: usize,
    max_r_rad_ohm: f64,
    argmax_p: usize,
    edge_shell: u32,
    decay_orders_over_ten_shells: f64,
}

pub fn rad_resistance(out: &Path, config: &PhysicalConfig) -> CmdResult {
    let table = ModeTable::build(config.k, config.r_s, config.r_v, config.n_max)?;

    let mut modes_csv = Vec::new();
    write_mode_table_csv(&mut modes_csv, &table, config.k, config.r_v)?;
    let modes_path = out.join("modes.csv");
    write_atomic(&modes_path, &modes_csv)?;

    let mut rad_csv = Vec::new();
    write_rad_resistance_csv(&mut rad_csv, config.k, config.r_v, config.n_max)?;
    let rad_path = out.join("rad_resistance.csv");
    write_atomic(&rad_path, &rad_csv)?;

    // summary: peak resistance and the post-edge collapse rate
    let mut max_r = 0.0f64;
    let mut argmax_p = 1usize;
    for row in table.rows() {
        let r = modecap_core::power::radiation_resistance(row.mode, config.k, config.r_v)?;
        if r > max_r {
            max_r = r;
            argmax_p = row.mode.p();
        }
    }
    let edge = (config.k * config.r_v).ceil() as u32;
    let r_of_shell = |n: u32| -> Result<f64, CommandError> {
        let mut best = 0.0f64;
        for l in [1u8, 2] {
            let mode = modecap_core::wavefunctions::ModeIndex::new(n, 0, l)?;
            best = best.max(modecap_core::power::radiation_resistance(
                mode, config.k, config.r_v,
            )?);
        }
        Ok(best)
    };
    let decay_orders = (r_of_shell(edge)? / r_of_shell(edge + 10)?).log10();
    let summary = RadResistanceSummary {
        k_r_v: config.k * config.r_v,
        mode_count: table.mode_count(),
        max_r_rad_ohm: max_r,
        argmax_p,
        edge_shell: edge,
        decay_orders_over_ten_shells: decay_orders,
    };
    let summary_path = out.join("summary_rad_resistance.json");
    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CommandError::Runtime(e.to_string()))?;
    text.push('\n');
    write_atomic(&summary_path, text.as_bytes())?;

    write_manifest(out, "rad-resistance", config, &[modes_path, rad_path, summary_path])?;
    Ok(Outcome::Success)
}

pub fn ortho_check(
    out: &Path,
    config: &PhysicalConfig,
    n_list: &[usize],
    export_dipoles: bool,
    strict: bool,
) -> CmdResult {
    if n_list.is_empty() {
        return Err(CommandError::BadInput("ortho-check: --n-list must be nonempty".into()));
    }
    let mut rows = Vec::new();
    let mut outputs = Vec::new();
    let mut last_defect = f64::INFINITY;
    for &n in n_list {
        let ch = assemble_with_n(config, n)?;
        let (off, diag) = gram_defect(&ch.matrices.gram_phi_scaled());
        rows.push(OrthoRow {
            n: ch.dipoles.len(),
            m: ch.matrices.n_modes(),
            max_offdiag: off,
            max_diag_err: diag,
        });
        last_defect = off.max(diag);
        if export_dipoles && Some(&n) == n_list.last() {
            let mut csv = Vec::new();
            ch.dipoles.write_csv(&mut csv)?;
            let path = out.join("dipoles.csv");
            write_atomic(&path, &csv)?;
            outputs.push(path);
        }
    }
    let mut csv = Vec::new();
    write_ortho_csv(&mut csv, &rows)?;
    let path = out.join("ortho_check.csv");
    write_atomic(&path, &csv)?;
    outputs.insert(0, path);
    write_manifest(out, "ortho-check", config, &outputs)?;
    if strict && last_defect > 0.05 {
        return Ok(Outcome::ValidationFailed(format!(
            "final Gram defect {last_defect:.4e} exceeds 0.05"
        )));
    }
    Ok(Outcome::Success)
}

pub fn capacity_sweep(
    out: &Path,
    config: &PhysicalConfig,
    n_max_list: &[u32],
    n_list: &[usize],
    strict: bool,
) -> CmdResult {
    if n_max_list.is_empty() || n_list.is_empty() {
        return Err(CommandError::BadInput(
            "capacity-sweep: --n-max-list and --n-list must be nonempty".into(),
        ));
    }
    let rows = convergence_study(config, n_max_list, n_list)?;
    let mut csv = Vec::new();
    write_capacity_csv(&mut csv, &rows)?;
    let path = out.join("capacity_sweep.csv");
    write_atomic(&path, &csv)?;
    write_manifest(out, "capacity-sweep", config, &[path])?;
    if strict {
        let last = rows.last().unwrap();
        let dev = (last.ratio_to_limit() - 1.0).abs();
        if dev > 0.05 {
            return Ok(Outcome::ValidationFailed(format!(
                "final rate is {dev:.3} away from the limit (tol 0.05)"
            )));
        }
    }
    Ok(Outcome::Success)
}

pub fn dof_count(
    out: &Path,
    config: &PhysicalConfig,
    r_v_over_lambda: &[f64],
    thresholds_ohm: &[f64],
) -> CmdResult {
    if r_v_over_lambda.is_empty() {
        return Err(CommandError::BadInput("dof-count: radius list must be nonempty".into()));
    }
    if thresholds_ohm.is_empty() {
        return Err(CommandError::BadInput("dof-count: threshold list must be nonempty".into()));
    }
    // monotonicity violations inside dof_sweep surface as Domain errors,
    // which exit-code policy treats as invariant breaches (1), not input
    // errors, so map them explicitly
    let curve = match dof_sweep(r_v_over_lambda, thresholds_ohm) {
        Ok(c) => c,
        Err(e) => {
            let msg = e.to_string();
            if msg.contains("count decreased") || msg.contains("count increased") {
                return Ok(Outcome::ValidationFailed(msg));
            }
            return Err(e.into());
        }
    };
    let mut csv = Vec::new();
    write_dof_csv(&mut csv, &curve)?;
    let path = out.join("dof_count.csv");
    write_atomic(&path, &csv)?;
    write_manifest(out, "dof-count", config, &[path])?;
    Ok(Outcome::Success)
}

pub fn validate(out: &Path, config: &PhysicalConfig, inject_eta_scale: f64) -> CmdResult {
    let report = run_validation(config, inject_eta_scale)?;
    let path = out.join("validation_report.json");
    let mut text =
        serde_json::to_string_pretty(&report).map_err(|e| CommandError::Runtime(e.to_string()))?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    write_manifest(out, "validate", config, &[path])?;
    for check in &report.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        println!(
            "{mark} {}: residual {:.3e} (tol {:.1e})",
            check.name, check.residual, check.tolerance
        );
    }
    if report.all_passed {
        Ok(Outcome::Success)
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Ok(Outcome::ValidationFailed(failed.join(", ")))
    }
}
