//! Run-directory artifacts with provenance headers.

use std::path::{Path, PathBuf};

use serde::Serialize;

use wva_core::io;
use wva_core::metrology::{allan_curve, default_n_grid, psd, AllanMode, PsdMethod, WindowFn};

use crate::config::ExperimentConfig;
use crate::pipeline::SimulationOutput;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Comment lines stamped into every CSV.
pub fn provenance(config: &ExperimentConfig, data_flag: &str) -> Vec<String> {
    vec![
        format!("tool: wva {TOOL_VERSION}"),
        format!("config_hash: {}", config.hash()),
        format!("seed: {}", config.run.seed),
        format!("data: {data_flag}"),
    ]
}

#[derive(Serialize)]
struct CalibrationJson<'a> {
    slope_px_per_as: f64,
    intercept_px: f64,
    residual_rms_px: f64,
    points: &'a [(f64, f64)],
    config_hash: String,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct CrbJson {
    cfi_per_s2: f64,
    crb_s2: f64,
    crb_as2: f64,
    n_r: f64,
    delta_tau_s: f64,
    infinite_crb: bool,
    config_hash: String,
    tool_version: &'static str,
}

/// Largest power of two giving ~8 half-overlapped segments.
pub fn default_segment_length(len: usize) -> usize {
    let target = (len as f64 / 4.5).max(8.0);
    let mut seg = 8usize;
    while seg * 2 <= target as usize {
        seg *= 2;
    }
    seg
}

/// Write the full artifact set of a simulate run; returns the directory.
pub fn write_run_artifacts(
    dir: &Path,
    config: &ExperimentConfig,
    out: &SimulationOutput,
) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let comments = provenance(config, "synthetic");

    std::fs::write(dir.join("config.toml"), config.to_toml_string())?;

    let cal = CalibrationJson {
        slope_px_per_as: out.calibration.slope,
        intercept_px: out.calibration.intercept,
        residual_rms_px: out.calibration.residual_rms,
        points: &out.calibration.tau_points,
        config_hash: config.hash(),
        tool_version: TOOL_VERSION,
    };
    std::fs::write(
        dir.join("calibration.json"),
        serde_json::to_string_pretty(&cal)?,
    )?;

    let crb = CrbJson {
        cfi_per_s2: out.fisher.cfi,
        crb_s2: out.fisher.crb,
        crb_as2: out.crb_as2,
        n_r: out.fisher.n_r,
        delta_tau_s: out.fisher.delta_tau,
        infinite_crb: out.fisher.infinite_crb,
        config_hash: config.hash(),
        tool_version: TOOL_VERSION,
    };
    std::fs::write(dir.join("crb.json"), serde_json::to_string_pretty(&crb)?)?;

    io::write_shifts_csv(
        &dir.join("shifts.csv"),
        &out.estimates,
        config.dt(),
        &comments,
    )?;
    io::write_series_csv(&dir.join("tau_series.csv"), &out.tau_series, &comments)?;

    let grid = default_n_grid(out.tau_series.len(), 10);
    let curve = allan_curve(&out.tau_series, &grid, AllanMode::WindowOffset)?;
    io::write_allan_csv(
        &dir.join("allan.csv"),
        &curve,
        Some(out.crb_as2),
        &comments,
    )?;

    if out.tau_series.len() >= 64 {
        let seg = default_segment_length(out.tau_series.len());
        let curve = psd(
            &out.tau_series,
            PsdMethod::AveragedSegments,
            seg,
            WindowFn::Hann,
        )?;
        io::write_psd_csv(&dir.join("psd.csv"), &curve, &comments)?;
    }
    Ok(dir.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_length_is_power_of_two_fraction() {
        assert_eq!(default_segment_length(4096), 512);
        assert_eq!(default_segment_length(1000), 128);
        assert_eq!(default_segment_length(64), 8);
    }
}
