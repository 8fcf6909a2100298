//! Analysis of ingested time series (including externally recorded data
//! converted to the two-column CSV form).

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use wva_core::io;
use wva_core::metrology::{
    allan_curve, default_n_grid, psd, slope_fit_points, AllanMode, PsdMethod, WindowFn,
};
use wva_core::series::TimeSeries;

use crate::report::{default_segment_length, TOOL_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOps {
    pub allan: bool,
    pub psd: bool,
    pub slope: bool,
}

impl AnalyzeOps {
    pub fn parse(list: &str) -> anyhow::Result<Self> {
        let mut ops = Self {
            allan: false,
            psd: false,
            slope: false,
        };
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "allan" => ops.allan = true,
                "psd" => ops.psd = true,
                "slope" => ops.slope = true,
                other => anyhow::bail!("unknown analysis op '{other}'"),
            }
        }
        if !(ops.allan || ops.psd || ops.slope) {
            anyhow::bail!("no analysis ops requested");
        }
        Ok(ops)
    }
}

fn file_hash(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect())
}

/// Run the requested estimators over an ingested series; returns the
/// files written.
pub fn run_analyze(input: &Path, ops: AnalyzeOps, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let series: TimeSeries<f64> = io::read_series_csv(input)?;
    let comments = vec![
        format!("tool: wva {TOOL_VERSION}"),
        format!("config_hash: {}", file_hash(input)?),
        "seed: none".to_string(),
        "data: ingested".to_string(),
        format!("source: {}", input.display()),
    ];
    let mut written = Vec::new();

    let allan = if ops.allan || ops.slope {
        let grid = default_n_grid(series.len(), 10);
        Some(allan_curve(&series, &grid, AllanMode::WindowOffset)?)
    } else {
        None
    };
    if ops.allan {
        let path = dir.join("allan.csv");
        io::write_allan_csv(&path, allan.as_ref().unwrap(), None, &comments)?;
        written.push(path);
    }

    let psd_curve = if (ops.psd || ops.slope) && series.len() >= 64 {
        let seg = default_segment_length(series.len());
        Some(psd(
            &series,
            PsdMethod::AveragedSegments,
            seg,
            WindowFn::Hann,
        )?)
    } else {
        None
    };
    if ops.psd {
        let curve = psd_curve
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("series too short for PSD"))?;
        let path = dir.join("psd.csv");
        io::write_psd_csv(&path, curve, &comments)?;
        written.push(path);
    }

    if ops.slope {
        let mut lines = Vec::new();
        for c in &comments {
            lines.push(format!("# {c}"));
        }
        lines.push("curve,exponent,stderr,points_used,band_lo,band_hi".to_string());
        if let Some(curve) = &allan {
            let dt = series.dt();
            let band = (4.0 * dt, series.len() as f64 * dt / 64.0);
            if let Ok(fit) = slope_fit_points(&curve.xy(), band) {
                lines.push(format!(
                    "allan,{},{},{},{},{}",
                    fit.exponent, fit.stderr, fit.points_used, band.0, band.1
                ));
            }
        }
        if let Some(curve) = &psd_curve {
            let fs = 1.0 / series.dt();
            let seg = curve.segment_length as f64;
            let band = (4.0 * fs / seg, fs / 8.0);
            if let Ok(fit) = slope_fit_points(&curve.points, band) {
                lines.push(format!(
                    "psd,{},{},{},{},{}",
                    fit.exponent, fit.stderr, fit.points_used, band.0, band.1
                ));
            }
        }
        let path = dir.join("slopes.csv");
        std::fs::write(&path, lines.join("\n") + "\n")?;
        written.push(path);
    }
    Ok(written)
}
