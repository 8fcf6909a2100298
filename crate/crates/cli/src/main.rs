use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wva_cli::analyze::{run_analyze, AnalyzeOps};
use wva_cli::config::{apply_overrides, ExperimentConfig};
use wva_cli::figures::{figure_default_config, run_reproduce, FigureId};
use wva_cli::pipeline::{calibrate_ideal, run_simulate, shot_noise_limit, FrameFactory};
use wva_cli::report::{provenance, write_run_artifacts, TOOL_VERSION};

/// Weak-value-amplified interferometer simulation and stability analysis.
#[derive(Parser)]
#[command(name = "wva", version = TOOL_VERSION, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file; omitted fields take the bench defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-field overrides, e.g. --set run.seed=7 --set selection.beta_u_deg=45.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn resolve(&self, base: ExperimentConfig) -> anyhow::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => base,
        };
        apply_overrides(&mut config, &self.set)?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full measurement chain and write the series artifacts.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Run directory for the artifact set.
        #[arg(long, default_value = "wva-run")]
        output: PathBuf,
        /// Also export the first N frames as PGM + raw binary.
        #[arg(long, default_value_t = 0)]
        save_frames: usize,
    },
    /// Reproduce a result figure as CSV data.
    Reproduce {
        /// One of: allan_2a, psd_2b, scaling_3, allan_nr_4, allan_tau_5.
        #[arg(long)]
        figure: String,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "wva-figures")]
        output: PathBuf,
    },
    /// Allan/PSD/slope analysis of an ingested two-column series CSV.
    Analyze {
        /// Input CSV with uniform (t_seconds, value) rows.
        #[arg(long)]
        input: PathBuf,
        /// Comma list from {allan, psd, slope}.
        #[arg(long, default_value = "allan,psd,slope")]
        ops: String,
        #[arg(long, default_value = "wva-analysis")]
        output: PathBuf,
    },
    /// Fit the calibration line (pixels per attosecond) for a configuration.
    Calibrate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "wva-calibration")]
        output: PathBuf,
    },
    /// Classical Fisher information and shot-noise limit for a configuration.
    Cfi {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "wva-cfi")]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate {
            cfg,
            output,
            save_frames,
        } => {
            let config = cfg.resolve(ExperimentConfig::default())?;
            let out = run_simulate(&config)?;
            write_run_artifacts(&output, &config, &out)?;
            if save_frames > 0 {
                let factory = FrameFactory::new(&config)?;
                let dir = output.join("frames");
                std::fs::create_dir_all(&dir)?;
                for i in 0..save_frames.min(config.run.frames) {
                    let frame = factory.frame(i)?;
                    wva_core::io::write_frame_pgm(&dir.join(format!("frame_{i:05}.pgm")), &frame)?;
                    wva_core::io::write_frame_raw(
                        &dir.join(format!("frame_{i:05}.bin")),
                        &frame,
                        config.run.seed,
                    )?;
                }
            }
            println!(
                "simulate: {} frames, k = {:.4} px/as, tau0 = {:.4} as, Var(tau) = {:.4e} as^2, SQL = {:.4e} as^2 -> {}",
                config.run.frames,
                out.calibration.slope,
                out.tau0_as,
                out.tau_series.variance(),
                out.crb_as2,
                output.display()
            );
            Ok(())
        }
        Command::Reproduce {
            figure,
            cfg,
            output,
        } => {
            let id = FigureId::parse(&figure).ok_or_else(|| {
                clap_usage_exit(format!(
                    "unknown figure '{figure}'; expected one of {}",
                    FigureId::ALL.join(", ")
                ))
            })?;
            let config = cfg.resolve(figure_default_config())?;
            let files = run_reproduce(id, &config, &output)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Analyze { input, ops, output } => {
            let ops = AnalyzeOps::parse(&ops).map_err(|e| clap_usage_exit(e.to_string()))?;
            let files = run_analyze(&input, ops, &output)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Calibrate { cfg, output } => {
            let config = cfg.resolve(ExperimentConfig::default())?;
            std::fs::create_dir_all(&output)?;
            let factory = FrameFactory::new(&config)?;
            let cal = calibrate_ideal(
                factory.engine(),
                &config.calibration_taus()?,
                config.run.kappa,
            )?;
            let json = serde_json::json!({
                "slope_px_per_as": cal.line.slope,
                "intercept_px": cal.line.intercept,
                "residual_rms_px": cal.line.residual_rms,
                "points": cal.line.tau_points,
                "config_hash": config.hash(),
                "tool_version": TOOL_VERSION,
            });
            std::fs::write(
                output.join("calibration.json"),
                serde_json::to_string_pretty(&json)?,
            )?;
            let mut csv: Vec<String> = provenance(&config, "synthetic")
                .iter()
                .map(|c| format!("# {c}"))
                .collect();
            csv.push("tau_as,mean_shift_px".into());
            for (t, s) in &cal.line.tau_points {
                csv.push(format!("{t},{s}"));
            }
            std::fs::write(output.join("calibration_points.csv"), csv.join("\n") + "\n")?;
            println!(
                "calibrate: k = {:.4} px/as, intercept = {:.4e} px, residual rms = {:.2e} px",
                cal.line.slope, cal.line.intercept, cal.line.residual_rms
            );
            Ok(())
        }
        Command::Cfi { cfg, output } => {
            let config = cfg.resolve(ExperimentConfig::default())?;
            std::fs::create_dir_all(&output)?;
            let factory = FrameFactory::new(&config)?;
            let cal = calibrate_ideal(
                factory.engine(),
                &config.calibration_taus()?,
                config.run.kappa,
            )?;
            let fisher = shot_noise_limit(
                factory.engine(),
                &cal.line,
                config.tau0()?,
                config.run.n_r,
            )?;
            let json = serde_json::json!({
                "cfi_per_s2": fisher.cfi,
                "crb_s2": fisher.crb,
                "crb_as2": fisher.crb * 1e36,
                "n_r": fisher.n_r,
                "delta_tau_s": fisher.delta_tau,
                "infinite_crb": fisher.infinite_crb,
                "config_hash": config.hash(),
                "tool_version": TOOL_VERSION,
            });
            std::fs::write(output.join("crb.json"), serde_json::to_string_pretty(&json)?)?;
            println!(
                "cfi: F = {:.4e} /s^2, CRB = {:.4e} as^2 at N_r = {}",
                fisher.cfi,
                fisher.crb * 1e36,
                fisher.n_r
            );
            Ok(())
        }
    }
}

/// Usage-class failures exit with code 2, like argument parse errors.
fn clap_usage_exit(msg: String) -> anyhow::Error {
    eprintln!("error: {msg}");
    std::process::exit(2);
}
