//! Experiment configuration: TOML sections mirroring the module layout,
//! with the published bench parameters as defaults. Angles and convenient
//! units (nm, mm, um, attoseconds) live only at this boundary; everything
//! internal is SI radians/meters/seconds.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use wva_core::ccd::{CcdSpec, PhotonBudget};
use wva_core::diffraction::{OpticalGeometry, PropagationPath};
use wva_core::grid::GridSpec;
use wva_core::noisegen::{NoiseBudget, NoiseChannel};
use wva_core::polarization::SelectionConfig;
use wva_core::registration::ReferencePolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticsSection {
    pub lambda_nm: f64,
    pub sigma_xy_mm: f64,
    pub d1_mm: f64,
    pub f_d_m: f64,
    pub n0: f64,
    /// "closed_form" or "numeric"
    pub propagation: String,
    pub numeric_input_nodes: usize,
}

impl Default for OpticsSection {
    fn default() -> Self {
        Self {
            lambda_nm: 632.992,
            // half the 0.65 mm beam diameter, read as the 1/e field radius
            sigma_xy_mm: 0.325,
            d1_mm: 0.425,
            f_d_m: 1.0,
            n0: 1.54,
            propagation: "closed_form".into(),
            numeric_input_nodes: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSection {
    pub beta_u_deg: f64,
    pub beta_d_deg: f64,
}

impl Default for SelectionSection {
    fn default() -> Self {
        Self {
            beta_u_deg: 1.6,
            beta_d_deg: -1.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelaysSection {
    /// Calibration tilt angles (deg).
    pub theta_deg: Vec<f64>,
    /// Operating tilt whose delay the run estimates (deg).
    pub estimate_theta_deg: f64,
}

impl Default for DelaysSection {
    fn default() -> Self {
        Self {
            theta_deg: vec![4.0, 5.0, 6.0],
            estimate_theta_deg: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CcdSection {
    pub pixel_pitch_um: f64,
    pub rows: usize,
    pub cols: usize,
    pub bit_depth: u8,
    pub quantum_efficiency: f64,
    pub gain: f64,
}

impl Default for CcdSection {
    fn default() -> Self {
        Self {
            pixel_pitch_um: 1.85,
            rows: 1024,
            cols: 1024,
            bit_depth: 8,
            quantum_efficiency: 0.856,
            gain: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    /// "delay_offset" (amplitudes in as, as^2/Hz) or
    /// "fringe_offset" (pixels, px^2/Hz).
    pub channel: String,
    pub white_sigma: f64,
    pub flicker_amp: f64,
    pub rw_amp: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            channel: "delay_offset".into(),
            white_sigma: 0.0,
            flicker_amp: 0.0,
            rw_amp: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub frames: usize,
    pub sampling_rate_hz: f64,
    /// Expected photons per frame.
    pub n_r: f64,
    /// "detected" or "incident".
    pub photon_budget: String,
    pub seed: u64,
    /// Registration upsampling factor.
    pub kappa: u32,
    /// "mean", "first", or "ideal" reference for the shift series.
    pub reference: String,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            frames: 1000,
            sampling_rate_hz: 100.0,
            n_r: 3.6e4,
            photon_budget: "detected".into(),
            seed: 1,
            kappa: 100,
            reference: "mean".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub optics: OpticsSection,
    pub selection: SelectionSection,
    pub delays: DelaysSection,
    pub ccd: CcdSection,
    pub noise: NoiseSection,
    pub run: RunSection,
}

/// Run-reference selection including the simulation-only ideal profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunReference {
    Frames(ReferencePolicy),
    IdealProfile,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the serialized config.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_toml_string().as_bytes());
        let digest = h.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn geometry(&self) -> anyhow::Result<OpticalGeometry<f64>> {
        Ok(OpticalGeometry::new(
            self.optics.lambda_nm * 1e-9,
            self.optics.sigma_xy_mm * 1e-3,
            self.optics.d1_mm * 1e-3,
            self.optics.f_d_m,
        )?)
    }

    pub fn selection(&self) -> anyhow::Result<SelectionConfig<f64>> {
        Ok(SelectionConfig::new(
            self.selection.beta_u_deg.to_radians(),
            self.selection.beta_d_deg.to_radians(),
        )?)
    }

    pub fn propagation_path(&self) -> anyhow::Result<PropagationPath> {
        match self.optics.propagation.as_str() {
            "closed_form" => Ok(PropagationPath::ClosedForm),
            "numeric" => Ok(PropagationPath::Numeric {
                input_nodes: self.optics.numeric_input_nodes,
            }),
            other => anyhow::bail!("unknown propagation path '{other}'"),
        }
    }

    pub fn ccd_spec(&self) -> anyhow::Result<CcdSpec> {
        Ok(CcdSpec::new(
            self.ccd.pixel_pitch_um * 1e-6,
            self.ccd.rows,
            self.ccd.cols,
            self.ccd.bit_depth,
            self.ccd.quantum_efficiency,
            self.ccd.gain,
        )?)
    }

    pub fn detector_grid(&self) -> anyhow::Result<GridSpec<f64>> {
        Ok(GridSpec::new(
            self.ccd.rows,
            self.ccd.cols,
            self.ccd.pixel_pitch_um * 1e-6,
        )?)
    }

    pub fn photon_budget(&self) -> anyhow::Result<PhotonBudget> {
        match self.run.photon_budget.as_str() {
            "detected" => Ok(PhotonBudget::Detected),
            "incident" => Ok(PhotonBudget::Incident),
            other => anyhow::bail!("unknown photon budget '{other}'"),
        }
    }

    pub fn noise_channel(&self) -> anyhow::Result<NoiseChannel> {
        match self.noise.channel.as_str() {
            "delay_offset" => Ok(NoiseChannel::DelayOffset),
            "fringe_offset" => Ok(NoiseChannel::FringeOffset),
            other => anyhow::bail!("unknown noise channel '{other}'"),
        }
    }

    /// Budget in core units: the delay channel converts as -> s.
    pub fn noise_budget(&self) -> anyhow::Result<NoiseBudget> {
        let channel = self.noise_channel()?;
        let scale = match channel {
            NoiseChannel::DelayOffset => 1e-18,
            NoiseChannel::FringeOffset => 1.0,
        };
        Ok(NoiseBudget {
            white_sigma: self.noise.white_sigma * scale,
            flicker_amp: self.noise.flicker_amp * scale * scale,
            rw_amp: self.noise.rw_amp * scale * scale,
            channel,
        })
    }

    pub fn run_reference(&self) -> anyhow::Result<RunReference> {
        match self.run.reference.as_str() {
            "mean" => Ok(RunReference::Frames(ReferencePolicy::MeanFrame)),
            "first" => Ok(RunReference::Frames(ReferencePolicy::FirstFrame)),
            "ideal" => Ok(RunReference::IdealProfile),
            other => anyhow::bail!("unknown reference policy '{other}'"),
        }
    }

    /// Operating delay tau0 (s) at the estimate tilt.
    pub fn tau0(&self) -> anyhow::Result<f64> {
        Ok(wva_core::polarization::tilt_to_delay(
            self.delays.estimate_theta_deg.to_radians(),
            self.optics.n0,
            self.optics.lambda_nm * 1e-9,
        )?)
    }

    /// Calibration delays (s) from the tilt list.
    pub fn calibration_taus(&self) -> anyhow::Result<Vec<f64>> {
        self.delays
            .theta_deg
            .iter()
            .map(|&t| {
                Ok(wva_core::polarization::tilt_to_delay(
                    t.to_radians(),
                    self.optics.n0,
                    self.optics.lambda_nm * 1e-9,
                )?)
            })
            .collect()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.run.sampling_rate_hz
    }
}

/// Apply `key=value` overrides using TOML dotted paths,
/// e.g. `run.seed=7` or `selection.beta_u_deg=45`.
pub fn apply_overrides(config: &mut ExperimentConfig, overrides: &[String]) -> anyhow::Result<()> {
    if overrides.is_empty() {
        return Ok(());
    }
    let mut doc: toml::Table = toml::from_str(&config.to_toml_string())?;
    for item in overrides {
        let (path, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("override '{item}' is not key=value"))?;
        let mut parts = path.trim().split('.');
        let section = parts
            .next()
            .ok_or_else(|| anyhow::anyhow!("empty override path"))?;
        let field = parts
            .next()
            .ok_or_else(|| anyhow::anyhow!("override '{item}' needs section.field"))?;
        if parts.next().is_some() {
            anyhow::bail!("override '{item}' nests too deep");
        }
        let table = doc
            .get_mut(section)
            .and_then(|v| v.as_table_mut())
            .ok_or_else(|| anyhow::anyhow!("unknown section '{section}'"))?;
        // parse through a one-line document so numbers, booleans and
        // arrays keep their TOML types; fall back to a bare string
        let parsed = toml::from_str::<toml::Table>(&format!("v = {}", value.trim()))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.trim().to_string()));
        table.insert(field.to_string(), parsed);
    }
    *config = toml::from_str(&doc.to_string())?;
    Ok(())
}
