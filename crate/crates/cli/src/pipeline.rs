//! The simulate pipeline: diffraction -> drift injection -> exposure ->
//! registration -> calibration -> delay estimates, plus the Fisher/CRB
//! bookkeeping that turns photon budgets into shot-noise limits.

use anyhow::Context;
use num_complex::Complex;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use wva_core::ccd::{expose, frame_rng, CcdSpec, Frame, FrameMeta, PhotonBudget};
use wva_core::diffraction::{
    propagate_closed_form, propagate_numeric, slit_fields, Arm, OpticalGeometry, PropagationPath,
};
use wva_core::grid::{ComplexFieldGrid, Grid2, GridSpec, IntensityMap};
use wva_core::metrology::{
    calibrate, estimate_tau, fisher_information_checked, CalibrationLine, FisherResult,
};
use wva_core::noisegen::{inject, InjectedSeries};
use wva_core::polarization::SelectionConfig;
use wva_core::registration::{Registrar, ReferencePolicy, ShiftEstimate};
use wva_core::series::TimeSeries;

use crate::config::{ExperimentConfig, RunReference};

/// Detector-plane arm fields cached once; the set delay only rotates the
/// scalar weak-value phases, so maps at any tau are cheap recombinations.
pub struct IntensityEngine {
    u_up: ComplexFieldGrid<f64>,
    u_lo: ComplexFieldGrid<f64>,
    omega: f64,
    a_w_u: f64,
    a_w_d: f64,
}

impl IntensityEngine {
    pub fn new(
        geometry: &OpticalGeometry<f64>,
        selection: &SelectionConfig<f64>,
        grid: &GridSpec<f64>,
        path: PropagationPath,
    ) -> anyhow::Result<Self> {
        let wv = selection.weak_values()?;
        let (u_up, u_lo) = match path {
            PropagationPath::ClosedForm => (
                propagate_closed_form(geometry, Arm::Upper, grid)?,
                propagate_closed_form(geometry, Arm::Lower, grid)?,
            ),
            PropagationPath::Numeric { input_nodes } => {
                let half = 4.0 * geometry.sigma_xy;
                let in_grid =
                    GridSpec::new(input_nodes, input_nodes, 2.0 * half / input_nodes as f64)?;
                let (fu, fl) = slit_fields(geometry, &in_grid)?;
                (
                    propagate_numeric(&fu, geometry, grid)?,
                    propagate_numeric(&fl, geometry, grid)?,
                )
            }
        };
        Ok(Self {
            u_up,
            u_lo,
            omega: geometry.omega(),
            a_w_u: wv.a_w_u,
            a_w_d: wv.a_w_d,
        })
    }

    pub fn grid(&self) -> GridSpec<f64> {
        self.u_up.spec
    }

    pub fn map_at(&self, tau: f64) -> IntensityMap<f64> {
        let c_u = Complex::from_polar(self.a_w_u.abs().recip(), self.omega * self.a_w_u * tau);
        let c_d = Complex::from_polar(self.a_w_d.abs().recip(), self.omega * self.a_w_d * tau);
        let spec = self.u_up.spec;
        let data: Vec<f64> = self
            .u_up
            .values
            .as_slice()
            .iter()
            .zip(self.u_lo.values.as_slice())
            .map(|(a, b)| (c_u * a + c_d * b).norm_sqr())
            .collect();
        IntensityMap {
            values: Grid2::from_vec(spec.rows, spec.cols, data).expect("engine grid"),
            spec,
        }
    }

    /// Normalized probability of a detected photon landing in each row.
    pub fn row_distribution(&self, tau: f64) -> Vec<f64> {
        self.map_at(tau).row_distribution()
    }
}

/// Calibration over the configured tilt list: noise-free maps at each
/// delay registered against the tau = 0 map, least-squares line in
/// pixels per attosecond.
pub struct CalibrationRun {
    pub line: CalibrationLine<f64>,
    /// Registrar anchored on the tau = 0 map, for absolute shifts.
    pub registrar_zero: Registrar<f64>,
}

pub fn calibrate_ideal(
    engine: &IntensityEngine,
    taus_s: &[f64],
    kappa: u32,
) -> anyhow::Result<CalibrationRun> {
    let reference = engine.map_at(0.0);
    let registrar_zero = Registrar::new(&reference.values, kappa)?;
    let mut points = Vec::with_capacity(taus_s.len());
    for &tau in taus_s {
        let est = registrar_zero.register(&engine.map_at(tau).values)?;
        points.push((tau * 1e18, est.dy));
    }
    let line = calibrate(&points)?;
    Ok(CalibrationRun {
        line,
        registrar_zero,
    })
}

/// Shot-noise limit of the delay estimate from the row distribution:
/// the finite-difference step is sized to move the pattern ~0.1 px.
pub fn shot_noise_limit(
    engine: &IntensityEngine,
    line: &CalibrationLine<f64>,
    tau0: f64,
    n_r: f64,
) -> anyhow::Result<FisherResult<f64>> {
    let delta_tau_s = 0.1 / line.slope.abs() * 1e-18;
    let profile = |tau: f64| engine.row_distribution(tau);
    let result = fisher_information_checked(&profile, tau0, delta_tau_s, n_r, 0.005)
        .context("CFI finite-difference step failed to converge")?;
    Ok(result)
}

/// Reproducible frame source: engine plus drift plus detector, with one
/// RNG stream per frame index so any schedule yields identical frames.
pub struct FrameFactory {
    engine: IntensityEngine,
    ccd: CcdSpec,
    budget: PhotonBudget,
    n_r: f64,
    dt: f64,
    seed: u64,
    tau0: f64,
    /// Per-frame effective delays when the drift rides the delay channel.
    delay_per_frame: Option<Vec<f64>>,
    /// Post-registration pixel offsets when it rides the fringe channel.
    fringe_offsets: Option<Vec<f64>>,
    shared_map: Option<IntensityMap<f64>>,
    frames: usize,
}

impl FrameFactory {
    pub fn new(config: &ExperimentConfig) -> anyhow::Result<Self> {
        let engine = IntensityEngine::new(
            &config.geometry()?,
            &config.selection()?,
            &config.detector_grid()?,
            config.propagation_path()?,
        )?;
        let tau0 = config.tau0()?;
        let frames = config.run.frames;
        let dt = config.dt();
        let seed = config.run.seed;

        let noise_budget = config.noise_budget()?;
        let (delay_per_frame, fringe_offsets) = if noise_budget.is_quiet() {
            (None, None)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(0);
            let drift = noise_budget.synthesize::<f64>(frames, dt, &mut rng)?;
            match inject(tau0, &drift, noise_budget.channel, frames)? {
                InjectedSeries::DelayPerFrame(taus) => (Some(taus), None),
                InjectedSeries::FringeOffsets(offs) => (None, Some(offs)),
            }
        };
        let shared_map = if delay_per_frame.is_none() {
            Some(engine.map_at(tau0))
        } else {
            None
        };
        Ok(Self {
            engine,
            ccd: config.ccd_spec()?,
            budget: config.photon_budget()?,
            n_r: config.run.n_r,
            dt,
            seed,
            tau0,
            delay_per_frame,
            fringe_offsets,
            shared_map,
            frames,
        })
    }

    pub fn engine(&self) -> &IntensityEngine {
        &self.engine
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn fringe_offsets(&self) -> Option<&[f64]> {
        self.fringe_offsets.as_deref()
    }

    pub fn frame(&self, i: usize) -> anyhow::Result<Frame> {
        let meta = FrameMeta {
            index: i as u64,
            timestamp: i as f64 * self.dt,
            rng_stream: i as u64 + 1,
        };
        let mut rng = frame_rng(self.seed, i as u64);
        let frame = match (&self.shared_map, &self.delay_per_frame) {
            (Some(map), _) => expose(map, self.n_r, self.budget, &self.ccd, meta, &mut rng)?,
            (None, Some(taus)) => expose(
                &self.engine.map_at(taus[i]),
                self.n_r,
                self.budget,
                &self.ccd,
                meta,
                &mut rng,
            )?,
            (None, None) => unreachable!("shared map exists without delay drift"),
        };
        Ok(frame)
    }

    /// Reference image per the run policy.
    pub fn reference_image(&self, reference: RunReference) -> anyhow::Result<Grid2<f64>> {
        Ok(match reference {
            RunReference::IdealProfile => self.engine.map_at(self.tau0).values,
            RunReference::Frames(ReferencePolicy::FirstFrame) => self.frame(0)?.to_real(),
            RunReference::Frames(ReferencePolicy::MeanFrame) => {
                let zero = || Grid2::filled(self.ccd.rows, self.ccd.cols, 0.0f64);
                let sum = (0..self.frames)
                    .into_par_iter()
                    .map(|i| self.frame(i).map(|f| f.to_real::<f64>()))
                    .try_reduce(zero, |mut a, b| {
                        for (x, y) in a.as_mut_slice().iter_mut().zip(b.as_slice()) {
                            *x += *y;
                        }
                        Ok(a)
                    })?;
                let inv = 1.0 / self.frames as f64;
                sum.map(|&v| v * inv)
            }
        })
    }
}

/// Everything a simulate run produces.
pub struct SimulationOutput {
    pub calibration: CalibrationLine<f64>,
    pub estimates: Vec<ShiftEstimate<f64>>,
    /// Delay estimates in attoseconds at the frame rate.
    pub tau_series: TimeSeries<f64>,
    /// Shot-noise limit of a single-frame estimate.
    pub fisher: FisherResult<f64>,
    /// CRB in as^2.
    pub crb_as2: f64,
    pub tau0_as: f64,
}

/// Run the full chain for one configuration.
pub fn run_simulate(config: &ExperimentConfig) -> anyhow::Result<SimulationOutput> {
    let factory = FrameFactory::new(config)?;
    let tau0 = factory.tau0();
    let cal = calibrate_ideal(
        factory.engine(),
        &config.calibration_taus()?,
        config.run.kappa,
    )?;
    let fisher = shot_noise_limit(factory.engine(), &cal.line, tau0, config.run.n_r)?;
    let crb_as2 = fisher.crb * 1e36;

    let reference = config.run_reference()?;
    let reference_image = factory.reference_image(reference)?;
    let registrar = Registrar::new(&reference_image, config.run.kappa)?;
    // absolute anchor: where the run reference sits relative to tau = 0
    let ref_offset = cal.registrar_zero.register(&reference_image)?.dy;

    // frames averaged into a mean reference carry a self-correlation term
    // that must be excluded per frame
    let mean_total = match reference {
        RunReference::Frames(ReferencePolicy::MeanFrame) => Some(factory.frame_count()),
        _ => None,
    };
    let mut estimates: Vec<ShiftEstimate<f64>> = (0..factory.frame_count())
        .into_par_iter()
        .map(|i| -> anyhow::Result<ShiftEstimate<f64>> {
            let frame = factory.frame(i)?.to_real();
            Ok(match mean_total {
                Some(total) => registrar.register_excluding_self(&frame, total)?,
                None => registrar.register(&frame)?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    if let Some(offsets) = factory.fringe_offsets() {
        for (e, &o) in estimates.iter_mut().zip(offsets) {
            e.dy += o;
        }
    }

    let tau_hat: Vec<f64> = estimates
        .iter()
        .map(|e| estimate_tau(e.dy + ref_offset, &cal.line))
        .collect::<Result<_, _>>()?;
    let tau_series = TimeSeries::new(tau_hat, factory.dt)?;

    Ok(SimulationOutput {
        calibration: cal.line,
        estimates,
        tau_series,
        fisher,
        crb_as2,
        tau0_as: tau0 * 1e18,
    })
}
