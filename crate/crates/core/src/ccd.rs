//! Detector model: Poisson photoelectron statistics, ADU gain,
//! quantization and bit-depth clipping.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid2, IntensityMap};
use crate::scalar::Real;

/// Detector geometry and response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcdSpec {
    /// Pixel pitch (m).
    pub pixel_pitch: f64,
    pub rows: usize,
    pub cols: usize,
    /// ADC depth; saturation level is 2^bit_depth - 1.
    pub bit_depth: u8,
    /// Detection efficiency eta.
    pub quantum_efficiency: f64,
    /// ADU per photoelectron.
    pub gain: f64,
}

impl CcdSpec {
    pub fn new(
        pixel_pitch: f64,
        rows: usize,
        cols: usize,
        bit_depth: u8,
        quantum_efficiency: f64,
        gain: f64,
    ) -> Result<Self> {
        if !matches!(bit_depth, 8 | 12 | 16) {
            return Err(Error::InvalidArgument(format!(
                "bit depth {bit_depth} not one of 8/12/16"
            )));
        }
        if !(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "quantum efficiency {quantum_efficiency} outside (0, 1]"
            )));
        }
        if pixel_pitch <= 0.0 || gain <= 0.0 {
            return Err(Error::InvalidArgument(
                "pixel pitch and gain must be positive".into(),
            ));
        }
        Ok(Self {
            pixel_pitch,
            rows,
            cols,
            bit_depth,
            quantum_efficiency,
            gain,
        })
    }

    /// Paper-grade detector: 1.85 um pixels, 8 bit, eta = 0.856, unit gain.
    pub fn paper_default(rows: usize, cols: usize) -> Self {
        Self {
            pixel_pitch: 1.85e-6,
            rows,
            cols,
            bit_depth: 8,
            quantum_efficiency: 0.856,
            gain: 1.0,
        }
    }

    pub fn saturation_level(&self) -> u16 {
        if self.bit_depth == 16 {
            u16::MAX
        } else {
            ((1u32 << self.bit_depth) - 1) as u16
        }
    }
}

/// Frame provenance: index in the run, timestamp, RNG stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameMeta {
    pub index: u64,
    pub timestamp: f64,
    pub rng_stream: u64,
}

/// Integer ADU counts of one exposure.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub counts: Grid2<u16>,
    pub spec: CcdSpec,
    pub meta: FrameMeta,
}

impl Frame {
    /// Counts viewed as the scalar type of the analysis chain.
    pub fn to_real<R: Real>(&self) -> Grid2<R> {
        self.counts.map(|&c| R::of(c as f64))
    }
}

/// How the expected photon budget is specified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhotonBudget {
    /// n_r counts photons already detected (post-efficiency).
    Detected,
    /// n_r counts photons arriving at the detector; the quantum efficiency
    /// is applied before sampling.
    Incident,
}

/// Per-frame RNG stream: one master seed, one stream per frame index, so
/// frame generation is reproducible under any parallel schedule.
pub fn frame_rng(master_seed: u64, frame_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(frame_index.wrapping_add(1));
    rng
}

/// Expose the detector to `intensity` with an expected photon count `n_r`:
/// per-pixel mean mu = n_r * I / sum(I), Poisson-sampled, scaled by the
/// gain, rounded and clipped at the saturation level.
pub fn expose<R: Real>(
    intensity: &IntensityMap<R>,
    n_r: f64,
    budget: PhotonBudget,
    spec: &CcdSpec,
    meta: FrameMeta,
    rng: &mut impl Rng,
) -> Result<Frame> {
    if intensity.values.rows() != spec.rows || intensity.values.cols() != spec.cols {
        return Err(Error::Shape(format!(
            "intensity {}x{} vs detector {}x{}",
            intensity.values.rows(),
            intensity.values.cols(),
            spec.rows,
            spec.cols
        )));
    }
    if n_r <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "expected photon count {n_r} must be > 0"
        )));
    }
    let total = intensity.total().to64();
    if total <= 0.0 {
        return Err(Error::EmptyIntensity);
    }
    let detected = match budget {
        PhotonBudget::Detected => n_r,
        PhotonBudget::Incident => n_r * spec.quantum_efficiency,
    };
    let scale = detected / total;
    let sat = spec.saturation_level();
    let mut counts = Vec::with_capacity(spec.rows * spec.cols);
    for v in intensity.values.as_slice() {
        let mu = v.to64() * scale;
        let k = sample_poisson(mu, rng);
        let adu = (spec.gain * k as f64).round();
        counts.push(if adu >= sat as f64 { sat } else { adu as u16 });
    }
    Ok(Frame {
        counts: Grid2::from_vec(spec.rows, spec.cols, counts)?,
        spec: *spec,
        meta,
    })
}

fn sample_poisson(mu: f64, rng: &mut impl Rng) -> u64 {
    if mu <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mu).expect("positive finite mean");
    let x: f64 = d.sample(rng);
    x as u64
}

/// Row sums K_m = sum_n k_mn, collapsing the transverse axis.
pub fn row_marginal(frame: &Frame) -> Vec<u64> {
    (0..frame.counts.rows())
        .map(|r| frame.counts.row(r).iter().map(|&c| c as u64).sum())
        .collect()
}

/// Fraction of pixels pinned at the saturation level.
pub fn saturation_fraction(frame: &Frame) -> f64 {
    let sat = frame.spec.saturation_level();
    let n = frame.counts.as_slice().len();
    let hits = frame.counts.as_slice().iter().filter(|&&c| c == sat).count();
    hits as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn flat_map(rows: usize, cols: usize, value: f64) -> IntensityMap<f64> {
        IntensityMap {
            values: Grid2::filled(rows, cols, value),
            spec: GridSpec::new(rows, cols, 1.85e-6).unwrap(),
        }
    }

    fn meta() -> FrameMeta {
        FrameMeta {
            index: 0,
            timestamp: 0.0,
            rng_stream: 1,
        }
    }

    #[test]
    fn spec_validation() {
        assert!(CcdSpec::new(1.85e-6, 8, 8, 10, 0.856, 1.0).is_err());
        assert!(CcdSpec::new(1.85e-6, 8, 8, 8, 0.0, 1.0).is_err());
        assert!(CcdSpec::new(1.85e-6, 8, 8, 8, 1.2, 1.0).is_err());
        let s = CcdSpec::new(1.85e-6, 8, 8, 8, 0.856, 1.0).unwrap();
        assert_eq!(s.saturation_level(), 255);
        assert_eq!(
            CcdSpec::new(1.85e-6, 8, 8, 16, 0.856, 1.0)
                .unwrap()
                .saturation_level(),
            65535
        );
    }

    #[test]
    fn near_zero_budget_gives_empty_frame() {
        let m = flat_map(16, 16, 1.0);
        let spec = CcdSpec::paper_default(16, 16);
        let mut rng = frame_rng(1, 0);
        assert!(expose(&m, 0.0, PhotonBudget::Detected, &spec, meta(), &mut rng).is_err());
        let f = expose(&m, 1e-9, PhotonBudget::Detected, &spec, meta(), &mut rng).unwrap();
        assert!(f.counts.as_slice().iter().all(|&c| c == 0));
    }

    #[test]
    fn empty_intensity_rejected() {
        let m = flat_map(8, 8, 0.0);
        let spec = CcdSpec::paper_default(8, 8);
        let mut rng = frame_rng(1, 0);
        assert_eq!(
            expose(&m, 100.0, PhotonBudget::Detected, &spec, meta(), &mut rng),
            Err(Error::EmptyIntensity)
        );
    }

    #[test]
    fn uniform_exposure_matches_poisson_mean_and_variance() {
        // 64x64 pixels, n_r = 1e6 detected -> mu = 244.14 per pixel
        let rows = 64;
        let m = flat_map(rows, rows, 3.7);
        let spec = CcdSpec::new(1.85e-6, rows, rows, 16, 0.856, 1.0).unwrap();
        let mut rng = frame_rng(42, 0);
        let n_r = 1e6;
        let f = expose(&m, n_r, PhotonBudget::Detected, &spec, meta(), &mut rng).unwrap();
        let mu = n_r / (rows * rows) as f64;
        let mean = f.counts.as_slice().iter().map(|&c| c as f64).sum::<f64>()
            / (rows * rows) as f64;
        // 3 sigma / sqrt(P) Monte-Carlo band
        let band = 3.0 * mu.sqrt() / (rows as f64);
        assert!((mean - mu).abs() < band, "mean {mean} vs {mu} +- {band}");
        let var = f
            .counts
            .as_slice()
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / ((rows * rows - 1) as f64);
        assert!((var / mu - 1.0).abs() < 0.1, "variance/mean = {}", var / mu);
    }

    #[test]
    fn incident_budget_scales_by_efficiency() {
        let rows = 64;
        let m = flat_map(rows, rows, 1.0);
        let spec = CcdSpec::new(1.85e-6, rows, rows, 16, 0.5, 1.0).unwrap();
        let mut rng = frame_rng(7, 0);
        let f = expose(&m, 2e6, PhotonBudget::Incident, &spec, meta(), &mut rng).unwrap();
        let total: f64 = f.counts.as_slice().iter().map(|&c| c as f64).sum();
        assert!((total - 1e6).abs() < 4.0 * 1e3); // 4 sqrt(n_r)
    }

    #[test]
    fn saturation_clips_at_bit_depth() {
        let rows = 32;
        let m = flat_map(rows, rows, 1.0);
        let spec = CcdSpec::paper_default(rows, rows); // 8 bit
        let mut rng = frame_rng(3, 0);
        // mu = 1e3 per pixel >> 255
        let f = expose(
            &m,
            1e3 * (rows * rows) as f64,
            PhotonBudget::Detected,
            &spec,
            meta(),
            &mut rng,
        )
        .unwrap();
        assert!(f.counts.as_slice().iter().all(|&c| c <= 255));
        assert_eq!(saturation_fraction(&f), 1.0);
    }

    #[test]
    fn half_saturation_rarely_clips() {
        // mu = 127 on an 8-bit detector: Poisson tail beyond 255 is ~1e-12
        let rows = 64;
        let m = flat_map(rows, rows, 1.0);
        let spec = CcdSpec::paper_default(rows, rows);
        let mut rng = frame_rng(9, 0);
        let f = expose(
            &m,
            127.0 * (rows * rows) as f64,
            PhotonBudget::Detected,
            &spec,
            meta(),
            &mut rng,
        )
        .unwrap();
        assert!(saturation_fraction(&f) < 1e-3);
    }

    #[test]
    fn saturation_fraction_monotone_in_budget() {
        let rows = 32;
        let m = flat_map(rows, rows, 1.0);
        let spec = CcdSpec::paper_default(rows, rows);
        let mut prev = -1.0;
        for n_r in [50.0, 150.0, 260.0, 400.0] {
            let mut rng = frame_rng(11, 0);
            let f = expose(
                &m,
                n_r * (rows * rows) as f64,
                PhotonBudget::Detected,
                &spec,
                meta(),
                &mut rng,
            )
            .unwrap();
            let frac = saturation_fraction(&f);
            assert!(frac >= prev, "saturation fraction decreased at n_r={n_r}");
            prev = frac;
        }
    }

    #[test]
    fn marginals() {
        let spec = CcdSpec::paper_default(4, 4);
        let ones = Frame {
            counts: Grid2::filled(4, 4, 1u16),
            spec,
            meta: meta(),
        };
        assert_eq!(row_marginal(&ones), vec![4, 4, 4, 4]);

        let mut single = Grid2::filled(4, 4, 0u16);
        *single.get_mut(2, 1) = 7;
        let f = Frame {
            counts: single,
            spec,
            meta: meta(),
        };
        assert_eq!(row_marginal(&f), vec![0, 0, 7, 0]);
    }

    #[test]
    fn marginal_is_linear() {
        let spec = CcdSpec::paper_default(3, 3);
        let a = Frame {
            counts: Grid2::from_vec(3, 3, vec![1, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap(),
            spec,
            meta: meta(),
        };
        let b = Frame {
            counts: Grid2::from_vec(3, 3, vec![9, 8, 7, 6, 5, 4, 3, 2, 1]).unwrap(),
            spec,
            meta: meta(),
        };
        let sum = Frame {
            counts: Grid2::from_fn(3, 3, |r, c| a.counts.get(r, c) + b.counts.get(r, c)),
            spec,
            meta: meta(),
        };
        let ma = row_marginal(&a);
        let mb = row_marginal(&b);
        let ms = row_marginal(&sum);
        for i in 0..3 {
            assert_eq!(ms[i], ma[i] + mb[i]);
        }
    }

    #[test]
    fn deterministic_frames_per_seed_and_stream() {
        let rows = 32;
        let m = flat_map(rows, rows, 1.0);
        let spec = CcdSpec::paper_default(rows, rows);
        let run = |seed, idx| {
            let mut rng = frame_rng(seed, idx);
            expose(&m, 1e4, PhotonBudget::Detected, &spec, meta(), &mut rng).unwrap()
        };
        assert_eq!(run(5, 3), run(5, 3));
        assert_ne!(run(5, 3), run(5, 4));
        assert_ne!(run(5, 3), run(6, 3));
    }

    #[test]
    fn gain_scales_counts() {
        let rows = 32;
        let m = flat_map(rows, rows, 1.0);
        let g1 = CcdSpec::new(1.85e-6, rows, rows, 16, 0.856, 1.0).unwrap();
        let g4 = CcdSpec::new(1.85e-6, rows, rows, 16, 0.856, 4.0).unwrap();
        let mut r1 = frame_rng(21, 0);
        let mut r4 = frame_rng(21, 0);
        let f1 = expose(&m, 1e5, PhotonBudget::Detected, &g1, meta(), &mut r1).unwrap();
        let f4 = expose(&m, 1e5, PhotonBudget::Detected, &g4, meta(), &mut r4).unwrap();
        for (a, b) in f1
            .counts
            .as_slice()
            .iter()
            .zip(f4.counts.as_slice().iter())
        {
            assert_eq!(*b, a * 4);
        }
    }
}
