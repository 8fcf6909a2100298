//! Calibrated colored-noise synthesis and its injection into the
//! measurement chain.
//!
//! Synthesis shapes white Gaussian noise in the frequency domain: bin k is
//! scaled by f_k^{-alpha/2}, the DC bin is zeroed, and the level is fixed so
//! the one-sided PSD equals `amp` at 1 Hz. alpha = 0/1/2 give white,
//! flicker, and random-walk series.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{bin_frequency, fft_forward, fft_inverse_normalized};
use crate::scalar::Real;
use crate::series::TimeSeries;

/// Where synthesized drift enters the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChannel {
    /// Drift adds to the set time delay before each exposure (seconds).
    DelayOffset,
    /// Drift adds to the registered fringe shift after registration (pixels).
    FringeOffset,
}

/// Phenomenological technical-noise levels.
///
/// `white_sigma` is an RMS in channel units; `flicker_amp` and `rw_amp` are
/// one-sided PSD levels at 1 Hz in channel-units^2/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub white_sigma: f64,
    pub flicker_amp: f64,
    pub rw_amp: f64,
    pub channel: NoiseChannel,
}

impl NoiseBudget {
    pub fn quiet(channel: NoiseChannel) -> Self {
        Self {
            white_sigma: 0.0,
            flicker_amp: 0.0,
            rw_amp: 0.0,
            channel,
        }
    }

    pub fn is_quiet(&self) -> bool {
        self.white_sigma == 0.0 && self.flicker_amp == 0.0 && self.rw_amp == 0.0
    }

    /// Sum of the three calibrated components. The white part is drawn
    /// directly in the time domain (no length restriction); the colored
    /// parts go through spectral shaping.
    pub fn synthesize<R: Real>(
        &self,
        length: usize,
        dt: R,
        rng: &mut impl Rng,
    ) -> Result<TimeSeries<R>> {
        if self.white_sigma < 0.0 || self.flicker_amp < 0.0 || self.rw_amp < 0.0 {
            return Err(Error::InvalidArgument(
                "noise amplitudes must be >= 0".into(),
            ));
        }
        let mut total = vec![R::zero(); length];
        if self.white_sigma > 0.0 {
            for t in total.iter_mut() {
                let g: f64 = StandardNormal.sample(rng);
                *t += R::of(self.white_sigma * g);
            }
        }
        for (alpha, amp) in [(1.0, self.flicker_amp), (2.0, self.rw_amp)] {
            if amp == 0.0 {
                continue;
            }
            let part = gen_powerlaw::<R>(alpha, length, amp, dt, rng)?;
            for (t, p) in total.iter_mut().zip(part.samples()) {
                *t += *p;
            }
        }
        TimeSeries::new(total, dt)
    }
}

/// Series whose one-sided PSD follows `amp * f^-alpha` over the resolvable
/// band; the DC bin is zeroed so realizations stay mean-anchored.
pub fn gen_powerlaw<R: Real>(
    alpha: f64,
    length: usize,
    amp: f64,
    dt: R,
    rng: &mut impl Rng,
) -> Result<TimeSeries<R>> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::UnsupportedExponent(alpha));
    }
    if length < 64 {
        return Err(Error::InvalidArgument(format!(
            "power-law synthesis needs >= 64 samples, got {length}"
        )));
    }
    if amp < 0.0 {
        return Err(Error::InvalidArgument(format!("amp {amp} < 0")));
    }
    if amp == 0.0 {
        return TimeSeries::new(vec![R::zero(); length], dt);
    }

    let fs = dt.to64().recip();
    let mut spectrum: Vec<Complex<R>> = (0..length)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            Complex::new(R::of(g), R::zero())
        })
        .collect();
    fft_forward(&mut spectrum);

    // |X_k|^2 acquires N * H_k^2; a periodogram then reads 2 H_k^2 / f_s,
    // so H_k = sqrt(amp f_s / 2) f_k^{-alpha/2} yields S(f) = amp f^-alpha.
    let level = (amp * fs / 2.0).sqrt();
    spectrum[0] = Complex::new(R::zero(), R::zero());
    for (k, v) in spectrum.iter_mut().enumerate().skip(1) {
        let f_hz = bin_frequency::<R>(k, length).to64().abs() * fs;
        let h = level * f_hz.powf(-alpha / 2.0);
        *v = v.scale(R::of(h));
    }
    fft_inverse_normalized(&mut spectrum);
    let samples = spectrum.iter().map(|c| c.re).collect();
    TimeSeries::new(samples, dt)
}

/// Per-frame effective parameters after drift injection.
#[derive(Debug, Clone, PartialEq)]
pub enum InjectedSeries<R> {
    /// Effective delays tau_i = base_tau + drift_i (seconds).
    DelayPerFrame(Vec<R>),
    /// Offsets to add to the registered shifts (pixels).
    FringeOffsets(Vec<R>),
}

/// Map a drift series onto the simulation chain for `n_frames` exposures.
pub fn inject<R: Real>(
    base_tau: R,
    drift: &TimeSeries<R>,
    channel: NoiseChannel,
    n_frames: usize,
) -> Result<InjectedSeries<R>> {
    if drift.len() != n_frames {
        return Err(Error::Length {
            expected: n_frames,
            got: drift.len(),
        });
    }
    Ok(match channel {
        NoiseChannel::DelayOffset => InjectedSeries::DelayPerFrame(
            drift.samples().iter().map(|&d| base_tau + d).collect(),
        ),
        NoiseChannel::FringeOffset => {
            InjectedSeries::FringeOffsets(drift.samples().to_vec())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_amp_is_zero_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = gen_powerlaw::<f64>(1.0, 256, 0.0, 0.01, &mut rng).unwrap();
        assert!(s.samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn exponent_domain_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            gen_powerlaw::<f64>(2.5, 256, 1.0, 0.01, &mut rng),
            Err(Error::UnsupportedExponent(_))
        ));
        assert!(gen_powerlaw::<f64>(0.0, 32, 1.0, 0.01, &mut rng).is_err());
    }

    #[test]
    fn white_series_is_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1 << 14;
        let s = gen_powerlaw::<f64>(0.0, n, 1.0, 0.01, &mut rng).unwrap();
        let x = s.samples();
        let var = s.variance();
        let bound = 4.0 / (n as f64).sqrt();
        for lag in 1..5 {
            let acf = x
                .iter()
                .zip(x[lag..].iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / ((n - lag) as f64)
                / var;
            assert!(acf.abs() < bound, "lag {lag}: acf {acf}");
        }
    }

    #[test]
    fn white_variance_matches_parameterization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let budget = NoiseBudget {
            white_sigma: 2.5,
            flicker_amp: 0.0,
            rw_amp: 0.0,
            channel: NoiseChannel::DelayOffset,
        };
        let s = budget.synthesize::<f64>(1 << 16, 0.01, &mut rng).unwrap();
        let var = s.variance();
        assert!(
            (var / (2.5f64 * 2.5) - 1.0).abs() < 0.05,
            "variance {var} vs 6.25"
        );
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let a = gen_powerlaw::<f64>(1.0, 512, 3.0, 0.01, &mut ChaCha8Rng::seed_from_u64(9))
            .unwrap();
        let b = gen_powerlaw::<f64>(1.0, 512, 3.0, 0.01, &mut ChaCha8Rng::seed_from_u64(9))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn injection_channels() {
        let drift = TimeSeries::new(vec![0.0, 1.0, -1.0], 0.01).unwrap();
        let inj = inject(10.0, &drift, NoiseChannel::DelayOffset, 3).unwrap();
        assert_eq!(
            inj,
            InjectedSeries::DelayPerFrame(vec![10.0, 11.0, 9.0])
        );
        let inj = inject(10.0, &drift, NoiseChannel::FringeOffset, 3).unwrap();
        assert_eq!(inj, InjectedSeries::FringeOffsets(vec![0.0, 1.0, -1.0]));
        assert!(matches!(
            inject(10.0, &drift, NoiseChannel::DelayOffset, 5),
            Err(Error::Length { expected: 5, got: 3 })
        ));
    }

    #[test]
    fn constant_drift_biases_delay_channel() {
        let drift = TimeSeries::new(vec![0.5; 8], 0.01).unwrap();
        if let InjectedSeries::DelayPerFrame(taus) =
            inject(2.0f64, &drift, NoiseChannel::DelayOffset, 8).unwrap()
        {
            assert!(taus.iter().all(|&t| (t - 2.5).abs() < 1e-15));
        } else {
            panic!("wrong channel");
        }
    }

    #[test]
    fn zero_drift_keeps_base_tau() {
        let drift = TimeSeries::new(vec![0.0; 4], 0.01).unwrap();
        if let InjectedSeries::DelayPerFrame(taus) =
            inject(1.5, &drift, NoiseChannel::DelayOffset, 4).unwrap()
        {
            assert!(taus.iter().all(|&t| t == 1.5));
        } else {
            panic!("wrong channel");
        }
    }
}
