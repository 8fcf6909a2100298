//! One-sided power spectral density with Parseval-consistent normalization.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::fft_forward;
use crate::scalar::Real;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdMethod {
    /// Single periodogram over the whole series.
    Periodogram,
    /// Averaged 50 %-overlapped windowed segments.
    AveragedSegments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowFn {
    Rectangular,
    Hann,
}

impl WindowFn {
    fn coefficient(self, i: usize, n: usize) -> f64 {
        match self {
            WindowFn::Rectangular => 1.0,
            WindowFn::Hann => {
                let x = std::f64::consts::PI * i as f64 / n as f64;
                x.sin() * x.sin()
            }
        }
    }
}

/// One-sided PSD over (0, f_s/2].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdCurve<R> {
    /// (frequency Hz, power density) with strictly increasing frequency.
    pub points: Vec<(R, R)>,
    pub method: PsdMethod,
    pub segment_length: usize,
    pub window: WindowFn,
}

impl<R: Real> PsdCurve<R> {
    pub fn frequency_step(&self) -> R {
        if self.points.len() >= 2 {
            self.points[1].0 - self.points[0].0
        } else {
            R::zero()
        }
    }

    /// Integral of S over the curve band, sum S * df.
    pub fn integrated_power(&self) -> R {
        let df = self.frequency_step();
        self.points.iter().map(|&(_, s)| s).sum::<R>() * df
    }
}

/// Estimate the one-sided PSD. `segment_length` applies to the
/// averaged-segment method; the integral of S over (0, f_s/2] matches the
/// series variance for zero-mean stationary input.
pub fn psd<R: Real>(
    series: &TimeSeries<R>,
    method: PsdMethod,
    segment_length: usize,
    window: WindowFn,
) -> Result<PsdCurve<R>> {
    let seg_len = match method {
        PsdMethod::Periodogram => series.len(),
        PsdMethod::AveragedSegments => {
            if series.len() < 2 * segment_length {
                return Err(Error::InsufficientData(format!(
                    "averaged-segment PSD needs >= {} samples, got {}",
                    2 * segment_length,
                    series.len()
                )));
            }
            segment_length
        }
    };
    if seg_len < 8 {
        return Err(Error::InsufficientData(format!(
            "segment length {seg_len} too short"
        )));
    }

    let fs = series.dt().to64().recip();
    let coeffs: Vec<f64> = (0..seg_len).map(|i| window.coefficient(i, seg_len)).collect();
    let window_power: f64 = coeffs.iter().map(|w| w * w).sum();

    let hop = match method {
        PsdMethod::Periodogram => seg_len,
        PsdMethod::AveragedSegments => (seg_len / 2).max(1),
    };
    let x = series.samples();
    let n_bins = seg_len / 2;
    let mut acc = vec![0.0f64; n_bins];
    let mut segments = 0usize;
    let mut start = 0usize;
    while start + seg_len <= x.len() {
        let mut buf: Vec<Complex<R>> = (0..seg_len)
            .map(|i| Complex::new(x[start + i] * R::of(coeffs[i]), R::zero()))
            .collect();
        fft_forward(&mut buf);
        for k in 1..=n_bins {
            let mag2 = buf[k].norm_sqr().to64();
            let one_sided = if k == seg_len - k { 1.0 } else { 2.0 };
            acc[k - 1] += one_sided * mag2 / (fs * window_power);
        }
        segments += 1;
        start += hop;
    }

    let inv = 1.0 / segments as f64;
    let df = fs / seg_len as f64;
    let points = acc
        .iter()
        .enumerate()
        .map(|(i, &s)| (R::of((i + 1) as f64 * df), R::of(s * inv)))
        .collect();
    Ok(PsdCurve {
        points,
        method,
        segment_length: seg_len,
        window,
    })
}
