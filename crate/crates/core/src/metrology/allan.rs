//! Overlapping Allan variance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::TimeSeries;

/// Which pair of windows is differenced.
///
/// `WindowOffset` differences window means n samples apart (the next
/// non-overlapping window at every start position), which is the reading
/// whose summation limit M - 2n + 1 is self-consistent. `SampleOffset`
/// differences windows one start position apart and exists only for
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AllanMode {
    #[default]
    WindowOffset,
    SampleOffset,
}

/// One averaging interval of the variance curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllanPoint<R> {
    /// Averaging interval T = n * dt (s).
    pub t: R,
    pub sigma2: R,
    pub n: usize,
    pub windows_used: usize,
}

/// Allan variance as a function of the averaging interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllanCurve<R> {
    pub points: Vec<AllanPoint<R>>,
}

impl<R: Real> AllanCurve<R> {
    /// (T, sigma^2) view for slope fitting.
    pub fn xy(&self) -> Vec<(R, R)> {
        self.points.iter().map(|p| (p.t, p.sigma2)).collect()
    }
}

/// Two-sample variance at window length `n`:
/// sigma^2 = sum_k (mean_{k+off} - mean_k)^2 / (2 (M - 2n + 1)).
pub fn allan_variance<R: Real>(
    series: &TimeSeries<R>,
    n: usize,
    mode: AllanMode,
) -> Result<(R, usize)> {
    let m = series.len();
    if n < 1 {
        return Err(Error::InvalidArgument("window length n must be >= 1".into()));
    }
    if m < 2 * n {
        return Err(Error::InsufficientData(format!(
            "Allan variance at n = {n} needs >= {} samples, got {m}",
            2 * n
        )));
    }
    // prefix sums make each window mean O(1)
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(R::zero());
    let mut acc = R::zero();
    for &x in series.samples() {
        acc += x;
        prefix.push(acc);
    }
    let inv_n = R::of(1.0 / n as f64);
    let mean_at = |k: usize| (prefix[k + n] - prefix[k]) * inv_n;

    let windows = m - 2 * n + 1;
    let offset = match mode {
        AllanMode::WindowOffset => n,
        AllanMode::SampleOffset => 1,
    };
    let mut sum = R::zero();
    for k in 0..windows {
        let d = mean_at(k + offset) - mean_at(k);
        sum += d * d;
    }
    let sigma2 = sum / (R::of(2.0) * R::of(windows as f64));
    Ok((sigma2, windows))
}

/// Evaluate the variance over a grid of window lengths.
pub fn allan_curve<R: Real>(
    series: &TimeSeries<R>,
    n_grid: &[usize],
    mode: AllanMode,
) -> Result<AllanCurve<R>> {
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let (sigma2, windows_used) = allan_variance(series, n, mode)?;
        points.push(AllanPoint {
            t: R::of(n as f64) * series.dt(),
            sigma2,
            n,
            windows_used,
        });
    }
    Ok(AllanCurve { points })
}

/// Log-spaced window lengths, about `per_decade` points per decade from
/// 1 to M/2, deduplicated.
pub fn default_n_grid(m: usize, per_decade: usize) -> Vec<usize> {
    let max_n = (m / 2).max(1);
    let decades = (max_n as f64).log10();
    let count = (decades * per_decade as f64).ceil() as usize + 1;
    let mut grid: Vec<usize> = (0..=count)
        .map(|i| {
            let exp = decades * i as f64 / count as f64;
            10f64.powf(exp).round() as usize
        })
        .filter(|&n| n >= 1 && n <= max_n)
        .collect();
    grid.dedup();
    grid
}
