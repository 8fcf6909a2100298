//! Uniformly sampled time series.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniformly sampled series of estimates, the common currency between
/// the simulation chain and the Allan/PSD estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<R> {
    samples: Vec<R>,
    dt: R,
    start_index: u64,
}

impl<R: Real> TimeSeries<R> {
    pub fn new(samples: Vec<R>, dt: R) -> Result<Self> {
        Self::with_start(samples, dt, 0)
    }

    pub fn with_start(samples: Vec<R>, dt: R, start_index: u64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "time series needs >= 2 samples, got {}",
                samples.len()
            )));
        }
        if dt <= R::zero() {
            return Err(Error::InvalidArgument(format!(
                "sampling period must be positive, got {dt}"
            )));
        }
        Ok(Self {
            samples,
            dt,
            start_index,
        })
    }

    #[inline]
    pub fn samples(&self) -> &[R] {
        &self.samples
    }

    #[inline]
    pub fn dt(&self) -> R {
        self.dt
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start_index(&self) -> u64 {
        self.start_index
    }

    /// Sample timestamp in seconds.
    pub fn time_of(&self, i: usize) -> R {
        R::of((self.start_index + i as u64) as f64) * self.dt
    }

    pub fn mean(&self) -> R {
        self.samples.iter().copied().sum::<R>() / R::of(self.len() as f64)
    }

    pub fn variance(&self) -> R {
        let m = self.mean();
        let n = R::of(self.len() as f64);
        self.samples
            .iter()
            .map(|&x| (x - m) * (x - m))
            .sum::<R>()
            / (n - R::one())
    }

    pub fn map(&self, f: impl Fn(R) -> R) -> Self {
        Self {
            samples: self.samples.iter().map(|&x| f(x)).collect(),
            dt: self.dt,
            start_index: self.start_index,
        }
    }
}
