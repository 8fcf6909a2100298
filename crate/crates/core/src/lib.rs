//! Simulation and metrology for a weak-value-amplified double-slit
//! interferometer measuring attosecond-scale birefringent time delays.
//!
//! The crate is organized along the measurement chain:
//!
//! * [`polarization`] — pre/post-selection algebra, weak values, and the
//!   tilt-to-delay map of the two-waveplate delay stage.
//! * [`diffraction`] — far-field propagation of the slit-split Gaussian
//!   pointer (analytic and brute-force routes) and the weak-value-weighted
//!   interference intensity.
//! * [`ccd`] — Poisson photoelectron statistics, gain, quantization and
//!   saturation of the detector.
//! * [`noisegen`] — calibrated white / flicker / random-walk drift
//!   synthesis and its injection into the measurement chain.
//! * [`registration`] — subpixel fringe-shift estimation by upsampled
//!   FFT cross-correlation.
//! * [`metrology`] — calibration fits, overlapping Allan variance, power
//!   spectral density, Fisher information and scaling-law fits.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`];
//! the `*64` aliases below fix the common double-precision instantiation.

pub mod ccd;
pub mod diffraction;
pub mod error;
mod fft;
pub mod grid;
pub mod io;
pub mod metrology;
pub mod noisegen;
pub mod polarization;
pub mod registration;
pub mod scalar;
pub mod series;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations of the core types.
pub type GridSpec64 = grid::GridSpec<f64>;
pub type IntensityMap64 = grid::IntensityMap<f64>;
pub type ComplexFieldGrid64 = grid::ComplexFieldGrid<f64>;
pub type TimeSeries64 = series::TimeSeries<f64>;
pub type SelectionConfig64 = polarization::SelectionConfig<f64>;
pub type OpticalGeometry64 = diffraction::OpticalGeometry<f64>;
pub type AllanCurve64 = metrology::AllanCurve<f64>;
pub type PsdCurve64 = metrology::PsdCurve<f64>;
pub type CalibrationLine64 = metrology::CalibrationLine<f64>;
pub type FisherResult64 = metrology::FisherResult<f64>;
pub type ShiftEstimate64 = registration::ShiftEstimate<f64>;
