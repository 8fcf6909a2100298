//! Calibration, Allan variance, power spectral density, Fisher
//! information, and scaling-law fits.

mod allan;
mod calib;
mod fisher;
mod psd;
mod slope;

pub use allan::{allan_curve, allan_variance, default_n_grid, AllanCurve, AllanMode, AllanPoint};
pub use calib::{calibrate, estimate_tau, CalibrationLine};
pub use fisher::{fisher_information, fisher_information_checked, FisherResult};
pub use psd::{psd, PsdCurve, PsdMethod, WindowFn};
pub use slope::{scaling_fit, slope_fit_points, SlopeFit};
