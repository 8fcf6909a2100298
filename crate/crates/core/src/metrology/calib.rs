//! Calibration-line fit (fringe shift per unit delay) and its inverse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Least-squares line through (tau, mean shift) points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationLine<R> {
    /// Pixels per attosecond.
    pub slope: R,
    /// Pixels.
    pub intercept: R,
    pub residual_rms: R,
    /// The fitted (tau as, mean shift px) points.
    pub tau_points: Vec<(R, R)>,
}

/// Ordinary least squares over >= 2 distinct delays.
pub fn calibrate<R: Real>(measurements: &[(R, R)]) -> Result<CalibrationLine<R>> {
    let mut taus: Vec<R> = measurements.iter().map(|p| p.0).collect();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    taus.dedup();
    if taus.len() < 2 {
        return Err(Error::UnderdeterminedFit);
    }
    let n = R::of(measurements.len() as f64);
    let mx = measurements.iter().map(|p| p.0).sum::<R>() / n;
    let my = measurements.iter().map(|p| p.1).sum::<R>() / n;
    let sxx = measurements
        .iter()
        .map(|p| (p.0 - mx) * (p.0 - mx))
        .sum::<R>();
    let sxy = measurements
        .iter()
        .map(|p| (p.0 - mx) * (p.1 - my))
        .sum::<R>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = measurements
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum::<R>();
    Ok(CalibrationLine {
        slope,
        intercept,
        residual_rms: (ss_res / n).sqrt(),
        tau_points: measurements.to_vec(),
    })
}

/// Invert the calibration: tau = (shift - intercept) / slope.
pub fn estimate_tau<R: Real>(shift: R, line: &CalibrationLine<R>) -> Result<R> {
    if line.slope == R::zero() {
        return Err(Error::DegenerateCalibration);
    }
    Ok((shift - line.intercept) / line.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line_recovered() {
        let line = calibrate(&[(1.0f64, 2.0), (2.0, 4.0), (3.0, 6.0)]).unwrap();
        assert_relative_eq!(line.slope, 2.0, max_relative = 1e-14);
        assert!(line.intercept.abs() < 1e-14);
        assert!(line.residual_rms < 1e-14);
    }

    #[test]
    fn underdetermined_rejected() {
        assert_eq!(
            calibrate(&[(1.0f64, 2.0)]).unwrap_err(),
            Error::UnderdeterminedFit
        );
        assert_eq!(
            calibrate(&[(1.0f64, 2.0), (1.0, 2.5)]).unwrap_err(),
            Error::UnderdeterminedFit
        );
    }

    #[test]
    fn paper_slope_arithmetic() {
        // the reported slope k = 11.75 px/as maps a 19.86 px shift to 1.69 as
        let line = CalibrationLine {
            slope: 11.75f64,
            intercept: 0.0,
            residual_rms: 0.0,
            tau_points: vec![],
        };
        let tau = estimate_tau(19.86, &line).unwrap();
        assert!((tau - 1.69).abs() < 0.001, "tau = {tau}");
        // and the non-amplified slope 0.54 px/as is the companion fixture
        let line45 = CalibrationLine {
            slope: 0.54,
            intercept: 0.0,
            residual_rms: 0.0,
            tau_points: vec![],
        };
        assert_relative_eq!(
            estimate_tau(0.54 * 1.69, &line45).unwrap(),
            1.69,
            max_relative = 1e-12
        );
    }

    #[test]
    fn inverse_identity() {
        let line = calibrate(&[(1.08, 12.1), (1.69, 19.4), (2.43, 28.2)]).unwrap();
        for tau in [0.5, 1.69, 3.0] {
            let shift = line.slope * tau + line.intercept;
            assert_relative_eq!(
                estimate_tau(shift, &line).unwrap(),
                tau,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn zero_slope_rejected() {
        let line = CalibrationLine {
            slope: 0.0,
            intercept: 1.0,
            residual_rms: 0.0,
            tau_points: vec![],
        };
        assert_eq!(
            estimate_tau(2.0, &line).unwrap_err(),
            Error::DegenerateCalibration
        );
    }

    #[test]
    fn zero_shift_zero_tau() {
        let line = calibrate(&[(0.0, 0.0), (1.0, 3.0)]).unwrap();
        assert_eq!(estimate_tau(0.0, &line).unwrap(), 0.0);
    }
}
