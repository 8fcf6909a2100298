//! Log-log slope fits for Allan, PSD, and photon-number scaling curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit<R> {
    pub exponent: R,
    pub stderr: R,
    pub points_used: usize,
}

/// Least-squares slope in log10-log10 coordinates over `band` on the x
/// axis. Points with non-positive ordinate are skipped (they carry no
/// log-domain information).
pub fn slope_fit_points<R: Real>(points: &[(R, R)], band: (R, R)) -> Result<SlopeFit<R>> {
    fit(points, band, 4)
}

/// Photon-number scaling exponent over all supplied points.
pub fn scaling_fit<R: Real>(points: &[(R, R)]) -> Result<SlopeFit<R>> {
    let lo = points
        .iter()
        .map(|p| p.0)
        .fold(R::infinity(), R::min);
    let hi = points
        .iter()
        .map(|p| p.0)
        .fold(R::neg_infinity(), R::max);
    fit(points, (lo, hi), 3)
}

fn fit<R: Real>(points: &[(R, R)], band: (R, R), min_points: usize) -> Result<SlopeFit<R>> {
    let sel: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x >= band.0 && x <= band.1 && x > R::zero() && y > R::zero())
        .map(|&(x, y)| (x.to64().log10(), y.to64().log10()))
        .collect();
    if sel.len() < min_points {
        return Err(Error::EmptyBand {
            lo: band.0.to64(),
            hi: band.1.to64(),
        });
    }
    let n = sel.len() as f64;
    let mx = sel.iter().map(|p| p.0).sum::<f64>() / n;
    let my = sel.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = sel.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = sel.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::EmptyBand {
            lo: band.0.to64(),
            hi: band.1.to64(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = sel
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    let stderr = if sel.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit {
        exponent: R::of(slope),
        stderr: R::of(stderr),
        points_used: sel.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law_recovered() {
        let points: Vec<(f64, f64)> = (1..40)
            .map(|i| {
                let f = 0.1 * i as f64;
                (f, 3.0 * f.powi(-2))
            })
            .collect();
        let fit = slope_fit_points(&points, (0.0, 10.0)).unwrap();
        assert_relative_eq!(fit.exponent, -2.0, max_relative = 1e-12);
        assert!(fit.stderr < 1e-12);
    }

    #[test]
    fn band_restriction_applies() {
        let mut points: Vec<(f64, f64)> = (1..100)
            .map(|i| {
                let f = i as f64;
                (f, f.powi(-1))
            })
            .collect();
        // corrupt the out-of-band region
        for p in points.iter_mut().filter(|p| p.0 > 50.0) {
            p.1 = 1e6;
        }
        let fit = slope_fit_points(&points, (1.0, 50.0)).unwrap();
        assert_relative_eq!(fit.exponent, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_band_rejected() {
        let points: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(
            slope_fit_points(&points, (100.0, 200.0)),
            Err(Error::EmptyBand { .. })
        ));
    }

    #[test]
    fn scaling_exact_inverse() {
        let points: Vec<(f64, f64)> = [1e3, 1e4, 1e5]
            .iter()
            .map(|&n| (n, 42.0 / n))
            .collect();
        let fit = scaling_fit(&points).unwrap();
        assert_relative_eq!(fit.exponent, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn scaling_constant_is_flat() {
        let points: Vec<(f64, f64)> = [1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&n| (n, 0.37))
            .collect();
        let fit = scaling_fit(&points).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
    }

    #[test]
    fn zero_points_dropped() {
        let points = vec![(1.0, 1.0), (2.0, 0.0), (4.0, 1.0 / 16.0), (8.0, 1.0 / 64.0), (16.0, 1.0 / 256.0)];
        let fit = slope_fit_points(&points, (0.5, 20.0)).unwrap();
        assert_relative_eq!(fit.exponent, -2.0, max_relative = 1e-12);
        assert_eq!(fit.points_used, 4);
    }
}
