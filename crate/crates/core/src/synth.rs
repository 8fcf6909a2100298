//! Synthetic band-limited test patterns and exact reference shifts,
//! used to exercise the registration chain against known ground truth.

use num_complex::Complex;

use crate::fft::{bin_frequency, Fft2};
use crate::grid::Grid2;
use crate::scalar::Real;

/// Gaussian-windowed fringe pattern: smooth, band-limited, and spectrally
/// compact, so circular-shift wraparound is negligible.
///
/// `envelope_frac` is the Gaussian radius as a fraction of the frame,
/// `fringe_period` the fringe spacing in pixels, `tilt` mixes a transverse
/// component into the fringe phase.
pub fn fringe_pattern<R: Real>(
    rows: usize,
    cols: usize,
    envelope_frac: f64,
    fringe_period: f64,
    tilt: f64,
) -> Grid2<R> {
    let sy = envelope_frac * rows as f64;
    let sx = envelope_frac * cols as f64;
    let k = 2.0 * std::f64::consts::PI / fringe_period;
    Grid2::from_fn(rows, cols, |r, c| {
        let y = r as f64 - (rows / 2) as f64;
        let x = c as f64 - (cols / 2) as f64;
        let env = (-(y * y) / (2.0 * sy * sy) - (x * x) / (2.0 * sx * sx)).exp();
        R::of(env * (1.0 + (k * (y + tilt * x)).cos()))
    })
}

/// Circular integer shift moving content by (+dy, +dx).
pub fn circular_shift<R: Real>(img: &Grid2<R>, dy: i64, dx: i64) -> Grid2<R> {
    let (rows, cols) = (img.rows() as i64, img.cols() as i64);
    Grid2::from_fn(img.rows(), img.cols(), |r, c| {
        let src_r = (r as i64 - dy).rem_euclid(rows) as usize;
        let src_c = (c as i64 - dx).rem_euclid(cols) as usize;
        *img.get(src_r, src_c)
    })
}

/// Exact band-limited subpixel shift via a Fourier-domain phase ramp:
/// the returned image equals the trigonometric interpolation of `img`
/// displaced by (+dy, +dx) pixels.
pub fn fourier_shift<R: Real>(img: &Grid2<R>, dy: f64, dx: f64) -> Grid2<R> {
    let (rows, cols) = (img.rows(), img.cols());
    let plans = Fft2::new(rows, cols);
    let mut spec = img.map(|&v| Complex::new(v, R::zero()));
    plans.forward(&mut spec);
    let two_pi = R::of(2.0) * R::PI();
    for r in 0..rows {
        let fr = bin_frequency::<R>(r, rows);
        for c in 0..cols {
            let fc = bin_frequency::<R>(c, cols);
            let phase = -two_pi * (fr * R::of(dy) + fc * R::of(dx));
            *spec.get_mut(r, c) *= Complex::from_polar(R::one(), phase);
        }
    }
    plans.inverse_normalized(&mut spec);
    spec.map(|c| c.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_shift_matches_circular_shift_on_integers() {
        let img: Grid2<f64> = fringe_pattern(32, 32, 0.2, 8.0, 0.1);
        let a = circular_shift(&img, 2, -1);
        let b = fourier_shift(&img, 2.0, -1.0);
        for (x, y) in a.as_slice().iter().zip(b.as_slice().iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn fourier_shift_composes() {
        // tight envelope: the edge (and hence Nyquist) content must be
        // negligible for the intermediate real-part truncation to commute
        let img: Grid2<f64> = fringe_pattern(64, 64, 0.1, 8.0, 0.0);
        let once = fourier_shift(&fourier_shift(&img, 0.3, 0.1), 0.2, -0.1);
        let direct = fourier_shift(&img, 0.5, 0.0);
        for (x, y) in once.as_slice().iter().zip(direct.as_slice().iter()) {
            assert!((x - y).abs() < 1e-6);
        }
    }
}
