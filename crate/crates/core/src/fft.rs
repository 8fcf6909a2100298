//! Thin wrappers over rustfft for 1-D and row-major 2-D transforms.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid2;
use crate::scalar::Real;

pub(crate) fn fft_forward<R: Real>(data: &mut [Complex<R>]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(data.len()).process(data);
}

pub(crate) fn fft_inverse_normalized<R: Real>(data: &mut [Complex<R>]) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(data);
    let scale = R::of(1.0 / n as f64);
    for v in data.iter_mut() {
        *v = v.scale(scale);
    }
}

/// Plans for repeated 2-D transforms of one shape.
pub(crate) struct Fft2<R: Real> {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<R>>,
    col_fwd: Arc<dyn Fft<R>>,
    row_inv: Arc<dyn Fft<R>>,
    col_inv: Arc<dyn Fft<R>>,
}

impl<R: Real> Fft2<R> {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            col_fwd: planner.plan_fft_forward(rows),
            row_inv: planner.plan_fft_inverse(cols),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    fn transform(&self, grid: &mut Grid2<Complex<R>>, forward: bool) {
        assert_eq!(grid.rows(), self.rows);
        assert_eq!(grid.cols(), self.cols);
        let (rows, cols) = (self.rows, self.cols);
        let row_plan = if forward { &self.row_fwd } else { &self.row_inv };
        let col_plan = if forward { &self.col_fwd } else { &self.col_inv };
        for r in 0..rows {
            row_plan.process(&mut grid.as_mut_slice()[r * cols..(r + 1) * cols]);
        }
        let mut column = vec![Complex::new(R::zero(), R::zero()); rows];
        for c in 0..cols {
            for r in 0..rows {
                column[r] = *grid.get(r, c);
            }
            col_plan.process(&mut column);
            for r in 0..rows {
                *grid.get_mut(r, c) = column[r];
            }
        }
    }

    pub fn forward(&self, grid: &mut Grid2<Complex<R>>) {
        self.transform(grid, true);
    }

    pub fn inverse_normalized(&self, grid: &mut Grid2<Complex<R>>) {
        self.transform(grid, false);
        let scale = R::of(1.0 / (self.rows * self.cols) as f64);
        for v in grid.as_mut_slice() {
            *v = v.scale(scale);
        }
    }
}

/// FFT bin frequency in cycles per sample, the usual wrap-around layout.
#[inline]
pub(crate) fn bin_frequency<R: Real>(k: usize, n: usize) -> R {
    let signed = if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    };
    R::of(signed / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn roundtrip_1d() {
        let mut data: Vec<Complex<f64>> = (0..64)
            .map(|i| Complex::new((i as f64 * 0.3).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = data.clone();
        fft_forward(&mut data);
        fft_inverse_normalized(&mut data);
        for (a, b) in data.iter().zip(orig.iter()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn roundtrip_2d() {
        let plans = Fft2::<f64>::new(8, 16);
        let mut g = Grid2::from_fn(8, 16, |r, c| {
            Complex::new((r * 16 + c) as f64, (r as f64) - (c as f64))
        });
        let orig = g.clone();
        plans.forward(&mut g);
        plans.inverse_normalized(&mut g);
        for (a, b) in g.as_slice().iter().zip(orig.as_slice().iter()) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-10);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn bin_frequencies_wrap() {
        assert_eq!(bin_frequency::<f64>(0, 8), 0.0);
        assert_eq!(bin_frequency::<f64>(1, 8), 0.125);
        assert_eq!(bin_frequency::<f64>(4, 8), 0.5);
        assert_eq!(bin_frequency::<f64>(5, 8), -0.375);
        assert_eq!(bin_frequency::<f64>(7, 8), -0.125);
    }
}
