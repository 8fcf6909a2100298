//! Dense 2-D grids and detector-plane grid specifications.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense 2-D array.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid2<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{}x{} grid needs {} values, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }
}

impl<T> Grid2<T> {
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut T {
        &mut self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn same_shape<U>(&self, other: &Grid2<U>) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Grid2<U> {
        Grid2 {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Detector-plane sampling: `rows x cols` nodes at uniform `pitch`,
/// centered so that node (rows/2, cols/2) sits on the optical axis.
///
/// Rows run along the fringe (y) axis, columns along the transverse (x) axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<R> {
    pub rows: usize,
    pub cols: usize,
    pub pitch: R,
}

impl<R: Real> GridSpec<R> {
    pub fn new(rows: usize, cols: usize, pitch: R) -> Result<Self> {
        if rows < 2 || cols < 2 || pitch <= R::zero() {
            return Err(Error::InvalidArgument(format!(
                "grid spec {rows}x{cols} pitch {pitch} must be >= 2x2 with positive pitch"
            )));
        }
        Ok(Self { rows, cols, pitch })
    }

    /// y coordinate of row `r` (fringe axis).
    #[inline]
    pub fn y(&self, r: usize) -> R {
        (R::of(r as f64) - R::of((self.rows / 2) as f64)) * self.pitch
    }

    /// x coordinate of column `c` (transverse axis).
    #[inline]
    pub fn x(&self, c: usize) -> R {
        (R::of(c as f64) - R::of((self.cols / 2) as f64)) * self.pitch
    }

    /// Largest |coordinate| reachable on either axis.
    pub fn half_window(&self) -> R {
        let ry = R::of((self.rows / 2) as f64) * self.pitch;
        let rx = R::of((self.cols / 2) as f64) * self.pitch;
        ry.max(rx)
    }
}

/// Complex field sampled on a detector-plane grid.
#[derive(Debug, Clone)]
pub struct ComplexFieldGrid<R> {
    pub values: Grid2<Complex<R>>,
    pub spec: GridSpec<R>,
}

/// Nonnegative intensity sampled on a detector-plane grid
/// (photon-rate units, unnormalized).
#[derive(Debug, Clone)]
pub struct IntensityMap<R> {
    pub values: Grid2<R>,
    pub spec: GridSpec<R>,
}

impl<R: Real> IntensityMap<R> {
    pub fn total(&self) -> R {
        self.values.as_slice().iter().copied().sum()
    }

    /// Row sums along the transverse axis, as the normalized
    /// probability of a detected photon landing in each row.
    pub fn row_distribution(&self) -> Vec<R> {
        let total = self.total();
        (0..self.values.rows())
            .map(|r| self.values.row(r).iter().copied().sum::<R>() / total)
            .collect()
    }
}
