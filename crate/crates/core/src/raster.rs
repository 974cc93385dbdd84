//! Row-major 2D rasters. Missing values in real-valued rasters are stored as NaN.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Grid<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "raster data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> E {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: E) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[E] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [E] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [E] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<E> {
        self.data
    }

    pub fn map<F: Copy>(&self, f: impl Fn(E) -> F) -> Grid<F> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Copy of the window starting at (`row`, `col`).
    pub fn window(&self, row: usize, col: usize, rows: usize, cols: usize) -> Grid<E> {
        assert!(row + rows <= self.rows && col + cols <= self.cols);
        Grid::from_fn(rows, cols, |r, c| self.get(row + r, col + c))
    }

    pub fn flip_horizontal(&self) -> Grid<E> {
        Grid::from_fn(self.rows, self.cols, |r, c| self.get(r, self.cols - 1 - c))
    }

    pub fn flip_vertical(&self) -> Grid<E> {
        Grid::from_fn(self.rows, self.cols, |r, c| self.get(self.rows - 1 - r, c))
    }
}

impl<T: Real> Grid<T> {
    #[inline]
    pub fn is_valid_at(&self, row: usize, col: usize) -> bool {
        !self.get(row, col).is_nan()
    }

    pub fn nodata(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, T::nan())
    }

    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|v| !v.is_nan()).count()
    }

    /// Min and max over valid cells.
    pub fn valid_range(&self) -> Option<(T, T)> {
        let mut it = self.data.iter().copied().filter(|v| !v.is_nan());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flips_are_involutions() {
        let g = Grid::from_fn(3, 4, |r, c| (r * 4 + c) as f64);
        assert_eq!(g.flip_horizontal().flip_horizontal(), g);
        assert_eq!(g.flip_vertical().flip_vertical(), g);
        assert_eq!(g.flip_horizontal().get(0, 0), 3.0);
        assert_eq!(g.flip_vertical().get(0, 0), 8.0);
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(Grid::from_vec(2, 2, vec![0.0f32; 3]).is_err());
    }

    #[test]
    fn valid_range_skips_nan() {
        let g = Grid::from_vec(1, 3, vec![f64::NAN, 2.0, -1.0]).unwrap();
        assert_eq!(g.valid_range(), Some((-1.0, 2.0)));
        assert_eq!(g.valid_count(), 2);
    }
}
