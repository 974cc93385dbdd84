use crate::error::{Error, Result};
use crate::scalar::Real;

/// Timing and range layout of a slant-range image: rows are azimuth times,
/// columns are slant ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlantRangeGrid<T> {
    /// Azimuth time of row 0 (s).
    pub t0: T,
    /// Seconds per row.
    pub dt: T,
    /// Slant range of column 0 (m).
    pub r_near: T,
    /// Meters per column.
    pub dr: T,
    pub n_az: usize,
    pub n_rg: usize,
}

impl<T: Real> SlantRangeGrid<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dr > T::zero() && self.r_near > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "grid needs dt, dr, r_near > 0 (got {}, {}, {})",
                self.dt, self.dr, self.r_near
            )));
        }
        if self.n_az == 0 || self.n_rg == 0 {
            return Err(Error::InvalidInput("grid has zero rows or columns".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn row_time(&self, row: usize) -> T {
        self.t0 + self.dt * T::from_usize_lossy(row)
    }

    #[inline]
    pub fn range_of(&self, col: usize) -> T {
        self.r_near + self.dr * T::from_usize_lossy(col)
    }

    pub fn r_far(&self) -> T {
        self.range_of(self.n_rg - 1)
    }
}
