use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::raster::Grid;
use crate::scalar::Real;

/// 2.5D height map on a regular grid in a local Cartesian frame.
///
/// Vertex `(row, col)` sits at `origin + (col·cell, row·cell, height)`:
/// columns run along +x, rows along +y, heights along +z. Missing heights are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct DemRaster<T> {
    pub origin: Vec3<T>,
    pub cell: T,
    pub heights: Grid<T>,
}

impl<T: Real> DemRaster<T> {
    pub fn new(origin: Vec3<T>, cell: T, heights: Grid<T>) -> Result<Self> {
        if !(cell > T::zero()) {
            return Err(Error::InvalidInput(format!("DEM cell size must be > 0, got {cell}")));
        }
        if heights.as_slice().iter().any(|h| h.is_infinite()) {
            return Err(Error::InvalidInput("DEM contains infinite heights".into()));
        }
        Ok(Self {
            origin,
            cell,
            heights,
        })
    }

    pub fn rows(&self) -> usize {
        self.heights.rows()
    }

    pub fn cols(&self) -> usize {
        self.heights.cols()
    }

    #[inline]
    pub fn height(&self, row: usize, col: usize) -> T {
        self.heights.get(row, col)
    }

    /// 3D position of a vertex, `None` when its height is missing.
    #[inline]
    pub fn vertex(&self, row: usize, col: usize) -> Option<Vec3<T>> {
        let h = self.height(row, col);
        if h.is_nan() {
            return None;
        }
        Some(Vec3::new(
            self.origin.x + self.cell * T::from_usize_lossy(col),
            self.origin.y + self.cell * T::from_usize_lossy(row),
            self.origin.z + h,
        ))
    }

    pub fn map_heights(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            origin: self.origin,
            cell: self.cell,
            heights: self.heights.map(|h| if h.is_nan() { h } else { f(h) }),
        }
    }
}
