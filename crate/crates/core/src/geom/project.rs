use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::circle::lerp_height;
use crate::geom::slice::slice_terrain_within;
use crate::geom::{
    interpolate_sensor_state, segment_circle_intersections, zero_doppler_plane,
    DemRaster, HorizonIndex, OrbitTrack, SlantRangeGrid, TerrainSlice, Vec3,
};
use crate::raster::Grid;
use crate::scalar::Real;

/// Heights in slant-range geometry (`n_az × n_rg`, NaN = no visible terrain).
pub type HeightRaster<T> = Grid<T>;

#[derive(Debug, Clone)]
pub struct Projection<T> {
    pub heights: HeightRaster<T>,
    /// Rows whose zero-Doppler plane missed the surface model entirely.
    pub uncovered_rows: usize,
}

/// Fills one output row: every slice segment is visited once and only the
/// range columns between its nearest and farthest point are tested.
pub fn project_slice<T: Real>(slice: &TerrainSlice<T>, grid: &SlantRangeGrid<T>, out: &mut [T]) {
    debug_assert_eq!(out.len(), grid.n_rg);
    out.fill(T::nan());
    if !slice.is_usable() {
        return;
    }
    let horizon = HorizonIndex::new(slice);
    let last = T::from_usize_lossy(grid.n_rg - 1);
    let pad = T::lit(1e-6);
    for (a, b) in slice.segments() {
        let (du, dv) = (b.u - a.u, b.v - a.v);
        let len2 = du * du + dv * dv;
        if !(len2 > T::zero()) {
            continue;
        }
        let s_near = (-(a.u * du + a.v * dv) / len2).max(T::zero()).min(T::one());
        let (nu, nv) = (a.u + du * s_near, a.v + dv * s_near);
        let r_min = (nu * nu + nv * nv).sqrt();
        let r_max = (a.u * a.u + a.v * a.v).sqrt().max((b.u * b.u + b.v * b.v).sqrt());
        let c_lo = ((r_min - grid.r_near) / grid.dr - pad).ceil().max(T::zero());
        let c_hi = ((r_max - grid.r_near) / grid.dr + pad).floor().min(last);
        if c_lo > c_hi {
            continue;
        }
        let (c_lo, c_hi) = (c_lo.to_usize().unwrap_or(0), c_hi.to_usize().unwrap_or(0));
        for (c, slot) in out.iter_mut().enumerate().take(c_hi + 1).skip(c_lo) {
            let r = grid.range_of(c);
            segment_circle_intersections((a.u, a.v), (b.u, b.v), r, |u, v, s| {
                if horizon.is_visible(u, v) {
                    let h = lerp_height(&a, &b, s);
                    if slot.is_nan() || h > *slot {
                        *slot = h;
                    }
                }
            });
        }
    }
}

/// Projects DEM heights into the slant-range grid: per azimuth row the sensor
/// state is interpolated, its zero-Doppler plane slices the DEM, and each range
/// column keeps the largest visible height on its range circle.
///
/// Rows are independent and processed in parallel on the current rayon pool;
/// the result does not depend on the number of threads.
pub fn project_heights<T: Real>(
    grid: &SlantRangeGrid<T>,
    track: &OrbitTrack<T>,
    dem: &DemRaster<T>,
    up_hint: Vec3<T>,
) -> Result<Projection<T>> {
    grid.validate()?;
    for row in [0, grid.n_az - 1] {
        let t = grid.row_time(row);
        if !track.contains(t) {
            return Err(Error::OutOfRange {
                t: t.as_f64(),
                start: track.start().as_f64(),
                end: track.end().as_f64(),
            });
        }
    }
    let height_range = dem.heights.valid_range();
    let mut heights = Grid::nodata(grid.n_az, grid.n_rg);
    let uncovered: Result<Vec<bool>> = heights
        .as_mut_slice()
        .par_chunks_mut(grid.n_rg)
        .enumerate()
        .map(|(row, out)| {
            let state = interpolate_sensor_state(track, grid.row_time(row))?;
            let plane = zero_doppler_plane(&state, up_hint)?;
            match slice_terrain_within(&plane, dem, height_range) {
                Ok(slice) => {
                    project_slice(&slice, grid, out);
                    Ok(false)
                }
                Err(Error::NoCoverage) => Ok(true),
                Err(e) => Err(e),
            }
        })
        .collect();
    let uncovered_rows = uncovered?.into_iter().filter(|&u| u).count();
    if uncovered_rows > 0 {
        warn!("{uncovered_rows} azimuth rows have no DEM coverage");
    }
    Ok(Projection {
        heights,
        uncovered_rows,
    })
}
