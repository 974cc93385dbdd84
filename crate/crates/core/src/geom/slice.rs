use crate::error::{Error, Result};
use crate::geom::{segment_plane_parameter, DemRaster, PlaneBasis, Vec3};
use crate::scalar::Real;

/// One crossing of a DEM grid line with a zero-Doppler plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceVertex<T> {
    /// In-plane horizontal coordinate (m), sensor at the origin.
    pub u: T,
    /// In-plane vertical coordinate (m).
    pub v: T,
    /// Height carried over from the DEM (m).
    pub h: T,
}

/// Polyline cut of the surface model on one zero-Doppler plane, sorted by `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainSlice<T> {
    pub vertices: Vec<SliceVertex<T>>,
    pub plane: PlaneBasis<T>,
}

impl<T: Real> TerrainSlice<T> {
    /// Builds a slice from arbitrary vertices: sorts by `u` and merges
    /// points closer than 1e-9 m.
    pub fn from_vertices(mut vertices: Vec<SliceVertex<T>>, plane: PlaneBasis<T>) -> Self {
        vertices.sort_by(|a, b| a.u.partial_cmp(&b.u).unwrap().then(a.v.partial_cmp(&b.v).unwrap()));
        let tol = T::lit(1e-9);
        let mut kept: Vec<SliceVertex<T>> = Vec::with_capacity(vertices.len());
        'outer: for p in vertices {
            for q in kept.iter().rev() {
                if p.u - q.u > tol {
                    break;
                }
                if (p.v - q.v).abs() <= tol {
                    continue 'outer;
                }
            }
            kept.push(p);
        }
        Self {
            vertices: kept,
            plane,
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = (SliceVertex<T>, SliceVertex<T>)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_usable(&self) -> bool {
        self.vertices.len() >= 2
    }
}

/// Intersects every DEM row and column polyline with `plane` and returns the
/// crossing points in plane coordinates. Heights at crossings are linear
/// between the segment's endpoint heights; segments with a missing endpoint
/// are skipped.
pub fn slice_terrain<T: Real>(plane: &PlaneBasis<T>, dem: &DemRaster<T>) -> Result<TerrainSlice<T>> {
    slice_terrain_within(plane, dem, dem.heights.valid_range())
}

/// [`slice_terrain`] with the DEM's valid height range computed by the caller.
pub(crate) fn slice_terrain_within<T: Real>(
    plane: &PlaneBasis<T>,
    dem: &DemRaster<T>,
    height_range: Option<(T, T)>,
) -> Result<TerrainSlice<T>> {
    let (rows, cols) = (dem.rows(), dem.cols());
    let Some((h_lo, h_hi)) = height_range else {
        return Err(Error::NoCoverage);
    };
    let h_reach = (dem.origin.z + h_lo).abs().max((dem.origin.z + h_hi).abs());
    let n = plane.normal;
    let base = n.dot(Vec3::new(dem.origin.x, dem.origin.y, T::zero()) - plane.origin);
    let mut out = Vec::new();

    let mut push = |p0: Vec3<T>, p1: Vec3<T>, h0: T, h1: T| {
        if let Some((p, t)) = segment_plane_parameter(p0, p1, plane) {
            let (u, v) = plane.to_plane(p);
            out.push(SliceVertex {
                u,
                v,
                h: h0 + (h1 - h0) * t,
            });
        }
    };

    // Along a grid line the signed distance is offset + k·step + n_z·z, so only
    // indices where |offset + k·step| <= |n_z|·max|z| + |step| can cross.
    let candidate_range = |offset: T, step: T, len: usize| -> (usize, usize) {
        if len < 2 {
            return (0, 0);
        }
        let reach = n.z.abs() * h_reach + step.abs();
        if step.abs() <= T::epsilon() * (offset.abs() + reach + T::one()) {
            // line parallel to the plane
            return if offset.abs() <= reach { (0, len - 1) } else { (0, 0) };
        }
        let a = (-offset - reach) / step;
        let b = (-offset + reach) / step;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let lo = (lo.floor() - T::one()).max(T::zero());
        let hi = (hi.ceil() + T::one()).min(T::from_usize_lossy(len - 1));
        if lo > hi {
            return (0, 0);
        }
        (lo.to_usize().unwrap_or(0), hi.to_usize().unwrap_or(0))
    };

    for r in 0..rows {
        let offset = base + n.y * dem.cell * T::from_usize_lossy(r);
        let (lo, hi) = candidate_range(offset, n.x * dem.cell, cols);
        for c in lo..hi {
            if let (Some(p0), Some(p1)) = (dem.vertex(r, c), dem.vertex(r, c + 1)) {
                push(p0, p1, dem.height(r, c), dem.height(r, c + 1));
            }
        }
    }
    for c in 0..cols {
        let offset = base + n.x * dem.cell * T::from_usize_lossy(c);
        let (lo, hi) = candidate_range(offset, n.y * dem.cell, rows);
        for r in lo..hi {
            if let (Some(p0), Some(p1)) = (dem.vertex(r, c), dem.vertex(r + 1, c)) {
                push(p0, p1, dem.height(r, c), dem.height(r + 1, c));
            }
        }
    }

    if out.is_empty() {
        return Err(Error::NoCoverage);
    }
    Ok(TerrainSlice::from_vertices(out, *plane))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{zero_doppler_plane, SensorStateSample};
    use crate::raster::Grid;

    fn plane_at(y: f64, velocity: Vec3<f64>) -> PlaneBasis<f64> {
        sensor_plane(Vec3::new(-300.0, y, 500.0), velocity)
    }

    fn sensor_plane(position: Vec3<f64>, velocity: Vec3<f64>) -> PlaneBasis<f64> {
        let state = SensorStateSample {
            t: 0.0,
            position,
            velocity,
        };
        zero_doppler_plane(&state, Vec3::new(0.0, 0.0, 1.0)).unwrap()
    }

    fn dem_from(rows: usize, cols: usize, f: impl Fn(f64, f64) -> f64) -> DemRaster<f64> {
        let heights = Grid::from_fn(rows, cols, |r, c| f(c as f64, r as f64));
        DemRaster::new(Vec3::zero(), 1.0, heights).unwrap()
    }

    #[test]
    fn flat_dem_gives_constant_heights() {
        let dem = dem_from(40, 50, |_, _| 50.0);
        for plane in [
            plane_at(17.3, Vec3::new(0.0, 7000.0, 0.0)),
            plane_at(20.0, Vec3::new(300.0, 7000.0, -20.0)),
            sensor_plane(Vec3::new(25.0, -300.0, 500.0), Vec3::new(7000.0, 10.0, 0.0)),
        ] {
            let s = slice_terrain(&plane, &dem).unwrap();
            assert!(s.vertices.len() >= 2);
            assert!(s.vertices.iter().all(|v| v.h == 50.0));
        }
    }

    #[test]
    fn row_aligned_plane_reproduces_row() {
        let dem = dem_from(20, 30, |x, y| (x * 0.37).sin() * 10.0 + y + 3.0);
        let plane = plane_at(7.0, Vec3::new(0.0, 7000.0, 0.0));
        let s = slice_terrain(&plane, &dem).unwrap();
        assert_eq!(s.vertices.len(), 30);
        for (c, v) in s.vertices.iter().enumerate() {
            assert_eq!(v.h, dem.height(7, c));
            assert!((v.u - (c as f64 + 300.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn tilted_ramp_is_linear_in_u() {
        // h = 0.3 x + 0.8 y + 2
        let dem = dem_from(40, 40, |x, y| 0.3 * x + 0.8 * y + 2.0);
        // passes through (20, 13.37) on the ground
        let plane = plane_at(13.37 + 320.0 * 900.0 / 7000.0, Vec3::new(900.0, 7000.0, 0.0));
        let s = slice_terrain(&plane, &dem).unwrap();
        assert!(s.vertices.len() > 40);
        for v in &s.vertices {
            let p = plane.from_plane(v.u, v.v);
            let ramp = 0.3 * p.x + 0.8 * p.y + 2.0;
            assert!((v.h - ramp).abs() < 1e-9, "{} vs {}", v.h, ramp);
            assert!(plane.signed_distance(p).abs() < 1e-6);
        }
        assert!(s.vertices.windows(2).all(|w| w[0].u <= w[1].u));
    }

    #[test]
    fn nodata_segments_are_skipped_and_empty_slice_errors() {
        let mut dem = dem_from(10, 10, |_, _| 5.0);
        for c in 0..10 {
            dem.heights.set(4, c, f64::NAN);
        }
        let plane = plane_at(2.5, Vec3::new(0.0, 7000.0, 0.0));
        let s = slice_terrain(&plane, &dem).unwrap();
        assert_eq!(s.vertices.len(), 10);
        let plane = plane_at(4.5, Vec3::new(0.0, 7000.0, 0.0));
        assert!(matches!(slice_terrain(&plane, &dem), Err(Error::NoCoverage)));
        let plane = plane_at(40.0, Vec3::new(0.0, 7000.0, 0.0));
        assert!(matches!(slice_terrain(&plane, &dem), Err(Error::NoCoverage)));
    }
}
