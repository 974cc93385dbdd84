//! Point clouds to 2.5D height rasters.

use crate::error::{Error, Result};
use crate::geom::{DemRaster, Vec3};
use crate::raster::Grid;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint<T> {
    pub x: T,
    pub y: T,
    /// Normal (geoid-referenced) height.
    pub h: T,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud<T> {
    pub points: Vec<CloudPoint<T>>,
}

/// Constant geoid undulation added to normal heights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoidShift<T> {
    undulation: T,
}

impl<T: Real> GeoidShift<T> {
    pub fn new(undulation: T) -> Result<Self> {
        if !(undulation.abs() < T::lit(120.0)) {
            return Err(Error::InvalidInput(format!(
                "geoid undulation {undulation} m outside (-120, 120)"
            )));
        }
        Ok(Self { undulation })
    }

    pub fn undulation(&self) -> T {
        self.undulation
    }
}

/// Raster footprint: lower-left corner, cell size and dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extent<T> {
    pub x_min: T,
    pub y_min: T,
    pub cols: usize,
    pub rows: usize,
}

impl<T: Real> Extent<T> {
    /// Smallest extent holding every point at the given cell size.
    pub fn covering(cloud: &PointCloud<T>, cell: T) -> Option<Self> {
        let first = cloud.points.first()?;
        let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
        for p in &cloud.points {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        let cols = ((x1 - x0) / cell).floor().to_usize()? + 1;
        let rows = ((y1 - y0) / cell).floor().to_usize()? + 1;
        Some(Self {
            x_min: x0,
            y_min: y0,
            cols,
            rows,
        })
    }
}

/// Grids the cloud keeping the highest point per cell; empty cells are NaN.
/// Points outside `extent` are ignored. The DEM vertex of cell (r, c) is the
/// cell center.
pub fn rasterize_max<T: Real>(
    cloud: &PointCloud<T>,
    cell: T,
    extent: Option<Extent<T>>,
) -> Result<DemRaster<T>> {
    if !(cell > T::zero()) {
        return Err(Error::InvalidInput(format!("cell size must be > 0, got {cell}")));
    }
    if cloud.points.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    if cloud
        .points
        .iter()
        .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.h.is_finite()))
    {
        return Err(Error::InvalidInput("point cloud has non-finite coordinates".into()));
    }
    let ext = match extent {
        Some(e) => e,
        None => Extent::covering(cloud, cell)
            .ok_or_else(|| Error::InvalidInput("point cloud extent too large".into()))?,
    };
    let mut heights: Grid<T> = Grid::nodata(ext.rows, ext.cols);
    for p in &cloud.points {
        let fc = ((p.x - ext.x_min) / cell).floor();
        let fr = ((p.y - ext.y_min) / cell).floor();
        if fc < T::zero() || fr < T::zero() {
            continue;
        }
        let (Some(c), Some(r)) = (fc.to_usize(), fr.to_usize()) else {
            continue;
        };
        if c >= ext.cols || r >= ext.rows {
            continue;
        }
        let cur = heights.get(r, c);
        if cur.is_nan() || p.h > cur {
            heights.set(r, c, p.h);
        }
    }
    let half = cell / T::lit(2.0);
    DemRaster::new(
        Vec3::new(ext.x_min + half, ext.y_min + half, T::zero()),
        cell,
        heights,
    )
}

/// k×k median over valid neighbors; missing cells stay missing. For an even
/// number of valid neighbors the lower of the two middle values is taken, so
/// the output is always one of the input values.
pub fn median_filter<T: Real>(dem: &DemRaster<T>, k: usize) -> Result<DemRaster<T>> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("median window must be odd and >= 3, got {k}")));
    }
    let half = k / 2;
    let src = &dem.heights;
    let (rows, cols) = src.shape();
    let mut window = Vec::with_capacity(k * k);
    let out = Grid::from_fn(rows, cols, |r, c| {
        let center = src.get(r, c);
        if center.is_nan() {
            return center;
        }
        window.clear();
        for rr in r.saturating_sub(half)..(r + half + 1).min(rows) {
            for cc in c.saturating_sub(half)..(c + half + 1).min(cols) {
                let v = src.get(rr, cc);
                if !v.is_nan() {
                    window.push(v);
                }
            }
        }
        window.sort_by(|a, b| a.partial_cmp(b).unwrap());
        window[(window.len() - 1) / 2]
    });
    DemRaster::new(dem.origin, dem.cell, out)
}

/// Normal to ellipsoidal heights.
pub fn to_ellipsoidal<T: Real>(dem: &DemRaster<T>, shift: GeoidShift<T>) -> DemRaster<T> {
    dem.map_heights(|h| h + shift.undulation())
}

/// Parses "x y h" lines; blank lines and `#` comments are skipped.
pub fn parse_point_cloud<T: Real>(text: &str) -> Result<PointCloud<T>> {
    let mut points = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("line {}: {e}", no + 1)))?;
        if vals.len() != 3 {
            return Err(Error::Format(format!(
                "line {}: expected 3 values, got {}",
                no + 1,
                vals.len()
            )));
        }
        points.push(CloudPoint {
            x: T::lit(vals[0]),
            y: T::lit(vals[1]),
            h: T::lit(vals[2]),
        });
    }
    Ok(PointCloud { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn dem(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> DemRaster<f64> {
        DemRaster::new(Vec3::zero(), 1.0, Grid::from_fn(rows, cols, f)).unwrap()
    }

    fn pt(x: f64, y: f64, h: f64) -> CloudPoint<f64> {
        CloudPoint { x, y, h }
    }

    #[test]
    fn singleton_cells_and_max() {
        let cloud = PointCloud {
            points: vec![pt(0.1, 0.1, 1.0), pt(1.2, 0.3, 2.0), pt(0.4, 1.6, 3.0), pt(1.9, 1.9, 4.0)],
        };
        let ext = Extent { x_min: 0.0, y_min: 0.0, cols: 2, rows: 2 };
        let d = rasterize_max(&cloud, 1.0, Some(ext)).unwrap();
        assert_eq!(d.heights.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.origin, Vec3::new(0.5, 0.5, 0.0));

        let cloud = PointCloud {
            points: vec![pt(0.2, 0.2, 2.0), pt(0.3, 0.1, 7.5), pt(0.4, 0.4, 3.1)],
        };
        let d = rasterize_max(&cloud, 0.5, None).unwrap();
        assert_eq!(d.heights.shape(), (1, 1));
        assert_eq!(d.height(0, 0), 7.5);
    }

    #[test]
    fn empty_cloud_is_an_error() {
        assert!(rasterize_max(&PointCloud::<f64>::default(), 0.5, None).is_err());
    }

    #[test]
    fn random_cloud_matches_grouping_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: Vec<_> = (0..10_000)
            .map(|_| pt(rng.random_range(0.0..40.0), rng.random_range(0.0..30.0), rng.random_range(-5.0..60.0)))
            .collect();
        let cloud = PointCloud { points: points.clone() };
        let ext = Extent { x_min: 0.0, y_min: 0.0, cols: 80, rows: 60 };
        let d = rasterize_max(&cloud, 0.5, Some(ext)).unwrap();
        let mut groups: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for p in &points {
            groups.entry(((p.y / 0.5) as usize, (p.x / 0.5) as usize)).or_default().push(p.h);
        }
        for r in 0..60 {
            for c in 0..80 {
                match groups.get_mut(&(r, c)) {
                    Some(v) => {
                        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                        assert_eq!(d.height(r, c), *v.last().unwrap());
                    }
                    None => assert!(d.height(r, c).is_nan()),
                }
            }
        }
    }

    #[test]
    fn median_removes_spike_and_keeps_constants() {
        let flat = dem(5, 5, |_, _| 5.0);
        assert_eq!(median_filter(&flat, 3).unwrap(), flat);
        let spiky = dem(5, 5, |r, c| if (r, c) == (2, 2) { 30.0 } else { 5.0 });
        assert_eq!(median_filter(&spiky, 3).unwrap().height(2, 2), 5.0);
        assert!(median_filter(&flat, 4).is_err());
        assert!(median_filter(&flat, 1).is_err());
    }

    #[test]
    fn median_preserves_nodata() {
        let d = dem(4, 4, |r, c| if r == c { f64::NAN } else { (r * 4 + c) as f64 });
        let m = median_filter(&d, 3).unwrap();
        for i in 0..4 {
            assert!(m.height(i, i).is_nan());
        }
        assert_eq!(m.heights.valid_count(), 12);
    }

    #[test]
    fn median_matches_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = dem(23, 17, |_, _| {
            if rng.random_bool(0.1) { f64::NAN } else { rng.random_range(0.0..100.0) }
        });
        for k in [3, 5] {
            let m = median_filter(&d, k).unwrap();
            let h = (k / 2) as isize;
            for r in 0..23isize {
                for c in 0..17isize {
                    if d.height(r as usize, c as usize).is_nan() {
                        continue;
                    }
                    let mut vals = Vec::new();
                    for dr in -h..=h {
                        for dc in -h..=h {
                            let (rr, cc) = (r + dr, c + dc);
                            if (0..23).contains(&rr) && (0..17).contains(&cc) {
                                let v = d.height(rr as usize, cc as usize);
                                if !v.is_nan() {
                                    vals.push(v);
                                }
                            }
                        }
                    }
                    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    assert_eq!(m.height(r as usize, c as usize), vals[(vals.len() - 1) / 2]);
                }
            }
        }
    }

    #[test]
    fn geoid_shift() {
        let d = dem(1, 2, |_, c| [10.0, 20.0][c]);
        let s = GeoidShift::new(46.5).unwrap();
        assert_eq!(to_ellipsoidal(&d, s).heights.as_slice(), &[56.5, 66.5]);
        assert_eq!(to_ellipsoidal(&d, GeoidShift::new(0.0).unwrap()), d);
        let back = to_ellipsoidal(&to_ellipsoidal(&d, s), GeoidShift::new(-46.5).unwrap());
        assert_eq!(back, d);
        assert!(GeoidShift::new(130.0).is_err());
    }

    #[test]
    fn parses_point_text() {
        let c: PointCloud<f64> = parse_point_cloud("# header\n1 2 3\n\n4.5 5 6 # trailing\n").unwrap();
        assert_eq!(c.points, vec![pt(1.0, 2.0, 3.0), pt(4.5, 5.0, 6.0)]);
        assert!(parse_point_cloud::<f64>("1 2\n").is_err());
        assert!(parse_point_cloud::<f64>("1 2 x\n").is_err());
    }

    fn arb_dem() -> impl Strategy<Value = DemRaster<f64>> {
        (3usize..9, 3usize..9).prop_flat_map(|(r, c)| {
            proptest::collection::vec(prop_oneof![9 => -50.0..150.0f64, 1 => Just(f64::NAN)], r * c)
                .prop_map(move |v| DemRaster::new(Vec3::zero(), 1.0, Grid::from_vec(r, c, v).unwrap()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rasterize_is_permutation_invariant(
            pts in proptest::collection::vec((0.0..10.0f64, 0.0..10.0f64, -10.0..50.0f64), 1..200),
            seed in any::<u64>(),
        ) {
            let cloud = PointCloud { points: pts.iter().map(|&(x, y, h)| pt(x, y, h)).collect() };
            let mut shuffled = cloud.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..shuffled.points.len()).rev() {
                shuffled.points.swap(i, rng.random_range(0..=i));
            }
            let ext = Extent { x_min: 0.0, y_min: 0.0, cols: 20, rows: 20 };
            let a = rasterize_max(&cloud, 0.5, Some(ext)).unwrap();
            let b = rasterize_max(&shuffled, 0.5, Some(ext)).unwrap();
            prop_assert_eq!(a.heights.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            b.heights.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }

        #[test]
        fn median_stays_within_neighborhood_and_commutes_with_shift(d in arb_dem(), und in -100.0..100.0f64) {
            let m = median_filter(&d, 3).unwrap();
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    let v = m.height(r, c);
                    if v.is_nan() { continue; }
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for rr in r.saturating_sub(1)..(r + 2).min(d.rows()) {
                        for cc in c.saturating_sub(1)..(c + 2).min(d.cols()) {
                            let x = d.height(rr, cc);
                            if !x.is_nan() { lo = lo.min(x); hi = hi.max(x); }
                        }
                    }
                    prop_assert!(v >= lo && v <= hi);
                }
            }
            let s = GeoidShift::new(und).unwrap();
            let a = median_filter(&to_ellipsoidal(&d, s), 3).unwrap();
            let b = to_ellipsoidal(&median_filter(&d, 3).unwrap(), s);
            prop_assert_eq!(a.heights.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            b.heights.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            let back = to_ellipsoidal(&to_ellipsoidal(&d, s), GeoidShift::new(-und).unwrap());
            for (x, y) in back.heights.as_slice().iter().zip(d.heights.as_slice()) {
                prop_assert!((x.is_nan() && y.is_nan()) || (x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }
    }
}
