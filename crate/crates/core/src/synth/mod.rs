//! Synthetic urban scenes: flat ground with box buildings, a straight
//! constant-velocity orbit and a simple intensity simulation, plus an
//! independent brute-force projection used to cross-check `geom`.

mod oracle;

pub use oracle::oracle_project;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::calib::SlcPatch;
use crate::dataset::{PixelRect, SplitConfig, DEFAULT_VALIDATION_FRACTION};
use crate::error::{Error, Result};
use crate::geom::{DemRaster, OrbitTrack, SensorStateSample, SlantRangeGrid, Vec3};
use crate::io::{KeyValues, SceneMetadata};
use crate::raster::Grid;

pub const MIN_INCIDENCE_DEG: f64 = 20.0;
pub const MAX_INCIDENCE_DEG: f64 = 55.0;
const PLACEMENT_ATTEMPTS: usize = 200;
/// Free cells kept between buildings and around the DEM border.
const BUILDING_GAP_CELLS: usize = 2;

/// Parameters of a synthetic scene. The slant-range grid, orbit and DEM
/// extent are derived from these.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub scene_id: String,
    pub seed: u64,
    pub n_az: usize,
    pub n_rg: usize,
    /// Slant-range pixel spacing (m).
    pub range_spacing: f64,
    /// Along-track pixel spacing (m).
    pub azimuth_spacing: f64,
    /// Incidence at the scene center (deg).
    pub incidence_angle: f64,
    /// Sensor height above the ground plane (m).
    pub sensor_altitude: f64,
    pub velocity: f64,
    /// DEM cell size (m).
    pub cell: f64,
    pub ground_height: f64,
    pub building_count: usize,
    /// Building heights above ground (m).
    pub height_range: (f64, f64),
    /// Building side lengths (m).
    pub footprint_range: (f64, f64),
    pub k_s: f64,
    /// Mean ground return (dB).
    pub clutter_db: f64,
    /// Extra return of steep sensor-facing surfaces (dB).
    pub facade_gain_db: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            scene_id: "synth".into(),
            seed: 0,
            n_az: 256,
            n_rg: 256,
            range_spacing: 1.2,
            azimuth_spacing: 1.2,
            incidence_angle: 35.0,
            sensor_altitude: 514.0e3,
            velocity: 7600.0,
            cell: 0.5,
            ground_height: 40.0,
            building_count: 12,
            height_range: (8.0, 60.0),
            footprint_range: (10.0, 40.0),
            k_s: 1.0e-4,
            clutter_db: -8.0,
            facade_gain_db: 8.0,
        }
    }
}

fn pair(kv: &KeyValues, key: &str, default: (f64, f64)) -> Result<(f64, f64)> {
    let v: Vec<f64> = kv.get_list(key)?;
    match v.as_slice() {
        [] => Ok(default),
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Format(format!("key `{key}` needs 2 values"))),
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(MIN_INCIDENCE_DEG..=MAX_INCIDENCE_DEG).contains(&self.incidence_angle) {
            return bad(format!(
                "incidence angle {} outside [{MIN_INCIDENCE_DEG}, {MAX_INCIDENCE_DEG}] deg",
                self.incidence_angle
            ));
        }
        if self.n_az < 2 || self.n_rg < 2 {
            return bad("grid needs at least 2x2 pixels".into());
        }
        for (name, v) in [
            ("range_spacing", self.range_spacing),
            ("azimuth_spacing", self.azimuth_spacing),
            ("velocity", self.velocity),
            ("cell", self.cell),
            ("k_s", self.k_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        let (h0, h1) = self.height_range;
        if !(self.ground_height >= 0.0 && h0 >= 0.0 && h1 >= h0 && h1.is_finite()) {
            return bad(format!(
                "heights must be >= 0 with min <= max (ground {}, range {h0}..{h1})",
                self.ground_height
            ));
        }
        let (f0, f1) = self.footprint_range;
        if !(f0 >= self.cell && f1 >= f0 && f1.is_finite()) {
            return bad(format!("footprint range {f0}..{f1} must be >= one cell and ordered"));
        }
        let swath = self.n_rg as f64 * self.range_spacing;
        if !(self.sensor_altitude > 10.0 * (swath + h1)) {
            return bad(format!(
                "sensor altitude {} too low for a {swath} m swath",
                self.sensor_altitude
            ));
        }
        Ok(())
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let d = Self::default();
        let seed: u64 = kv.get_or("seed", d.seed)?;
        let spec = Self {
            scene_id: kv.get_or("scene_id", format!("synth-{seed}"))?,
            seed,
            n_az: kv.get_or("n_az", d.n_az)?,
            n_rg: kv.get_or("n_rg", d.n_rg)?,
            range_spacing: kv.get_or("range_spacing", d.range_spacing)?,
            azimuth_spacing: kv.get_or("azimuth_spacing", d.azimuth_spacing)?,
            incidence_angle: kv.get_or("incidence_angle", d.incidence_angle)?,
            sensor_altitude: kv.get_or("sensor_altitude", d.sensor_altitude)?,
            velocity: kv.get_or("velocity", d.velocity)?,
            cell: kv.get_or("cell", d.cell)?,
            ground_height: kv.get_or("ground_height", d.ground_height)?,
            building_count: kv.get_or("building_count", d.building_count)?,
            height_range: pair(kv, "height_range", d.height_range)?,
            footprint_range: pair(kv, "footprint_range", d.footprint_range)?,
            k_s: kv.get_or("k_s", d.k_s)?,
            clutter_db: kv.get_or("clutter_db", d.clutter_db)?,
            facade_gain_db: kv.get_or("facade_gain_db", d.facade_gain_db)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.set("scene_id", &self.scene_id);
        kv.set("seed", self.seed);
        kv.set("n_az", self.n_az);
        kv.set("n_rg", self.n_rg);
        kv.set("range_spacing", self.range_spacing);
        kv.set("azimuth_spacing", self.azimuth_spacing);
        kv.set("incidence_angle", self.incidence_angle);
        kv.set("sensor_altitude", self.sensor_altitude);
        kv.set("velocity", self.velocity);
        kv.set("cell", self.cell);
        kv.set("ground_height", self.ground_height);
        kv.set("building_count", self.building_count);
        kv.set_list("height_range", [self.height_range.0, self.height_range.1]);
        kv.set_list("footprint_range", [self.footprint_range.0, self.footprint_range.1]);
        kv.set("k_s", self.k_s);
        kv.set("clutter_db", self.clutter_db);
        kv.set("facade_gain_db", self.facade_gain_db);
        kv
    }
}

/// Box building on DEM vertex indices, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Building {
    pub row0: usize,
    pub col0: usize,
    pub row1: usize,
    pub col1: usize,
    /// Height above ground (m).
    pub height: f64,
}

impl Building {
    fn overlaps(&self, other: &Building, gap: usize) -> bool {
        self.row0 <= other.row1 + gap
            && other.row0 <= self.row1 + gap
            && self.col0 <= other.col1 + gap
            && other.col0 <= self.col1 + gap
    }
}

/// Flight along +y at `x = −A·tanθ`, looking toward +x. Row `n_az/2` images
/// the plane `y = 0`, column `n_rg/2` the ground at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGeometry {
    pub grid: SlantRangeGrid<f64>,
    pub orbit: OrbitTrack<f64>,
    pub sensor_x: f64,
    pub sensor_z: f64,
    pub dem_origin: Vec3<f64>,
    pub dem_rows: usize,
    pub dem_cols: usize,
}

impl SceneGeometry {
    pub fn new(spec: &SceneSpec) -> Result<Self> {
        spec.validate()?;
        let theta = spec.incidence_angle.to_radians();
        let alt = spec.sensor_altitude;
        let sensor_x = -alt * theta.tan();
        let sensor_z = spec.ground_height + alt;
        let dt = spec.azimuth_spacing / spec.velocity;
        let half_az = (spec.n_az / 2) as f64;
        let r_center = alt / theta.cos();
        let grid = SlantRangeGrid {
            t0: -half_az * dt,
            dt,
            r_near: r_center - (spec.n_rg / 2) as f64 * spec.range_spacing,
            dr: spec.range_spacing,
            n_az: spec.n_az,
            n_rg: spec.n_rg,
        };
        grid.validate()?;

        let t_first = grid.t0;
        let t_last = grid.row_time(grid.n_az - 1);
        let knots = 5;
        let (ta, tb) = (t_first - 1.0, t_last + 1.0);
        let samples = (0..knots)
            .map(|k| {
                let t = ta + (tb - ta) * k as f64 / (knots - 1) as f64;
                SensorStateSample {
                    t,
                    position: Vec3::new(sensor_x, spec.velocity * t, sensor_z),
                    velocity: Vec3::new(0.0, spec.velocity, 0.0),
                }
            })
            .collect();
        let orbit = OrbitTrack::new(samples)?;

        let ground_x = |r: f64| sensor_x + (r * r - alt * alt).max(0.0).sqrt();
        let h_max = spec.height_range.1;
        let margin_x = h_max * theta.tan().max(1.0 / theta.tan()) + 4.0 * spec.cell;
        let x_min = ((ground_x(grid.r_near) - margin_x) / spec.cell).floor() * spec.cell;
        let x_max = ground_x(grid.r_far()) + margin_x;
        let margin_y = 4.0 * spec.cell + spec.azimuth_spacing;
        let y_lo = grid.t0 * spec.velocity;
        let y_hi = t_last * spec.velocity;
        let y_min = ((y_lo - margin_y) / spec.cell).floor() * spec.cell;
        let y_max = y_hi + margin_y;
        let dem_cols = ((x_max - x_min) / spec.cell).ceil() as usize + 1;
        let dem_rows = ((y_max - y_min) / spec.cell).ceil() as usize + 1;
        Ok(Self {
            grid,
            orbit,
            sensor_x,
            sensor_z,
            dem_origin: Vec3::new(x_min, y_min, 0.0),
            dem_rows,
            dem_cols,
        })
    }

    /// Ground-plane position imaged by row `row` (y) and the sensor there.
    pub fn row_y(&self, row: usize) -> f64 {
        self.orbit.samples()[0].velocity.y * self.grid.row_time(row)
    }
}

/// A generated scene with everything needed to write it to disk.
#[derive(Debug, Clone)]
pub struct Scene {
    pub spec: SceneSpec,
    pub geometry: SceneGeometry,
    pub buildings: Vec<Building>,
    pub dem: DemRaster<f64>,
    pub slc: SlcPatch<f64>,
    pub metadata: SceneMetadata,
}

/// Random non-overlapping buildings, deterministic in `spec.seed`.
pub fn place_buildings(spec: &SceneSpec, geometry: &SceneGeometry) -> Result<Vec<Building>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gap = BUILDING_GAP_CELLS;
    let (f0, f1) = spec.footprint_range;
    let (h0, h1) = spec.height_range;
    let mut out: Vec<Building> = Vec::with_capacity(spec.building_count);
    for index in 0..spec.building_count {
        let mut placed = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let w = (rng.random_range(f0..=f1) / spec.cell).round().max(1.0) as usize;
            let l = (rng.random_range(f0..=f1) / spec.cell).round().max(1.0) as usize;
            let height = if h1 > h0 { rng.random_range(h0..h1) } else { h0 };
            if w + 2 * gap >= geometry.dem_cols || l + 2 * gap >= geometry.dem_rows {
                continue;
            }
            let col0 = rng.random_range(gap..geometry.dem_cols - gap - w);
            let row0 = rng.random_range(gap..geometry.dem_rows - gap - l);
            let b = Building {
                row0,
                col0,
                row1: row0 + l,
                col1: col0 + w,
                height,
            };
            if out.iter().all(|o| !o.overlaps(&b, gap)) {
                placed = Some(b);
                break;
            }
        }
        match placed {
            Some(b) => out.push(b),
            None => {
                return Err(Error::Placement {
                    index,
                    attempts: PLACEMENT_ATTEMPTS,
                })
            }
        }
    }
    Ok(out)
}

pub fn rasterize_buildings(spec: &SceneSpec, geometry: &SceneGeometry, buildings: &[Building]) -> Result<DemRaster<f64>> {
    let mut heights = Grid::filled(geometry.dem_rows, geometry.dem_cols, spec.ground_height);
    for b in buildings {
        if b.row1 >= geometry.dem_rows || b.col1 >= geometry.dem_cols || b.height < 0.0 {
            return Err(Error::InvalidInput(format!("building {b:?} outside the DEM")));
        }
        for r in b.row0..=b.row1 {
            for v in &mut heights.row_mut(r)[b.col0..=b.col1] {
                *v = spec.ground_height + b.height;
            }
        }
    }
    DemRaster::new(geometry.dem_origin, spec.cell, heights)
}

/// Mean backscatter power per pixel before speckle, from a per-row profile
/// of the DEM traced in the x–z plane.
///
/// Each row's profile is sampled finer than `dr/64`; a sample contributes to
/// the nearest range bin when no earlier part of the profile rises above its
/// line of sight. The return per unit length scales with the cosine of the
/// local incidence, boosted on steep sensor-facing slopes. Pixels that
/// receive nothing are exactly zero.
pub fn simulate_power(spec: &SceneSpec, geometry: &SceneGeometry, dem: &DemRaster<f64>) -> Grid<f64> {
    let grid = &geometry.grid;
    let (sx, sz) = (geometry.sensor_x, geometry.sensor_z);
    let theta = spec.incidence_angle.to_radians();
    let flat_weight = grid.dr / theta.sin() * theta.cos();
    let clutter = 10f64.powf(spec.clutter_db / 10.0);
    let facade_gain = 10f64.powf(spec.facade_gain_db / 10.0);
    let step = grid.dr / 64.0;
    let cell = dem.cell;

    let mut power = Grid::filled(grid.n_az, grid.n_rg, 0.0);
    power
        .as_mut_slice()
        .par_chunks_mut(grid.n_rg)
        .enumerate()
        .for_each(|(row, out)| {
            let fy = (geometry.row_y(row) - dem.origin.y) / cell;
            let r0 = (fy.floor().max(0.0) as usize).min(dem.rows() - 2);
            let w = fy - r0 as f64;
            let profile: Vec<(f64, f64)> = (0..dem.cols())
                .map(|c| {
                    let z = dem.height(r0, c) * (1.0 - w) + dem.height(r0 + 1, c) * w;
                    (dem.origin.x + c as f64 * cell, dem.origin.z + z)
                })
                .collect();
            let slope = |x: f64, z: f64| (z - sz) / (x - sx);
            let mut horizon = f64::NEG_INFINITY;
            for seg in profile.windows(2) {
                let ((x0, z0), (x1, z1)) = (seg[0], seg[1]);
                horizon = horizon.max(slope(x0, z0));
                let (dx, dz) = (x1 - x0, z1 - z0);
                let len = dx.hypot(dz);
                let n = (len / step).ceil().max(1.0) as usize;
                let (nx, nz) = (-dz / len, dx / len);
                let gain = if dz > dx.abs() { facade_gain } else { 1.0 };
                for k in 0..n {
                    let f = (k as f64 + 0.5) / n as f64;
                    let (x, z) = (x0 + dx * f, z0 + dz * f);
                    let m = slope(x, z);
                    let visible = m >= horizon - 1e-12 * m.abs();
                    horizon = horizon.max(m);
                    if !visible {
                        continue;
                    }
                    let (lx, lz) = (x - sx, z - sz);
                    let r = lx.hypot(lz);
                    let cos_local = -(lx * nx + lz * nz) / r;
                    if cos_local <= 0.0 {
                        continue;
                    }
                    let col = ((r - grid.r_near) / grid.dr).round();
                    if col < 0.0 || col >= grid.n_rg as f64 {
                        continue;
                    }
                    out[col as usize] += len / n as f64 * cos_local * gain;
                }
            }
            for v in out.iter_mut() {
                *v *= clutter / flat_weight;
            }
        });
    power
}

/// Complex samples with unit-mean exponential speckle on `power` and uniform
/// phase, scaled so that `k_s·|u|²` is the speckled power.
pub fn speckle(power: &Grid<f64>, k_s: f64, seed: u64) -> Grid<Complex<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Grid::from_fn(power.rows(), power.cols(), |r, c| {
        let p = power.get(r, c);
        let e: f64 = rng.sample(Exp1);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        if p > 0.0 {
            Complex::from_polar((p * e / k_s).sqrt(), phase)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

/// Default test area: the last tenth of the azimuth rows.
pub fn default_test_rects(n_az: usize, n_rg: usize) -> Vec<PixelRect> {
    let h = (n_az / 10).max(1);
    vec![PixelRect {
        row: n_az - h,
        col: 0,
        height: h,
        width: n_rg,
    }]
}

/// Scene with the given buildings instead of random ones.
pub fn build_scene(spec: &SceneSpec, buildings: Vec<Building>) -> Result<Scene> {
    let geometry = SceneGeometry::new(spec)?;
    let dem = rasterize_buildings(spec, &geometry, &buildings)?;
    let power = simulate_power(spec, &geometry, &dem);
    let slc = SlcPatch::new(speckle(&power, spec.k_s, spec.seed), spec.k_s)?;
    let theta = spec.incidence_angle.to_radians();
    let metadata = SceneMetadata {
        scene_id: spec.scene_id.clone(),
        k_s: spec.k_s,
        grid: geometry.grid,
        orbit: geometry.orbit.clone(),
        up_hint: Vec3::new(0.0, 0.0, 1.0),
        dem_origin: dem.origin,
        dem_cell: dem.cell,
        pixel_spacing: (spec.azimuth_spacing, spec.range_spacing / theta.sin()),
        gsd: Vec::new(),
        split: SplitConfig {
            test_rects: default_test_rects(spec.n_az, spec.n_rg),
            validation_fraction: DEFAULT_VALIDATION_FRACTION,
        },
    };
    Ok(Scene {
        spec: spec.clone(),
        geometry,
        buildings,
        dem,
        slc,
        metadata,
    })
}

/// Deterministic scene from `spec.seed`.
pub fn gen_scene(spec: &SceneSpec) -> Result<Scene> {
    let geometry = SceneGeometry::new(spec)?;
    let buildings = place_buildings(spec, &geometry)?;
    build_scene(spec, buildings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SceneSpec {
        SceneSpec {
            seed,
            n_az: 48,
            n_rg: 64,
            building_count: 4,
            footprint_range: (6.0, 15.0),
            height_range: (5.0, 25.0),
            ..SceneSpec::default()
        }
    }

    #[test]
    fn no_buildings_gives_flat_dem() {
        let spec = SceneSpec {
            building_count: 0,
            ..small(3)
        };
        let s = gen_scene(&spec).unwrap();
        assert!(s.dem.heights.as_slice().iter().all(|&h| h == spec.ground_height));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = gen_scene(&small(9)).unwrap();
        let b = gen_scene(&small(9)).unwrap();
        assert_eq!(a.buildings, b.buildings);
        assert_eq!(a.dem, b.dem);
        let bits = |s: &Scene| -> Vec<u64> {
            s.slc
                .samples
                .as_slice()
                .iter()
                .flat_map(|c| [c.re.to_bits(), c.im.to_bits()])
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        let c = gen_scene(&small(10)).unwrap();
        assert_ne!(a.buildings, c.buildings);
    }

    #[test]
    fn buildings_keep_their_distance() {
        let s = gen_scene(&small(4)).unwrap();
        for (i, a) in s.buildings.iter().enumerate() {
            for b in &s.buildings[i + 1..] {
                assert!(!a.overlaps(b, BUILDING_GAP_CELLS));
            }
        }
    }

    #[test]
    fn crowded_scene_fails_placement() {
        let spec = SceneSpec {
            building_count: 500,
            footprint_range: (30.0, 40.0),
            ..small(1)
        };
        assert!(matches!(gen_scene(&spec), Err(Error::Placement { .. })));
    }

    #[test]
    fn spec_validation_and_roundtrip() {
        let spec = small(5);
        let back = SceneSpec::from_key_values(&spec.to_key_values()).unwrap();
        assert_eq!(back, spec);
        let kv = KeyValues::parse("incidence_angle = 60\n").unwrap();
        assert!(SceneSpec::from_key_values(&kv).is_err());
        let kv = KeyValues::parse("height_range = -1 5\n").unwrap();
        assert!(SceneSpec::from_key_values(&kv).is_err());
        let kv = KeyValues::parse("seed = 7\n").unwrap();
        let s = SceneSpec::from_key_values(&kv).unwrap();
        assert_eq!(s.scene_id, "synth-7");
        assert_eq!(s.n_az, 256);
    }

    #[test]
    fn flat_scene_power_is_the_clutter_level() {
        let spec = SceneSpec {
            building_count: 0,
            ..small(2)
        };
        let g = SceneGeometry::new(&spec).unwrap();
        let dem = rasterize_buildings(&spec, &g, &[]).unwrap();
        let p = simulate_power(&spec, &g, &dem);
        let clutter = 10f64.powf(spec.clutter_db / 10.0);
        for &v in p.as_slice() {
            assert!((v / clutter - 1.0).abs() < 0.03, "{v} vs {clutter}");
        }
    }
}
