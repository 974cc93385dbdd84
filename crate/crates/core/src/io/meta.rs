//! Flat `key = value` text: one pair per line, `#` starts a comment, arrays
//! are whitespace-separated values.

use std::fmt::Display;
use std::str::FromStr;

use crate::dataset::{PixelRect, SplitConfig, DEFAULT_VALIDATION_FRACTION};
use crate::error::{Error, Result};
use crate::geom::{OrbitTrack, SensorStateSample, SlantRangeGrid, Vec3};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected `key = value`", no + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Format(format!("line {}: empty key", no + 1)));
            }
            if entries.iter().any(|(e, _)| e == k) {
                return Err(Error::Format(format!("line {}: duplicate key `{k}`", no + 1)));
            }
            entries.push((k.to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn set_list<V: Display>(&mut self, key: &str, values: impl IntoIterator<Item = V>) {
        let joined: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
        self.set(key, joined.join(" "));
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get<V: FromStr>(&self, key: &str) -> Result<V> {
        let raw = self
            .raw(key)
            .ok_or_else(|| Error::Format(format!("missing key `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::Format(format!("key `{key}`: cannot parse {raw:?}")))
    }

    pub fn get_or<V: FromStr>(&self, key: &str, default: V) -> Result<V> {
        if self.raw(key).is_some() {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    /// Whitespace-separated list; a missing key reads as empty.
    pub fn get_list<V: FromStr>(&self, key: &str) -> Result<Vec<V>> {
        let Some(raw) = self.raw(key) else {
            return Ok(Vec::new());
        };
        raw.split_whitespace()
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Format(format!("key `{key}`: cannot parse {s:?}")))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }
}

fn vec3_list(kv: &KeyValues, key: &str) -> Result<Vec<Vec3<f64>>> {
    let v: Vec<f64> = kv.get_list(key)?;
    if !v.len().is_multiple_of(3) {
        return Err(Error::Format(format!("key `{key}` needs triples, got {} values", v.len())));
    }
    Ok(v.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect())
}

fn one_vec3(kv: &KeyValues, key: &str) -> Result<Vec3<f64>> {
    match vec3_list(kv, key)?.as_slice() {
        [v] => Ok(*v),
        _ => Err(Error::Format(format!("key `{key}` needs exactly 3 values"))),
    }
}

/// Everything a scene directory records besides its rasters.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneMetadata {
    pub scene_id: String,
    pub k_s: f64,
    pub grid: SlantRangeGrid<f64>,
    pub orbit: OrbitTrack<f64>,
    pub up_hint: Vec3<f64>,
    pub dem_origin: Vec3<f64>,
    pub dem_cell: f64,
    /// Ground pixel spacing of the slant-range image (azimuth, range), m.
    pub pixel_spacing: (f64, f64),
    /// Resampling targets for dataset building; empty means native spacing.
    pub gsd: Vec<f64>,
    pub split: SplitConfig,
}

impl SceneMetadata {
    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.set("scene_id", &self.scene_id);
        kv.set("k_s", self.k_s);
        kv.set("grid_t0", self.grid.t0);
        kv.set("grid_dt", self.grid.dt);
        kv.set("grid_r_near", self.grid.r_near);
        kv.set("grid_dr", self.grid.dr);
        kv.set("grid_n_az", self.grid.n_az);
        kv.set("grid_n_rg", self.grid.n_rg);
        let s = self.orbit.samples();
        kv.set_list("orbit_t", s.iter().map(|x| x.t));
        kv.set_list(
            "orbit_pos",
            s.iter().flat_map(|x| [x.position.x, x.position.y, x.position.z]),
        );
        kv.set_list(
            "orbit_vel",
            s.iter().flat_map(|x| [x.velocity.x, x.velocity.y, x.velocity.z]),
        );
        kv.set_list("up_hint", [self.up_hint.x, self.up_hint.y, self.up_hint.z]);
        kv.set_list("dem_origin", [self.dem_origin.x, self.dem_origin.y, self.dem_origin.z]);
        kv.set("dem_cell", self.dem_cell);
        kv.set_list("pixel_spacing", [self.pixel_spacing.0, self.pixel_spacing.1]);
        kv.set_list("gsd", self.gsd.iter());
        kv.set_list(
            "test_rects",
            self.split
                .test_rects
                .iter()
                .flat_map(|r| [r.row, r.col, r.height, r.width]),
        );
        kv.set("validation_fraction", self.split.validation_fraction);
        kv
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let grid = SlantRangeGrid {
            t0: kv.get("grid_t0")?,
            dt: kv.get("grid_dt")?,
            r_near: kv.get("grid_r_near")?,
            dr: kv.get("grid_dr")?,
            n_az: kv.get("grid_n_az")?,
            n_rg: kv.get("grid_n_rg")?,
        };
        grid.validate()?;
        let times: Vec<f64> = kv.get_list("orbit_t")?;
        let pos = vec3_list(kv, "orbit_pos")?;
        let vel = vec3_list(kv, "orbit_vel")?;
        if pos.len() != times.len() || vel.len() != times.len() {
            return Err(Error::Format(format!(
                "orbit lists disagree: {} times, {} positions, {} velocities",
                times.len(),
                pos.len(),
                vel.len()
            )));
        }
        let orbit = OrbitTrack::new(
            times
                .iter()
                .zip(pos.iter().zip(&vel))
                .map(|(&t, (&position, &velocity))| SensorStateSample {
                    t,
                    position,
                    velocity,
                })
                .collect(),
        )?;
        for row in [0, grid.n_az - 1] {
            if !orbit.contains(grid.row_time(row)) {
                return Err(Error::Format(format!(
                    "row {row} time {} outside orbit span",
                    grid.row_time(row)
                )));
            }
        }
        let spacing: Vec<f64> = kv.get_list("pixel_spacing")?;
        let pixel_spacing = match spacing.as_slice() {
            [a, r] => (*a, *r),
            _ => return Err(Error::Format("key `pixel_spacing` needs 2 values".into())),
        };
        let rect_vals: Vec<usize> = kv.get_list("test_rects")?;
        if !rect_vals.len().is_multiple_of(4) {
            return Err(Error::Format("key `test_rects` needs groups of 4 values".into()));
        }
        let split = SplitConfig {
            test_rects: rect_vals
                .chunks_exact(4)
                .map(|c| PixelRect {
                    row: c[0],
                    col: c[1],
                    height: c[2],
                    width: c[3],
                })
                .collect(),
            validation_fraction: kv.get_or("validation_fraction", DEFAULT_VALIDATION_FRACTION)?,
        };
        split.validate(grid.n_az, grid.n_rg)?;
        Ok(Self {
            scene_id: kv.get_or("scene_id", "scene".to_string())?,
            k_s: kv.get("k_s")?,
            grid,
            orbit,
            up_hint: one_vec3(kv, "up_hint")?,
            dem_origin: one_vec3(kv, "dem_origin")?,
            dem_cell: kv.get("dem_cell")?,
            pixel_spacing,
            gsd: kv.get_list("gsd")?,
            split,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_and_rejects_duplicates() {
        let kv = KeyValues::parse("# c\na = 1.5\nb = 1 2 3 # tail\n\nname = x y\n").unwrap();
        assert_eq!(kv.get::<f64>("a").unwrap(), 1.5);
        assert_eq!(kv.get_list::<u32>("b").unwrap(), vec![1, 2, 3]);
        assert_eq!(kv.raw("name"), Some("x y"));
        assert!(kv.get::<f64>("missing").is_err());
        assert_eq!(kv.get_list::<f64>("missing").unwrap(), Vec::<f64>::new());
        assert!(KeyValues::parse("a = 1\na = 2\n").is_err());
        assert!(KeyValues::parse("novalue\n").is_err());
    }

    #[test]
    fn scene_metadata_roundtrips_exactly() {
        let orbit = OrbitTrack::new(vec![
            SensorStateSample { t: -1.0, position: Vec3::new(-1.0e5, -7600.0, 5.1e5), velocity: Vec3::new(0.0, 7600.0, 0.0) },
            SensorStateSample { t: 1.0 / 3.0, position: Vec3::new(-1.0e5, 2533.3333333333335, 5.1e5), velocity: Vec3::new(0.0, 7600.0, 0.0) },
        ])
        .unwrap();
        let m = SceneMetadata {
            scene_id: "s1".into(),
            k_s: 0.1,
            grid: SlantRangeGrid { t0: -0.01, dt: 1.0 / 7600.0, r_near: 6.1e5, dr: 1.2, n_az: 64, n_rg: 32 },
            orbit,
            up_hint: Vec3::new(0.0, 0.0, 1.0),
            dem_origin: Vec3::new(-300.5, -40.0, 0.0),
            dem_cell: 1.0,
            pixel_spacing: (1.0, 2.0),
            gsd: vec![1.0, 2.5],
            split: SplitConfig { test_rects: vec![PixelRect { row: 50, col: 0, height: 14, width: 32 }], validation_fraction: 0.15 },
        };
        let text = m.to_key_values().to_text();
        let back = SceneMetadata::from_key_values(&KeyValues::parse(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
