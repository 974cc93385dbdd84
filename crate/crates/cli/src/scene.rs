//! Scene directory layout and file helpers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sarhp_core::io::{KeyValues, RasterFile, SceneMetadata};
use sarhp_core::{Dem, Grid};

pub const META: &str = "scene.meta";
pub const SPEC: &str = "spec.meta";
pub const DEM: &str = "dem.srh";
pub const SLC: &str = "slc.srh";
pub const HEIGHTS: &str = "heights.srh";
pub const HEIGHTS_ORACLE: &str = "heights_oracle.srh";
pub const INTENSITY: &str = "intensity.srh";
pub const DATASET: &str = "dataset";

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_key_values(path: &Path) -> Result<KeyValues> {
    KeyValues::parse(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_raster(path: &Path) -> Result<RasterFile> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    RasterFile::decode(&bytes).with_context(|| format!("decoding {}", path.display()))
}

pub fn read_grid(path: &Path) -> Result<Grid<f64>> {
    read_raster(path)?
        .to_grid()
        .with_context(|| format!("reading a single-channel raster from {}", path.display()))
}

pub fn write_raster(path: &Path, raster: &RasterFile) -> Result<()> {
    let bytes = raster
        .encode()
        .with_context(|| format!("encoding {}", path.display()))?;
    write_atomic(path, &bytes)
}

pub fn write_grid(path: &Path, grid: &Grid<f64>) -> Result<()> {
    write_raster(path, &RasterFile::from_grid(grid))
}

/// Metadata plus surface model of a scene directory.
pub struct SceneDir {
    pub dir: PathBuf,
    pub meta: SceneMetadata,
}

impl SceneDir {
    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join(META);
        let meta = SceneMetadata::from_key_values(&read_key_values(&path)?)
            .with_context(|| format!("validating {}", path.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            meta,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn dem(&self) -> Result<Dem> {
        let path = self.path(DEM);
        let heights = read_grid(&path)?;
        Dem::new(self.meta.dem_origin, self.meta.dem_cell, heights)
            .with_context(|| format!("building the surface model from {}", path.display()))
    }
}
