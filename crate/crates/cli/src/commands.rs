use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use sarhp_core::calib::{clip_normalize, radar_brightness};
use sarhp_core::dataset::{resample, split, split_validation, tile, PixelRect, SamplePair, SplitConfig};
use sarhp_core::dsm::{median_filter, parse_point_cloud, rasterize_max, to_ellipsoidal, GeoidShift};
use sarhp_core::geom::project_heights;
use sarhp_core::io::{KeyValues, RasterFile};
use sarhp_core::metrics::evaluate;
use sarhp_core::synth::{gen_scene, oracle_project, SceneSpec};
use sarhp_core::{Grid, Slc};
use serde_json::json;

use crate::preview::{render, value_range, write_png};
use crate::scene::{self, read_grid, write_atomic, write_grid, write_raster, SceneDir};

pub fn synth(spec_path: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut kv = scene::read_key_values(spec_path)?;
    if let Some(seed) = seed {
        kv.set("seed", seed);
    }
    let spec = SceneSpec::from_key_values(&kv)
        .with_context(|| format!("validating {}", spec_path.display()))?;
    let s = gen_scene(&spec)?;
    write_grid(&out.join(scene::DEM), &s.dem.heights)?;
    write_raster(&out.join(scene::SLC), &RasterFile::from_complex(&s.slc.samples))?;
    write_atomic(&out.join(scene::SPEC), spec.to_key_values().to_text().as_bytes())?;
    write_atomic(&out.join(scene::META), s.metadata.to_key_values().to_text().as_bytes())?;
    println!(
        "scene {}: {}x{} pixels, {} buildings, surface model {}x{} at {} m",
        spec.scene_id,
        spec.n_az,
        spec.n_rg,
        s.buildings.len(),
        s.dem.rows(),
        s.dem.cols(),
        s.dem.cell
    );
    Ok(())
}

fn project_scene(scene: &SceneDir, oracle: bool) -> Result<Grid<f64>> {
    let dem = scene.dem()?;
    let m = &scene.meta;
    if oracle {
        return Ok(oracle_project(&m.grid, &m.orbit, &dem)?);
    }
    let p = project_heights(&m.grid, &m.orbit, &dem, m.up_hint)?;
    if p.uncovered_rows > 0 {
        println!("{} rows without surface-model coverage", p.uncovered_rows);
    }
    Ok(p.heights)
}

pub fn project(dir: &Path, oracle: bool, out: Option<PathBuf>) -> Result<()> {
    let scene = SceneDir::open(dir)?;
    let heights = project_scene(&scene, oracle)?;
    let name = if oracle { scene::HEIGHTS_ORACLE } else { scene::HEIGHTS };
    let out = out.unwrap_or_else(|| scene.path(name));
    write_grid(&out, &heights)?;
    println!(
        "wrote {} ({} of {} pixels valid)",
        out.display(),
        heights.valid_count(),
        heights.as_slice().len()
    );
    Ok(())
}

fn calibrate_scene(scene: &SceneDir) -> Result<Grid<f64>> {
    let path = scene.path(scene::SLC);
    let samples = scene::read_raster(&path)?
        .to_complex()
        .with_context(|| format!("reading complex samples from {}", path.display()))?;
    let slc = Slc::new(samples, scene.meta.k_s)?;
    Ok(clip_normalize(&radar_brightness(&slc)).values)
}

pub fn calibrate(dir: &Path, out: Option<PathBuf>) -> Result<()> {
    let scene = SceneDir::open(dir)?;
    let values = calibrate_scene(&scene)?;
    let out = out.unwrap_or_else(|| scene.path(scene::INTENSITY));
    write_grid(&out, &values)?;
    println!("wrote {}", out.display());
    Ok(())
}

pub struct DatasetArgs {
    pub heights: Option<PathBuf>,
    pub intensity: Option<PathBuf>,
    pub gsd: Option<f64>,
    pub tile_size: usize,
    pub overlap: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

/// Test rectangle expressed on the resampled raster: every output pixel
/// touching the source rectangle is included.
fn scale_rect(r: &PixelRect, spacing: (f64, f64), gsd: f64, shape: (usize, usize)) -> Option<PixelRect> {
    let (fr, fc) = (spacing.0 / gsd, spacing.1 / gsd);
    let row0 = ((r.row as f64 * fr).floor() as usize).min(shape.0);
    let row1 = (((r.row + r.height) as f64 * fr).ceil() as usize).min(shape.0);
    let col0 = ((r.col as f64 * fc).floor() as usize).min(shape.1);
    let col1 = (((r.col + r.width) as f64 * fc).ceil() as usize).min(shape.1);
    (row1 > row0 && col1 > col0).then_some(PixelRect {
        row: row0,
        col: col0,
        height: row1 - row0,
        width: col1 - col0,
    })
}

fn load_or(path: Option<PathBuf>, default: PathBuf, make: impl FnOnce() -> Result<Grid<f64>>) -> Result<Grid<f64>> {
    match path {
        Some(p) => read_grid(&p),
        None if default.exists() => read_grid(&default),
        None => {
            info!("{} missing, computing it", default.display());
            make()
        }
    }
}

pub fn make_dataset(dir: &Path, args: DatasetArgs) -> Result<()> {
    let scene = SceneDir::open(dir)?;
    let m = &scene.meta;
    let heights = load_or(args.heights, scene.path(scene::HEIGHTS), || project_scene(&scene, false))?;
    let intensity = load_or(args.intensity, scene.path(scene::INTENSITY), || calibrate_scene(&scene))?;
    if heights.shape() != intensity.shape() {
        bail!(
            "height raster {:?} and intensity raster {:?} differ in shape",
            heights.shape(),
            intensity.shape()
        );
    }
    let targets: Vec<Option<f64>> = match args.gsd {
        Some(g) => vec![Some(g)],
        None if !m.gsd.is_empty() => m.gsd.iter().map(|&g| Some(g)).collect(),
        None => vec![None],
    };
    let out = args.out.unwrap_or_else(|| scene.path(scene::DATASET));
    let mut entries = Vec::new();
    let mut counts = [0usize; 3];
    for gsd in targets {
        let (img, hgt, rects) = match gsd {
            None => (intensity.clone(), heights.clone(), m.split.test_rects.clone()),
            Some(g) => {
                let img = resample(&intensity, m.pixel_spacing, g)?;
                let hgt = resample(&heights, m.pixel_spacing, g)?;
                let rects = m
                    .split
                    .test_rects
                    .iter()
                    .filter_map(|r| scale_rect(r, m.pixel_spacing, g, img.shape()))
                    .collect();
                (img, hgt, rects)
            }
        };
        let tiles = tile(&img, &hgt, &m.scene_id, args.tile_size, args.overlap)?;
        let config = SplitConfig {
            test_rects: rects,
            validation_fraction: m.split.validation_fraction,
        };
        let (train, test) = split(tiles, &config)?;
        let (train, val) = split_validation(train, config.validation_fraction, args.seed)?;
        for (k, (label, set)) in [("train", train), ("val", val), ("test", test)].into_iter().enumerate() {
            for pair in set {
                let id = entries.len();
                entries.push(write_tile(&out, id, label, gsd, &pair)?);
                counts[k] += 1;
            }
        }
    }
    let manifest = json!({
        "format": "sarhp-tiles-1",
        "scene": m.scene_id,
        "tile_size": args.tile_size,
        "overlap": args.overlap,
        "seed": args.seed,
        "flip": {
            "rule": "splitmix64(seed ^ splitmix64(draw_index)) % 3",
            "values": ["identity", "horizontal", "vertical"],
        },
        "counts": {"train": counts[0], "val": counts[1], "test": counts[2]},
        "tiles": entries,
    });
    let path = out.join("manifest.json");
    write_atomic(&path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    println!(
        "wrote {} tiles ({} train, {} val, {} test) and {}",
        entries.len(),
        counts[0],
        counts[1],
        counts[2],
        path.display()
    );
    Ok(())
}

fn write_tile(out: &Path, id: usize, label: &str, gsd: Option<f64>, pair: &SamplePair<f64>) -> Result<serde_json::Value> {
    let intensity = format!("tiles/{id:05}_intensity.srh");
    let height = format!("tiles/{id:05}_height.srh");
    write_grid(&out.join(&intensity), &pair.intensity)?;
    write_grid(&out.join(&height), &pair.height)?;
    Ok(json!({
        "id": id,
        "split": label,
        "gsd": gsd,
        "row": pair.provenance.row,
        "col": pair.provenance.col,
        "intensity": intensity,
        "height": height,
    }))
}

pub fn eval(pred: &Path, reference: &Path, json_out: Option<PathBuf>, png: Option<PathBuf>) -> Result<()> {
    let p = read_grid(pred)?;
    let r = read_grid(reference)?;
    let report = evaluate(&r, &p)
        .with_context(|| format!("comparing {} against {}", pred.display(), reference.display()))?;
    print!("{}", report.to_text());
    if let Some(path) = json_out {
        write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    if let Some(dir) = png {
        let (lo, hi) = value_range(&r);
        write_png(&dir.join("reference.png"), &render(&r, lo, hi))?;
        write_png(&dir.join("prediction.png"), &render(&p, lo, hi))?;
        let err = Grid::from_fn(r.rows(), r.cols(), |i, j| (p.get(i, j) - r.get(i, j)).abs());
        let (_, emax) = value_range(&err);
        write_png(&dir.join("abs_error.png"), &render(&err, 0.0, emax))?;
    }
    Ok(())
}

pub struct DsmArgs {
    pub cell: f64,
    pub median: usize,
    pub undulation: f64,
}

pub fn dsm(cloud: &Path, out: &Path, args: DsmArgs) -> Result<()> {
    let points = parse_point_cloud::<f64>(&scene::read_text(cloud)?)
        .with_context(|| format!("parsing {}", cloud.display()))?;
    let mut dem = rasterize_max(&points, args.cell, None)?;
    if args.median > 1 {
        dem = median_filter(&dem, args.median)?;
    }
    let dem = to_ellipsoidal(&dem, GeoidShift::new(args.undulation)?);
    write_grid(out, &dem.heights)?;
    let mut kv = KeyValues::default();
    kv.set_list("dem_origin", [dem.origin.x, dem.origin.y, dem.origin.z]);
    kv.set("dem_cell", dem.cell);
    let sidecar = out.with_extension("meta");
    write_atomic(&sidecar, kv.to_text().as_bytes())?;
    println!(
        "wrote {} ({}x{}, {} valid cells) and {}",
        out.display(),
        dem.rows(),
        dem.cols(),
        dem.heights.valid_count(),
        sidecar.display()
    );
    Ok(())
}
