//! False-color PNG previews; missing samples are drawn black.

use std::path::Path;

use anyhow::{Context, Result};
use image::{ImageFormat, Rgb, RgbImage};
use sarhp_core::Grid;

use crate::scene::write_atomic;

/// Dark blue → cyan → yellow → red.
const STOPS: [(f64, [f64; 3]); 4] = [
    (0.0, [20.0, 20.0, 120.0]),
    (0.35, [30.0, 190.0, 220.0]),
    (0.7, [250.0, 230.0, 60.0]),
    (1.0, [200.0, 30.0, 30.0]),
];

fn color(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0);
    let k = STOPS.iter().rposition(|s| s.0 <= t).unwrap_or(0).min(STOPS.len() - 2);
    let (t0, c0) = STOPS[k];
    let (t1, c1) = STOPS[k + 1];
    let f = (t - t0) / (t1 - t0);
    let ch = |i: usize| (c0[i] + (c1[i] - c0[i]) * f).round() as u8;
    Rgb([ch(0), ch(1), ch(2)])
}

pub fn render(grid: &Grid<f64>, lo: f64, hi: f64) -> RgbImage {
    let span = if hi > lo { hi - lo } else { 1.0 };
    RgbImage::from_fn(grid.cols() as u32, grid.rows() as u32, |x, y| {
        let v = grid.get(y as usize, x as usize);
        if v.is_nan() {
            Rgb([0, 0, 0])
        } else {
            color((v - lo) / span)
        }
    })
}

pub fn write_png(path: &Path, img: &RgbImage) -> Result<()> {
    let mut bytes = std::io::Cursor::new(Vec::new());
    img.write_to(&mut bytes, ImageFormat::Png)
        .with_context(|| format!("encoding {}", path.display()))?;
    write_atomic(path, bytes.get_ref())
}

/// Valid range of the samples, `(0, 1)` when there are none.
pub fn value_range(grid: &Grid<f64>) -> (f64, f64) {
    grid.valid_range().unwrap_or((0.0, 1.0))
}
