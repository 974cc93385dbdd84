//! Resampling, tiling, train/test splitting and flip augmentation of
//! co-registered intensity/height rasters.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::raster::Grid;
use crate::scalar::Real;

pub const DEFAULT_TILE_SIZE: usize = 256;
pub const DEFAULT_OVERLAP: f64 = 0.5;
pub const DEFAULT_VALIDATION_FRACTION: f64 = 0.15;

/// Where a tile came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub scene: String,
    pub row: usize,
    pub col: usize,
}

/// Co-registered intensity and height patches.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair<T> {
    pub intensity: Grid<T>,
    pub height: Grid<T>,
    pub provenance: Provenance,
}

/// Axis-aligned pixel rectangle, half-open: rows `[row, row + height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

impl PixelRect {
    pub fn intersects(&self, other: &PixelRect) -> bool {
        self.row < other.row + other.height
            && other.row < self.row + self.height
            && self.col < other.col + other.width
            && other.col < self.col + self.width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig {
    pub test_rects: Vec<PixelRect>,
    pub validation_fraction: f64,
}

impl SplitConfig {
    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::InvalidInput(format!(
                "validation fraction {} outside [0, 1)",
                self.validation_fraction
            )));
        }
        for r in &self.test_rects {
            if r.height == 0 || r.width == 0 || r.row + r.height > rows || r.col + r.width > cols {
                return Err(Error::InvalidInput(format!(
                    "test rectangle {r:?} outside the {rows}x{cols} image"
                )));
            }
        }
        Ok(())
    }
}

/// Bilinear resampling to a square output spacing of `target_gsd`.
///
/// `src_spacing` is (row spacing, column spacing) in meters. Output pixel
/// centers sit at `(i + ½)·gsd`. A missing value (NaN) among the taps with
/// non-zero weight makes the output pixel missing.
pub fn resample<T: Real>(src: &Grid<T>, src_spacing: (T, T), target_gsd: T) -> Result<Grid<T>> {
    let (sr, sc) = src_spacing;
    if !(sr > T::zero() && sc > T::zero() && target_gsd > T::zero()) {
        return Err(Error::InvalidInput("spacings must be > 0".into()));
    }
    let out_len = |n: usize, s: T| (T::from_usize_lossy(n) * s / target_gsd).floor().to_usize();
    let rows = out_len(src.rows(), sr).unwrap_or(0);
    let cols = out_len(src.cols(), sc).unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput(format!(
            "resampling to {target_gsd} m leaves an empty raster"
        )));
    }
    let half = T::lit(0.5);
    let taps = |i: usize, s: T, n: usize| -> (usize, usize, T) {
        let x = (T::from_usize_lossy(i) + half) * target_gsd / s - half;
        let x = x.max(T::zero()).min(T::from_usize_lossy(n - 1));
        let i0 = x.floor().to_usize().unwrap_or(0).min(n - 1);
        let i1 = (i0 + 1).min(n - 1);
        (i0, i1, x - T::from_usize_lossy(i0))
    };
    let row_taps: Vec<_> = (0..rows).map(|i| taps(i, sr, src.rows())).collect();
    let col_taps: Vec<_> = (0..cols).map(|j| taps(j, sc, src.cols())).collect();
    Ok(Grid::from_fn(rows, cols, |i, j| {
        let (r0, r1, fr) = row_taps[i];
        let (c0, c1, fc) = col_taps[j];
        let mut acc = T::zero();
        for (r, wr) in [(r0, T::one() - fr), (r1, fr)] {
            for (c, wc) in [(c0, T::one() - fc), (c1, fc)] {
                let w = wr * wc;
                if w > T::zero() {
                    let v = src.get(r, c);
                    if v.is_nan() {
                        return T::nan();
                    }
                    acc += w * v;
                }
            }
        }
        acc
    }))
}

/// Top-left offsets of all complete tiles along one axis.
pub fn tile_offsets(len: usize, size: usize, stride: usize) -> Vec<usize> {
    if len < size || stride == 0 {
        return Vec::new();
    }
    (0..=(len - size) / stride).map(|i| i * stride).collect()
}

/// Cuts co-registered rasters into `size × size` pairs with the given overlap;
/// trailing pixels that do not fill a tile are dropped.
pub fn tile<T: Real>(
    image: &Grid<T>,
    height_map: &Grid<T>,
    scene: &str,
    size: usize,
    overlap: f64,
) -> Result<Vec<SamplePair<T>>> {
    if image.shape() != height_map.shape() {
        return Err(Error::ShapeMismatch(image.shape(), height_map.shape()));
    }
    if !(0.0..1.0).contains(&overlap) || size == 0 {
        return Err(Error::InvalidInput(format!("bad tiling size {size} / overlap {overlap}")));
    }
    let stride = ((size as f64) * (1.0 - overlap)).round() as usize;
    if stride == 0 {
        return Err(Error::InvalidInput(format!("overlap {overlap} gives a zero stride")));
    }
    if image.rows() < size || image.cols() < size {
        return Err(Error::InvalidInput(format!(
            "image {}x{} smaller than one {size}x{size} tile",
            image.rows(),
            image.cols()
        )));
    }
    let mut out = Vec::new();
    for &row in &tile_offsets(image.rows(), size, stride) {
        for &col in &tile_offsets(image.cols(), size, stride) {
            out.push(SamplePair {
                intensity: image.window(row, col, size, size),
                height: height_map.window(row, col, size, size),
                provenance: Provenance {
                    scene: scene.to_string(),
                    row,
                    col,
                },
            });
        }
    }
    Ok(out)
}

/// Two disjoint sets of tiles, in input order.
pub type TileSplit<T> = (Vec<SamplePair<T>>, Vec<SamplePair<T>>);

/// A tile is test data iff its footprint intersects any test rectangle.
pub fn split<T: Real>(
    tiles: Vec<SamplePair<T>>,
    config: &SplitConfig,
) -> Result<TileSplit<T>> {
    let total = tiles.len();
    let (test, train): (Vec<_>, Vec<_>) = tiles.into_iter().partition(|t| {
        let fp = PixelRect {
            row: t.provenance.row,
            col: t.provenance.col,
            height: t.intensity.rows(),
            width: t.intensity.cols(),
        };
        config.test_rects.iter().any(|r| r.intersects(&fp))
    });
    for (set, which) in [(&train, "train"), (&test, "test")] {
        if set.is_empty() {
            return Err(Error::EmptySplit {
                which,
                tiles: total,
                rects: config.test_rects.len(),
            });
        }
    }
    Ok((train, test))
}

/// Moves `round(fraction·n)` training tiles, chosen by a seeded shuffle, into
/// a validation set. Both outputs keep the input order.
pub fn split_validation<T: Real>(
    train: Vec<SamplePair<T>>,
    fraction: f64,
    seed: u64,
) -> Result<TileSplit<T>> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidInput(format!("validation fraction {fraction} outside [0, 1)")));
    }
    let n = train.len();
    let n_val = ((n as f64) * fraction).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut is_val = vec![false; n];
    for &i in &order[..n_val] {
        is_val[i] = true;
    }
    let (val, train): (Vec<_>, Vec<_>) = train
        .into_iter()
        .zip(is_val)
        .partition(|(_, v)| *v);
    Ok((
        train.into_iter().map(|(t, _)| t).collect(),
        val.into_iter().map(|(t, _)| t).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flip {
    Identity,
    Horizontal,
    Vertical,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Flip chosen for draw `draw_index` of stream `seed`:
/// `splitmix64(seed ^ splitmix64(draw_index)) mod 3` → identity / horizontal / vertical.
pub fn flip_choice(seed: u64, draw_index: u64) -> Flip {
    match splitmix64(seed ^ splitmix64(draw_index)) % 3 {
        0 => Flip::Identity,
        1 => Flip::Horizontal,
        _ => Flip::Vertical,
    }
}

pub fn apply_flip<T: Real>(pair: &SamplePair<T>, flip: Flip) -> SamplePair<T> {
    let f = |g: &Grid<T>| match flip {
        Flip::Identity => g.clone(),
        Flip::Horizontal => g.flip_horizontal(),
        Flip::Vertical => g.flip_vertical(),
    };
    SamplePair {
        intensity: f(&pair.intensity),
        height: f(&pair.height),
        provenance: pair.provenance.clone(),
    }
}

/// Deterministic random mirroring applied identically to both members.
pub fn flip_augment<T: Real>(pair: &SamplePair<T>, seed: u64, draw_index: u64) -> SamplePair<T> {
    apply_flip(pair, flip_choice(seed, draw_index))
}
