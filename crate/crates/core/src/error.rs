use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} s outside orbit span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("degenerate plane basis: {0}")]
    DegenerateBasis(&'static str),
    #[error("zero-Doppler plane does not intersect the surface model")]
    NoCoverage,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("no valid pixels")]
    NoValidPixels,
    #[error("negative height {value} at pixel {index} (log metrics need heights >= 0)")]
    NegativeHeight { index: usize, value: f64 },
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("split produced an empty {which} set ({tiles} tiles, {rects} test rectangles)")]
    EmptySplit {
        which: &'static str,
        tiles: usize,
        rects: usize,
    },
    #[error("could not place building {index} without overlap after {attempts} attempts")]
    Placement { index: usize, attempts: usize },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
