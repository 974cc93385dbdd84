//! SRH1 rasters: a 64-byte ASCII header line
//! `SRH1 <rows> <cols> <channels> <nodata>` padded with spaces and ending in
//! `\n`, followed by row-major little-endian `f32` samples with channels
//! interleaved per pixel.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::raster::Grid;
use crate::scalar::Real;

pub const MAGIC: &str = "SRH1";
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RasterFile {
    pub rows: usize,
    pub cols: usize,
    pub channels: usize,
    /// Sentinel written for missing samples.
    pub nodata: f32,
    pub data: Vec<f32>,
}

fn header_line(rows: usize, cols: usize, channels: usize, nodata: f32) -> Result<Vec<u8>> {
    let text = format!("{MAGIC} {rows} {cols} {channels} {nodata}");
    if text.len() > HEADER_LEN - 1 {
        return Err(Error::Format(format!("header too long: {text}")));
    }
    let mut bytes = text.into_bytes();
    bytes.resize(HEADER_LEN - 1, b' ');
    bytes.push(b'\n');
    Ok(bytes)
}

impl RasterFile {
    pub fn encode(&self) -> Result<Vec<u8>> {
        if self.data.len() != self.rows * self.cols * self.channels {
            return Err(Error::Format("sample count does not match header".into()));
        }
        let mut out = header_line(self.rows, self.cols, self.channels, self.nodata)?;
        out.reserve(self.data.len() * 4);
        let nodata_nan = self.nodata.is_nan();
        for &v in &self.data {
            let v = if v.is_nan() && !nodata_nan { self.nodata } else { v };
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.encode()?)?;
        Ok(())
    }

    /// Parses a file. Samples equal to a non-NaN sentinel become NaN.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || bytes[HEADER_LEN - 1] != b'\n' {
            return Err(Error::Format("missing 64-byte SRH1 header".into()));
        }
        let header = std::str::from_utf8(&bytes[..HEADER_LEN - 1])
            .map_err(|_| Error::Format("header is not ASCII".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != MAGIC {
            return Err(Error::Format(format!("bad header: {:?}", header.trim_end())));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad header field {s:?}")))
        };
        let (rows, cols, channels) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
        let nodata: f32 = fields[4]
            .parse()
            .map_err(|_| Error::Format(format!("bad nodata value {:?}", fields[4])))?;
        let n = rows
            .checked_mul(cols)
            .and_then(|v| v.checked_mul(channels))
            .ok_or_else(|| Error::Format("raster dimensions overflow".into()))?;
        let body = &bytes[HEADER_LEN..];
        if body.len() != n * 4 {
            return Err(Error::Format(format!(
                "expected {} data bytes, found {}",
                n * 4,
                body.len()
            )));
        }
        let data = body
            .chunks_exact(4)
            .map(|b| {
                let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                if !nodata.is_nan() && v == nodata {
                    f32::NAN
                } else {
                    v
                }
            })
            .collect();
        Ok(Self {
            rows,
            cols,
            channels,
            nodata,
            data,
        })
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::decode(&bytes)
    }

    pub fn from_grid<T: Real>(grid: &Grid<T>) -> Self {
        Self {
            rows: grid.rows(),
            cols: grid.cols(),
            channels: 1,
            nodata: f32::NAN,
            data: grid.as_slice().iter().map(|v| v.as_f64() as f32).collect(),
        }
    }

    pub fn from_complex<T: Real>(grid: &Grid<Complex<T>>) -> Self {
        let mut data = Vec::with_capacity(grid.as_slice().len() * 2);
        for z in grid.as_slice() {
            data.push(z.re.as_f64() as f32);
            data.push(z.im.as_f64() as f32);
        }
        Self {
            rows: grid.rows(),
            cols: grid.cols(),
            channels: 2,
            nodata: f32::NAN,
            data,
        }
    }

    pub fn to_grid<T: Real>(&self) -> Result<Grid<T>> {
        if self.channels != 1 {
            return Err(Error::Format(format!("expected 1 channel, found {}", self.channels)));
        }
        Grid::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|&v| T::lit(v as f64)).collect(),
        )
    }

    pub fn to_complex<T: Real>(&self) -> Result<Grid<Complex<T>>> {
        if self.channels != 2 {
            return Err(Error::Format(format!("expected 2 channels, found {}", self.channels)));
        }
        Grid::from_vec(
            self.rows,
            self.cols,
            self.data
                .chunks_exact(2)
                .map(|c| Complex::new(T::lit(c[0] as f64), T::lit(c[1] as f64)))
                .collect(),
        )
    }
}
