//! Slant-range height projection for SAR imagery, dataset preparation for
//! single-image height estimation, and height-map evaluation metrics.
//!
//! The numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the pipeline uses.

// `!(x > 0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calib;
pub mod dataset;
pub mod dsm;
pub mod error;
pub mod geom;
pub mod io;
pub mod metrics;
pub mod raster;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use raster::Grid;
pub use scalar::Real;

pub type Vec3d = geom::Vec3<f64>;
pub type SensorState = geom::SensorStateSample<f64>;
pub type Orbit = geom::OrbitTrack<f64>;
pub type RangeGrid = geom::SlantRangeGrid<f64>;
pub type Dem = geom::DemRaster<f64>;
pub type Plane = geom::PlaneBasis<f64>;
pub type Slice = geom::TerrainSlice<f64>;
pub type Heights = geom::HeightRaster<f64>;
pub type Raster = Grid<f64>;
pub type Slc = calib::SlcPatch<f64>;
pub type Intensity = calib::IntensityPatch<f64>;
pub type Report = metrics::MetricReport<f64>;
pub type Pair = dataset::SamplePair<f64>;
