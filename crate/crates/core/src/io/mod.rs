//! File formats shared by the pipeline: the SRH1 raster container and
//! flat `key = value` metadata.

pub mod meta;
pub mod srh;

pub use meta::{KeyValues, SceneMetadata};
pub use srh::RasterFile;
