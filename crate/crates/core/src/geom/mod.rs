//! Forward projection of surface-model heights into slant-range geometry.

mod circle;
mod dem;
mod grid;
mod orbit;
mod plane;
mod project;
mod slice;
mod vec3;
mod visibility;

pub use circle::{
    circle_slice_intersections, pixel_height, segment_circle_intersections, CircleContact,
    IntersectionCandidate,
};
pub use dem::DemRaster;
pub use grid::SlantRangeGrid;
pub use orbit::{interpolate_sensor_state, OrbitTrack, SensorStateSample};
pub use plane::{segment_plane_intersection, segment_plane_parameter, zero_doppler_plane, PlaneBasis};
pub use project::{project_heights, project_slice, HeightRaster, Projection};
pub use slice::{slice_terrain, SliceVertex, TerrainSlice};
pub use vec3::Vec3;
pub use visibility::{visible, HorizonIndex, SELF_HIT_TOLERANCE};
