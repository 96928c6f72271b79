//! Parametric grids, analytic charts, ambient regions and sampled frames.

pub mod ambient;
pub mod chart;
pub mod field;
pub mod grid;
pub mod obj;

pub use ambient::AmbientRegion;
pub use chart::{ChartSample, ImmersionChart, V3};
pub use field::{
    contact_angle, contact_angle_deviation, point_geometry, sample_geometry, sample_geometry_with,
    BoundaryGeometry, GeometryField, NodeGeometry, NormalOrientation, SampleOptions, Tolerances,
};
pub use grid::{build_grid, Grid, GridSpec, RadialRule, Topology};
pub use obj::{to_obj, write_obj};
