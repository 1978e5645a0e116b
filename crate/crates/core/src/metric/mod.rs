//! Exact curvature, volume and diameter of warped-product metrics, plus the
//! finite-difference oracle that checks the closed forms.

pub mod curvature;
pub mod diameter;
pub mod io;
pub mod model;
pub mod oracle;
pub mod profile;
pub mod spline;
pub mod volume;

pub use curvature::{min_scalar, scalar_curvature, scalar_curvature_doubly_warped, scalar_curvature_warped};
pub use diameter::{chain_diameter, diameter, DiameterBounds};
pub use model::{geodesic_sphere_data, AmbientModel, GeodesicSphereData, ModelKind};
pub use oracle::{finite_difference_scalar, CoordinateChartMetric};
pub use profile::{DoublyWarpProfile, GridSpec, PoleSide, Profile, WarpProfile};
pub use volume::{unit_sphere_volume, volume};
