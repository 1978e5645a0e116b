//! Glued manifolds: necks, collars, caps, tunnels and surgeries.

pub mod cap;
pub mod homotopy;
pub mod piece;
pub mod surgery;
pub mod tunnel;

pub use cap::{cap_piece, cap_piece_with_radius};
pub use homotopy::{
    boundary_homotopy, boundary_homotopy_to, choose_stretch, collar_metric, stretch_search, CollarSpec, MetricPath,
    PathShape,
};
pub use piece::{
    profile_port, Assembly, BoundaryInterface, Factor, FactorJet, Geometry, InterfaceKind, Junction, ModelRegion,
    Piece, PortRef, Provenance, Role,
};
pub use surgery::{
    body_minus_tube, model_volume, perform_surgery, punctured_body, surgery_handle, SurgeryHandle, SurgeryReport,
};
pub use tunnel::{build_tunnel, build_tunnel_with, tunnel_pieces, Tunnel, TunnelEnd, TunnelParams, TunnelReport};
