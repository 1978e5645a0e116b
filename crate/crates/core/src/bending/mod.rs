//! The bending curve `γ(s) = (t(s), r(s))` and the neck hypersurface it sweeps out.

pub mod curve;
pub mod design;

pub use curve::{
    gauss_scalar_reconstruction, induce_sigma_metric, principal_curvatures_sigma, BendingCurve, CurveState,
};
pub use design::{
    curve_to_csv, design_bending_curve, horizontal_curve, vertical_curve, CurveDesign, CurveDesignParams, DesignReport,
    START_RADIUS_FACTOR,
};
