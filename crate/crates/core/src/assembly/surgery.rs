//! Surgery on `S^p × B^q` in a model manifold, `q ≥ 3`.
//!
//! The result is the chain `(M ∖ T) + Σ + collar + D^{p+1} × S^{q-1}`.

use serde::{Deserialize, Serialize};

use super::cap::cap_piece_with_radius;
use super::homotopy::{boundary_homotopy, stretch_search};
use super::piece::{Assembly, Piece, PortRef, Provenance, Role};
use crate::bending::{design_bending_curve, induce_sigma_metric, CurveDesignParams, DesignReport, START_RADIUS_FACTOR};
use crate::error::{NeckError, Result};
use crate::metric::model::{AmbientModel, ModelKind};
use crate::metric::profile::{DoublyWarpProfile, GridSpec, Profile, WarpProfile};
use crate::metric::volume::unit_sphere_volume;

fn round_jet(rho: f64, s: f64) -> (f64, f64, f64) {
    let (sn, cs) = (s / rho).sin_cos();
    (rho * sn, cs, -sn / rho)
}

fn cos_jet(rho: f64, s: f64) -> (f64, f64, f64) {
    let (sn, cs) = (s / rho).sin_cos();
    (rho * cs, -sn, -cs / rho)
}

/// Closed-form volume of the closed model manifold.
pub fn model_volume(model: &AmbientModel) -> Result<f64> {
    match model.kind {
        ModelKind::RoundSphereBall { radius } | ModelKind::GreatSphereTube { radius } => {
            Ok(unit_sphere_volume(model.n) * radius.powi(model.n as i32))
        }
        ModelKind::ProductOfRounds { rho_p, fiber_radius } => Ok(unit_sphere_volume(model.p)
            * rho_p.powi(model.p as i32)
            * unit_sphere_volume(model.q)
            * fiber_radius.powi(model.q as i32)),
        ModelKind::EuclideanProduct { .. } => Err(NeckError::InvalidParameter(
            "a Euclidean model has no finite volume; use a compact body".into(),
        )),
    }
}

/// `M` minus the open tube of radius `r0` around the core, from the far
/// side (where a factor closes up) to the tube boundary.
pub fn body_minus_tube(model: &AmbientModel, r0: f64, grid: &GridSpec) -> Result<Profile> {
    model.validate()?;
    model.check_radius(r0)?;
    let (p, q, n) = (model.p, model.q, model.n);
    match model.kind {
        ModelKind::RoundSphereBall { radius } => {
            let len = std::f64::consts::PI * radius - r0;
            Ok(WarpProfile::from_fn(grid.uniform(len), n - 1, |s| round_jet(radius, s))?.into())
        }
        ModelKind::ProductOfRounds { rho_p, fiber_radius } => {
            let len = std::f64::consts::PI * fiber_radius - r0;
            Ok(DoublyWarpProfile::from_fn(
                grid.uniform(len),
                p,
                q,
                |_| (rho_p, 0.0, 0.0),
                |s| round_jet(fiber_radius, s),
            )?
            .into())
        }
        ModelKind::GreatSphereTube { radius } if p > 0 => {
            let len = std::f64::consts::FRAC_PI_2 * radius - r0;
            Ok(DoublyWarpProfile::from_fn(
                grid.uniform(len),
                p,
                q,
                |s| round_jet(radius, s),
                |s| cos_jet(radius, s),
            )?
            .into())
        }
        _ => Err(NeckError::InvalidParameter(format!(
            "no single-profile complement for {:?} with p = {p}",
            model.kind
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryReport {
    pub kappa: f64,
    pub floor: f64,
    pub min_r: f64,
    pub volume_before: f64,
    pub volume_after: f64,
    /// `|vol(N) - vol(M)| / vol(M)`.
    pub relative_volume_change: f64,
    pub stretch: f64,
    pub cap_fiber_radius: f64,
    pub max_jet_mismatch: f64,
    pub neck: DesignReport,
}

/// The replacement handle for a surgery: neck, collar and cap, ordered from
/// the tube boundary inward.
#[derive(Debug, Clone)]
pub struct SurgeryHandle {
    /// Tube radius at which the neck leaves the body.
    pub r0: f64,
    pub pieces: Vec<Piece>,
    pub stretch: f64,
    pub cap_fiber_radius: f64,
    pub neck: DesignReport,
}

/// Builds the handle for surgery along the core of `model` with tube radius
/// `delta`. The neck uses half the budget; collar and cap are checked
/// against the full floor `κ - δ`.
pub fn surgery_handle(model: &AmbientModel, delta: f64, grid: &GridSpec) -> Result<SurgeryHandle> {
    if model.q < 3 {
        return Err(NeckError::CodimensionTooSmall { q: model.q });
    }
    if !(delta > 0.0) {
        return Err(NeckError::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let (p, q) = (model.p, model.q);
    let kappa = model.kappa();
    let floor = kappa - delta;

    let mut params = CurveDesignParams::new(*model, kappa, 0.5 * delta).with_tube_radius(delta);
    params.grid = *grid;
    let design = design_bending_curve(&params)?;
    let neck = induce_sigma_metric(&design.curve, model)?;
    let r0 = START_RADIUS_FACTOR * delta;
    debug_assert!((design.curve.r0() - r0).abs() < 1e-15);

    let neck_piece = Piece::from_profile(Role::Neck, "neck", neck)?;
    let rim = neck_piece.port(1)?;
    let target_a = 0.5 * delta;
    let path = boundary_homotopy(&rim, target_a, kappa, delta)?;
    let (c, collar) = stretch_search(&path, floor, 1.0)?;
    let (cap, _) = cap_piece_with_radius(p, q, target_a, path.end.0, grid)?;
    Ok(SurgeryHandle {
        r0,
        pieces: vec![
            neck_piece,
            Piece::from_profile(Role::Collar, "collar", collar.into())?,
            Piece::from_profile(Role::Cap, "cap", cap.into())?,
        ],
        stretch: c,
        cap_fiber_radius: target_a,
        neck: design.report,
    })
}

/// Surgery along the core `S^p` of `model` with tube radius `delta`.
///
/// `j` is recorded but does not enter.
pub fn perform_surgery(model: &AmbientModel, delta: f64, j: f64, grid: &GridSpec) -> Result<(Assembly, SurgeryReport)> {
    let handle = surgery_handle(model, delta, grid)?;
    let kappa = model.kappa();
    let floor = kappa - delta;
    let body = body_minus_tube(model, handle.r0, grid)?;

    let mut asm = Assembly::new(Provenance {
        delta: Some(delta),
        d: None,
        j: Some(j),
        kappa: Some(kappa),
        n: Some(model.n),
        p: Some(model.p),
        q: Some(model.q),
    });
    asm.push_chain(Piece::from_profile(Role::Body, "body", body)?)?;
    for piece in handle.pieces {
        asm.push_chain(piece)?;
    }
    asm.verify(floor)?;

    let before = model_volume(model)?;
    let after = asm.volume();
    let rel = (after - before).abs() / before;
    if rel > delta {
        return Err(NeckError::InfeasibleBudget(format!(
            "volume changed by {rel:.3e} > delta"
        )));
    }
    let report = SurgeryReport {
        kappa,
        floor,
        min_r: asm.min_r(),
        volume_before: before,
        volume_after: after,
        relative_volume_change: rel,
        stretch: handle.stretch,
        cap_fiber_radius: handle.cap_fiber_radius,
        max_jet_mismatch: asm.max_mismatch(),
        neck: handle.neck,
    };
    Ok((asm, report))
}

/// The body with a tube removed, as the first piece of a fresh assembly
/// whose end port is free.
pub fn punctured_body(model: &AmbientModel, r0: f64, grid: &GridSpec) -> Result<Assembly> {
    let mut asm = Assembly::new(Provenance::default());
    asm.add(Piece::from_profile(
        Role::Body,
        "body",
        body_minus_tube(model, r0, grid)?,
    )?);
    asm.mark_boundary(PortRef::end(0))?;
    Ok(asm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connect_sum_half_neck() {
        let model = AmbientModel::round_sphere(3, 1.0);
        let (asm, rep) = perform_surgery(&model, 0.05, 1.0, &GridSpec::default()).unwrap();
        assert!(rep.min_r > 6.0 - 0.05);
        assert!(rep.relative_volume_change <= 0.05);
        assert!(asm.max_mismatch() <= 1e-8);
    }

    #[test]
    fn product_model() {
        let model = AmbientModel::product_of_rounds(1, 3, 1.0, 1.0);
        let (_, rep) = perform_surgery(&model, 0.05, 1.0, &GridSpec::default()).unwrap();
        assert!(rep.min_r > rep.kappa - 0.05);
        assert!(rep.relative_volume_change <= 0.05);
    }

    #[test]
    fn great_sphere() {
        let model = AmbientModel::great_sphere_tube(1, 3, 1.0);
        let (_, rep) = perform_surgery(&model, 0.05, 1.0, &GridSpec::default()).unwrap();
        assert!(rep.min_r > rep.kappa - 0.05);
    }

    #[test]
    fn low_codimension() {
        let model = AmbientModel::product_of_rounds(2, 2, 1.0, 1.0);
        assert!(matches!(
            perform_surgery(&model, 0.05, 1.0, &GridSpec::default()),
            Err(NeckError::CodimensionTooSmall { q: 2 })
        ));
    }
}
