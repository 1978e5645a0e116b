//! Gromov–Lawson tunnels `T_j ≅ S^{n-1} × [0, 1]`.
//!
//! Each half is a bending neck that starts on the annulus `E = B(2δ) ∖ B(δ)`
//! of its ambient ball, followed by a collar that widens the fiber from the
//! neck radius `η` to the cylinder radius. A straight cylinder of length `d`
//! joins the two halves.

use serde::{Deserialize, Serialize};

use super::homotopy::{stretch_search, MetricPath, PathShape};
use super::piece::{Assembly, Piece, PortRef, Provenance, Role};
use crate::bending::{design_bending_curve, induce_sigma_metric, CurveDesignParams, DesignReport};
use crate::error::{NeckError, Result};
use crate::metric::diameter::{chain_diameter, DiameterBounds};
use crate::metric::model::AmbientModel;
use crate::metric::profile::{GridSpec, Profile, WarpProfile};

/// Cylinder fiber radius as a fraction of the smaller tube radius.
pub const CYLINDER_FRACTION: f64 = 0.9;

/// One side of a tunnel: the ambient ball and its curvature floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelEnd {
    pub model: AmbientModel,
    pub kappa: f64,
    /// Tube radius `δ`; the tunnel replaces `B(2δ)`.
    pub delta: f64,
}

impl TunnelEnd {
    /// Ball in the round sphere of scalar curvature `kappa` (flat if `kappa = 0`).
    pub fn round(n: usize, kappa: f64, delta: f64) -> Result<Self> {
        let model = if kappa == 0.0 {
            AmbientModel::euclidean(n)
        } else {
            AmbientModel::round_sphere_with_scalar(n, kappa)?
        };
        Ok(Self { model, kappa, delta })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelParams {
    pub left: TunnelEnd,
    pub right: TunnelEnd,
    pub d: f64,
    pub j: f64,
    pub grid: GridSpec,
}

impl TunnelParams {
    pub fn symmetric(delta: f64, d: f64, j: f64, kappa: f64, n: usize) -> Result<Self> {
        let end = TunnelEnd::round(n, kappa, delta)?;
        Ok(Self {
            left: end,
            right: end,
            d,
            j,
            grid: GridSpec::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.left.model.n
    }

    pub fn floor(&self) -> f64 {
        self.left.kappa.min(self.right.kappa) - 1.0 / self.j
    }

    fn validate(&self) -> Result<()> {
        if self.left.model.n != self.right.model.n || self.left.model.p != 0 || self.right.model.p != 0 {
            return Err(NeckError::InvalidParameter(
                "tunnel ends must be balls of one dimension".into(),
            ));
        }
        if self.n() < 3 {
            return Err(NeckError::CodimensionTooSmall { q: self.n() });
        }
        if !(self.d >= 0.0 && self.d.is_finite()) || !(self.j >= 1.0) {
            return Err(NeckError::InvalidParameter(format!(
                "need d >= 0 and j >= 1 (d = {}, j = {})",
                self.d, self.j
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelReport {
    pub floor: f64,
    pub min_r: f64,
    pub eta: (f64, f64),
    pub cylinder_radius: f64,
    pub stretch: (f64, f64),
    pub diameter: DiameterBounds,
    pub volume: f64,
    /// `vol / (δ^n + d δ^{n-1})` with `δ` the larger tube radius.
    pub volume_constant: f64,
    /// `diam_upper / (δ + d)`.
    pub diameter_constant: f64,
    /// Largest node-wise gap between the vertical neck segments and the ambient annuli.
    pub end_isometry_error: f64,
    pub max_jet_mismatch: f64,
    pub necks: (DesignReport, DesignReport),
}

#[derive(Debug, Clone)]
pub struct Tunnel {
    /// Pieces from the left ball to the right ball.
    pub pieces: Vec<Piece>,
    pub report: TunnelReport,
}

struct Half {
    neck: Piece,
    collar: Option<Piece>,
    design: DesignReport,
    stretch: f64,
    isometry_error: f64,
}

fn build_half(end: &TunnelEnd, j: f64, cylinder_radius: f64, floor: f64, grid: &GridSpec) -> Result<Half> {
    let mut params = CurveDesignParams::new(end.model, end.kappa, 0.5 / j).with_tube_radius(end.delta);
    params.grid = *grid;
    let design = design_bending_curve(&params)?;
    let curve = &design.curve;
    let profile = induce_sigma_metric(curve, &end.model)?;
    let r0 = curve.r0();
    let isometry_error = match &profile {
        Profile::Warp(w) => curve
            .theta
            .iter()
            .zip(&w.phi().value)
            .zip(&curve.s)
            .take_while(|((th, _), _)| **th == 0.0)
            .map(|((_, v), s)| (v - end.model.sn(r0 - s).0).abs())
            .fold(0.0, f64::max),
        Profile::Doubly(_) => unreachable!("tunnel ends have p = 0"),
    };
    let neck = Piece::from_profile(Role::Neck, "neck", profile)?;
    let eta = curve.eta();
    let (collar, stretch) = if eta == cylinder_radius {
        (None, 0.0)
    } else {
        let path = MetricPath::new(0, end.model.n, (1.0, eta), (1.0, cylinder_radius), PathShape::Smooth)?;
        let (c, collar) = stretch_search(&path, floor, end.delta)?;
        (Some(Piece::from_profile(Role::Collar, "collar", collar.into())?), c)
    };
    Ok(Half {
        neck,
        collar,
        design: design.report,
        stretch,
        isometry_error,
    })
}

fn reversed_piece(mut p: Piece) -> Piece {
    if let super::piece::Geometry::Profile(pr) = &p.geometry {
        p.geometry = super::piece::Geometry::Profile(pr.reversed());
    }
    p
}

/// Builds the tunnel pieces, ordered from the left end to the right end.
pub fn tunnel_pieces(params: &TunnelParams) -> Result<Tunnel> {
    params.validate()?;
    let n = params.n();
    let floor = params.floor();
    let cylinder_radius = CYLINDER_FRACTION * params.left.delta.min(params.right.delta);
    let cylinder_r = ((n - 1) * (n - 2)) as f64 / (cylinder_radius * cylinder_radius);
    if !(cylinder_r > floor) {
        return Err(NeckError::InfeasibleBudget(format!(
            "cylinder of radius {cylinder_radius} has R = {cylinder_r} <= {floor}"
        )));
    }
    let left = build_half(&params.left, params.j, cylinder_radius, floor, &params.grid)?;
    let right = build_half(&params.right, params.j, cylinder_radius, floor, &params.grid)?;

    let mut pieces = vec![left.neck];
    pieces.extend(left.collar);
    if params.d > 0.0 {
        let sparse = GridSpec {
            density: 0.0,
            min_nodes: params.grid.min_nodes,
        };
        let cyl = WarpProfile::constant(params.d, cylinder_radius, n - 1, &sparse)?;
        pieces.push(Piece::from_profile(Role::Cylinder, "cylinder", cyl.into())?);
    }
    pieces.extend(right.collar.map(reversed_piece));
    pieces.push(reversed_piece(right.neck));
    for p in &mut pieces {
        if p.role == Role::Neck || p.role == Role::Collar {
            p.label = format!("tunnel {}", p.label);
        }
    }

    let mut check = Assembly::new(Provenance::default());
    for p in &pieces {
        check.push_chain(p.clone())?;
    }
    let profiles: Vec<&Profile> = pieces.iter().filter_map(Piece::profile).collect();
    let diameter = chain_diameter(&profiles)?;
    let volume = check.volume();
    let min_r = check.min_r();
    if !(min_r > floor) {
        return Err(NeckError::InfeasibleBudget(format!(
            "tunnel min R {min_r} <= floor {floor}"
        )));
    }
    let delta = params.left.delta.max(params.right.delta);
    let nf = n as f64;
    let report = TunnelReport {
        floor,
        min_r,
        eta: (left.design.eta, right.design.eta),
        cylinder_radius,
        stretch: (left.stretch, right.stretch),
        diameter,
        volume,
        volume_constant: volume / (delta.powf(nf) + params.d * delta.powf(nf - 1.0)),
        diameter_constant: diameter.upper / (delta + params.d),
        end_isometry_error: left.isometry_error.max(right.isometry_error),
        max_jet_mismatch: check.max_mismatch(),
        necks: (left.design, right.design),
    };
    Ok(Tunnel { pieces, report })
}

/// Symmetric tunnel between two balls of the round model with scalar
/// curvature `kappa`, as a standalone assembly with both end annuli free.
pub fn build_tunnel(delta: f64, d: f64, j: f64, kappa: f64, n: usize) -> Result<(Assembly, TunnelReport)> {
    build_tunnel_with(&TunnelParams::symmetric(delta, d, j, kappa, n)?)
}

pub fn build_tunnel_with(params: &TunnelParams) -> Result<(Assembly, TunnelReport)> {
    let tunnel = tunnel_pieces(params)?;
    let mut asm = Assembly::new(Provenance {
        delta: Some(params.left.delta.max(params.right.delta)),
        d: Some(params.d),
        j: Some(params.j),
        kappa: Some(params.left.kappa.min(params.right.kappa)),
        n: Some(params.n()),
        p: Some(0),
        q: Some(params.n()),
    });
    for p in tunnel.pieces {
        asm.push_chain(p)?;
    }
    let last = asm.pieces.len() - 1;
    asm.mark_boundary(PortRef::start(0))?;
    asm.mark_boundary(PortRef::end(last))?;
    asm.verify(tunnel.report.floor)?;
    Ok((asm, tunnel.report))
}
