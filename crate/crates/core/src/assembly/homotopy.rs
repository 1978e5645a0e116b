//! Paths of product metrics `ρ² g_{S^p} + σ² g_{S^{q-1}}` and the
//! stretched collars `ds² + h_{s/c}` built from them.

use serde::{Deserialize, Serialize};

use super::piece::{BoundaryInterface, Factor, JET_TOL};
use crate::error::{NeckError, Result};
use crate::metric::curvature::min_scalar;
use crate::metric::profile::{DoublyWarpProfile, Profile};
use crate::metric::spline::{uniform_nodes, JetCurve};

pub const PATH_NODES: usize = 2049;
pub const MAX_STRETCH_DOUBLINGS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathShape {
    /// Radii linear in `τ`.
    Linear,
    /// Radii follow a septic smoothstep, so `τ`-derivatives up to order 3
    /// vanish at both ends.
    Smooth,
}

fn septic(u: f64) -> (f64, f64, f64) {
    let u = u.clamp(0.0, 1.0);
    let (u2, u3) = (u * u, u * u * u);
    let v = u2 * u2 * (35.0 - 84.0 * u + 70.0 * u2 - 20.0 * u3);
    let w = 1.0 - u;
    let d1 = 140.0 * u3 * w * w * w;
    let d2 = 420.0 * u2 * w * w * (1.0 - 2.0 * u);
    (v, d1, d2)
}

/// A path `τ ↦ (ρ(τ), σ(τ))`, `τ ∈ [0, 1]`. For `p = 0` only `σ` is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPath {
    pub p: usize,
    pub q: usize,
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub shape: PathShape,
    pub tau: Vec<f64>,
}

impl MetricPath {
    pub fn new(p: usize, q: usize, start: (f64, f64), end: (f64, f64), shape: PathShape) -> Result<Self> {
        if q < 3 {
            return Err(NeckError::CodimensionTooSmall { q });
        }
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(start.1) && ok(end.1)) || (p > 0 && !(ok(start.0) && ok(end.0))) {
            return Err(NeckError::InvalidParameter(format!(
                "path radii must be positive: {start:?} -> {end:?}"
            )));
        }
        let (start, end) = if p == 0 {
            ((1.0, start.1), (1.0, end.1))
        } else {
            (start, end)
        };
        Ok(Self {
            p,
            q,
            start,
            end,
            shape,
            tau: uniform_nodes(0.0, 1.0, PATH_NODES),
        })
    }

    pub fn constant(p: usize, q: usize, radii: (f64, f64)) -> Result<Self> {
        Self::new(p, q, radii, radii, PathShape::Smooth)
    }

    pub fn is_constant(&self) -> bool {
        self.start == self.end
    }

    /// `(ρ, ρ_τ, ρ_ττ)` and `(σ, σ_τ, σ_ττ)` at `τ`.
    pub fn radii(&self, tau: f64) -> ((f64, f64, f64), (f64, f64, f64)) {
        let (w, w1, w2) = match self.shape {
            PathShape::Linear => (tau.clamp(0.0, 1.0), 1.0, 0.0),
            PathShape::Smooth => septic(tau),
        };
        let lerp = |x0: f64, x1: f64| {
            let d = x1 - x0;
            (x0 + d * w, d * w1, d * w2)
        };
        (lerp(self.start.0, self.end.0), lerp(self.start.1, self.end.1))
    }

    /// Scalar curvature of the product metric `h_τ`.
    pub fn scalar_at(&self, tau: f64) -> f64 {
        let ((rho, _, _), (sigma, _, _)) = self.radii(tau);
        let (p, k) = (self.p as f64, (self.q - 1) as f64);
        p * (p - 1.0) / (rho * rho) + k * (k - 1.0) / (sigma * sigma)
    }

    pub fn min_scalar(&self) -> f64 {
        self.tau
            .iter()
            .map(|&t| self.scalar_at(t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Fails unless every grid metric has `R > floor`.
    pub fn verify(&self, floor: f64) -> Result<()> {
        let m = self.min_scalar();
        if m > floor {
            Ok(())
        } else {
            Err(NeckError::InfeasibleBudget(format!(
                "path minimum R = {m} does not exceed {floor}"
            )))
        }
    }
}

/// Path from the product metric on a totally geodesic end to `(1, target_a)`.
pub fn boundary_homotopy(start: &BoundaryInterface, target_a: f64, kappa: f64, delta: f64) -> Result<MetricPath> {
    boundary_homotopy_to(start, 1.0, target_a, kappa, delta)
}

/// As [`boundary_homotopy`] with a chosen final base radius.
pub fn boundary_homotopy_to(
    start: &BoundaryInterface,
    target_rho: f64,
    target_a: f64,
    kappa: f64,
    delta: f64,
) -> Result<MetricPath> {
    if !(target_a > 0.0 && target_a < delta) {
        return Err(NeckError::InvalidParameter(format!(
            "target fiber radius {target_a} must lie in (0, delta = {delta})"
        )));
    }
    for j in &start.jet {
        if j.d1.abs() > JET_TOL || (j.d2 * j.value).abs() > JET_TOL {
            return Err(NeckError::InvalidParameter(format!(
                "homotopy must start from a product end, got jets {j:?}"
            )));
        }
    }
    let base = start.jet.iter().find(|j| j.factor == Factor::Base);
    let fiber = start
        .jet
        .iter()
        .find(|j| j.factor == Factor::Fiber)
        .ok_or_else(|| NeckError::InvalidParameter("interface has no fiber factor".into()))?;
    let (p, rho0) = base.map_or((0, 1.0), |b| (b.dim, b.value));
    let path = MetricPath::new(
        p,
        fiber.dim + 1,
        (rho0, fiber.value),
        (if p == 0 { 1.0 } else { target_rho }, target_a),
        PathShape::Smooth,
    )?;
    path.verify(kappa - delta)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollarSpec {
    pub path: MetricPath,
    /// Stretch length; the collar is `[0, c]` with `f(s) = s / c`.
    pub c: f64,
}

impl CollarSpec {
    pub fn new(path: MetricPath, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(NeckError::InvalidParameter(format!("stretch c = {c} must be positive")));
        }
        Ok(Self { path, c })
    }

    pub fn f(&self, s: f64) -> f64 {
        s / self.c
    }
}

/// `ds² + h_{s/c}` as a doubly warped profile, sampled at `c·τ_i`.
pub fn collar_metric(spec: &CollarSpec) -> Result<DoublyWarpProfile> {
    let c = spec.c;
    let nodes: Vec<f64> = spec.path.tau.iter().map(|t| t * c).collect();
    let path = &spec.path;
    let a = |s: f64| {
        let (r, _) = path.radii(spec.f(s));
        (r.0, r.1 / c, r.2 / (c * c))
    };
    let b = |s: f64| {
        let (_, g) = path.radii(spec.f(s));
        (g.0, g.1 / c, g.2 / (c * c))
    };
    let aj = if path.p == 0 {
        let n = nodes.len();
        JetCurve::new(nodes.clone(), vec![1.0; n], vec![0.0; n], vec![0.0; n])?
    } else {
        sample(&nodes, a)?
    };
    DoublyWarpProfile::from_jets(aj, sample(&nodes, b)?, path.p, path.q)
}

fn sample(nodes: &[f64], f: impl Fn(f64) -> (f64, f64, f64)) -> Result<JetCurve> {
    let (mut v, mut d1, mut d2) = (Vec::new(), Vec::new(), Vec::new());
    for &s in nodes {
        let (x, y, z) = f(s);
        v.push(x);
        d1.push(y);
        d2.push(z);
    }
    JetCurve::new(nodes.to_vec(), v, d1, d2)
}

/// Smallest power-of-two `c` with collar `min R > κ - δ`.
pub fn choose_stretch(path: &MetricPath, kappa: f64, delta: f64) -> Result<f64> {
    stretch_search(path, kappa - delta, 1.0).map(|(c, _)| c)
}

/// Doubling search over `c = unit · 2^k`, `k ≤ 20`; returns the first
/// collar whose exact curvature exceeds `floor` at every node.
pub fn stretch_search(path: &MetricPath, floor: f64, unit: f64) -> Result<(f64, DoublyWarpProfile)> {
    path.verify(floor)?;
    for k in 0..=MAX_STRETCH_DOUBLINGS {
        let c = unit * f64::from(1u32 << k);
        let collar = collar_metric(&CollarSpec::new(path.clone(), c)?)?;
        if min_scalar(&Profile::Doubly(collar.clone()))? > floor {
            return Ok((c, collar));
        }
    }
    Err(NeckError::InfeasibleBudget(format!(
        "no collar with c <= {unit}·2^{MAX_STRETCH_DOUBLINGS} clears R > {floor}"
    )))
}
