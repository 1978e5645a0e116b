//! Ambient model spaces around the sphere (or point) being operated on.
//!
//! Every model is a tube `T = S^p × B^q` whose metric is
//! `dr² + a(r)² g_{S^p} + b(r)² g_{S^{q-1}}`, with `r` the distance to the
//! core `S^p × {z}`. For `p = 0` the core is a point and the tube is a ball.

use serde::{Deserialize, Serialize};

use crate::error::{NeckError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `S^p(rho_p) × R^q`; for `p = 0` plain `R^n`.
    EuclideanProduct { rho_p: f64 },
    /// Geodesic ball about a point of the round `S^n(radius)`.
    RoundSphereBall { radius: f64 },
    /// `S^p(rho_p) × S^q(fiber_radius)`, tube about `S^p × {z}`.
    ProductOfRounds { rho_p: f64, fiber_radius: f64 },
    /// Tube about a great `S^p` inside the round `S^n(radius)`.
    GreatSphereTube { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientModel {
    pub kind: ModelKind,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

/// Value and first two `r`-derivatives of a tube warp function.
pub type Jet = (f64, f64, f64);

/// Sectional curvatures of the tube metric at distance `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeCurvatures {
    /// radial / base
    pub radial_base: f64,
    /// radial / fiber
    pub radial_fiber: f64,
    pub base_base: f64,
    pub fiber_fiber: f64,
    pub base_fiber: f64,
}

impl AmbientModel {
    pub fn euclidean(n: usize) -> Self {
        Self {
            kind: ModelKind::EuclideanProduct { rho_p: 1.0 },
            n,
            p: 0,
            q: n,
        }
    }

    pub fn round_sphere(n: usize, radius: f64) -> Self {
        Self {
            kind: ModelKind::RoundSphereBall { radius },
            n,
            p: 0,
            q: n,
        }
    }

    /// Round sphere whose scalar curvature is `kappa`.
    pub fn round_sphere_with_scalar(n: usize, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(NeckError::InvalidParameter(format!(
                "round model needs kappa > 0, got {kappa}"
            )));
        }
        Ok(Self::round_sphere(n, ((n * (n - 1)) as f64 / kappa).sqrt()))
    }

    pub fn euclidean_product(p: usize, q: usize, rho_p: f64) -> Self {
        Self {
            kind: ModelKind::EuclideanProduct { rho_p },
            n: p + q,
            p,
            q,
        }
    }

    pub fn product_of_rounds(p: usize, q: usize, rho_p: f64, fiber_radius: f64) -> Self {
        Self {
            kind: ModelKind::ProductOfRounds { rho_p, fiber_radius },
            n: p + q,
            p,
            q,
        }
    }

    pub fn great_sphere_tube(p: usize, q: usize, radius: f64) -> Self {
        Self {
            kind: ModelKind::GreatSphereTube { radius },
            n: p + q,
            p,
            q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p + self.q != self.n || self.q < 2 {
            return Err(NeckError::InvalidParameter(format!(
                "model dimensions p = {}, q = {}, n = {} are inconsistent",
                self.p, self.q, self.n
            )));
        }
        let radii_ok = match self.kind {
            ModelKind::EuclideanProduct { rho_p } => rho_p > 0.0,
            ModelKind::RoundSphereBall { radius } => radius > 0.0 && self.p == 0,
            ModelKind::ProductOfRounds { rho_p, fiber_radius } => rho_p > 0.0 && fiber_radius > 0.0,
            ModelKind::GreatSphereTube { radius } => radius > 0.0,
        };
        if !radii_ok {
            return Err(NeckError::InvalidParameter(format!("invalid model {:?}", self.kind)));
        }
        Ok(())
    }

    /// Curvature of the space form the fiber ball lives in.
    pub fn fiber_curvature(&self) -> f64 {
        match self.kind {
            ModelKind::EuclideanProduct { .. } => 0.0,
            ModelKind::RoundSphereBall { radius } | ModelKind::GreatSphereTube { radius } => 1.0 / (radius * radius),
            ModelKind::ProductOfRounds { fiber_radius, .. } => 1.0 / (fiber_radius * fiber_radius),
        }
    }

    /// Exact scalar curvature of the model; it is constant on every model.
    pub fn kappa(&self) -> f64 {
        let (n, p, q) = (self.n as f64, self.p as f64, self.q as f64);
        match self.kind {
            ModelKind::EuclideanProduct { rho_p } => p * (p - 1.0) / (rho_p * rho_p),
            ModelKind::RoundSphereBall { radius } | ModelKind::GreatSphereTube { radius } => {
                n * (n - 1.0) / (radius * radius)
            }
            ModelKind::ProductOfRounds { rho_p, fiber_radius } => {
                p * (p - 1.0) / (rho_p * rho_p) + q * (q - 1.0) / (fiber_radius * fiber_radius)
            }
        }
    }

    /// Largest tube radius for which the fiber spheres stay convex.
    pub fn radius_limit(&self) -> f64 {
        use std::f64::consts::FRAC_PI_2;
        match self.kind {
            ModelKind::EuclideanProduct { .. } => f64::INFINITY,
            ModelKind::RoundSphereBall { radius } | ModelKind::GreatSphereTube { radius } => FRAC_PI_2 * radius,
            ModelKind::ProductOfRounds { fiber_radius, .. } => FRAC_PI_2 * fiber_radius,
        }
    }

    /// The fiber warp `sn(r)`: `sn(0) = 0`, `sn'(0) = 1`.
    pub fn sn(&self, r: f64) -> Jet {
        let k = self.fiber_curvature();
        if k == 0.0 {
            (r, 1.0, 0.0)
        } else {
            let rho = 1.0 / k.sqrt();
            let x = r / rho;
            (rho * x.sin(), x.cos(), -x.sin() / rho)
        }
    }

    /// Radius of the core sphere `S^p` at distance `r` (1 for `p = 0`).
    pub fn base(&self, r: f64) -> Jet {
        if self.p == 0 {
            return (1.0, 0.0, 0.0);
        }
        match self.kind {
            ModelKind::EuclideanProduct { rho_p } | ModelKind::ProductOfRounds { rho_p, .. } => (rho_p, 0.0, 0.0),
            ModelKind::GreatSphereTube { radius } => {
                let x = r / radius;
                (radius * x.cos(), -x.sin(), -x.cos() / radius)
            }
            ModelKind::RoundSphereBall { .. } => (1.0, 0.0, 0.0),
        }
    }

    pub fn check_radius(&self, r: f64) -> Result<()> {
        let limit = self.radius_limit();
        if !(r > 0.0) || r >= limit {
            return Err(NeckError::RadiusExceedsModel { r, limit });
        }
        Ok(())
    }

    pub fn tube_curvatures(&self, r: f64) -> TubeCurvatures {
        let (a, da, dda) = self.base(r);
        let (b, db, ddb) = self.sn(r);
        TubeCurvatures {
            radial_base: -dda / a,
            radial_fiber: -ddb / b,
            base_base: (1.0 - da * da) / (a * a),
            fiber_fiber: (1.0 - db * db) / (b * b),
            base_fiber: -da * db / (a * b),
        }
    }
}

/// Shape data of the geodesic sphere of radius `eps` in the fiber ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSphereData {
    pub eps: f64,
    /// The `q - 1` principal curvatures, sign convention `-sn'/sn`.
    pub principal_curvatures: Vec<f64>,
    /// Operator norm of `g_rd - eps^-2 g_eps` with respect to `g_rd`.
    pub deviation_c0: f64,
    /// Covariant C² norm (`|T| + |∇T| + |∇²T|`) of the same difference.
    pub deviation_c2: f64,
}

/// Principal curvatures and metric deviation of `S^{q-1}(eps) ⊂ B^q`.
pub fn geodesic_sphere_data(model: &AmbientModel, eps: f64) -> Result<GeodesicSphereData> {
    let limit = model.radius_limit();
    if !(eps > 0.0) || eps >= limit {
        return Err(NeckError::RadiusOutOfRange { eps, limit });
    }
    let (b, db, _) = model.sn(eps);
    let lambda = -db / b;
    let ratio = b / eps;
    // The difference is a constant multiple of g_rd, so it is parallel and
    // its covariant derivatives vanish identically.
    let c0 = (1.0 - ratio * ratio).abs();
    Ok(GeodesicSphereData {
        eps,
        principal_curvatures: vec![lambda; model.q - 1],
        deviation_c0: c0,
        deviation_c2: c0,
    })
}
