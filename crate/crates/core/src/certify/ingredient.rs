//! Ingredient metrics: the closed manifolds and hemispheres fed to pipelines.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::certificate::IngredientRecord;
use crate::error::{NeckError, Result};
use crate::metric::curvature::min_scalar;
use crate::metric::io::{profile_from_json, ProfileDescriptor};
use crate::metric::profile::{GridSpec, PoleSide, Profile, WarpProfile};
use crate::metric::spline::JetCurve;
use crate::metric::volume::{unit_sphere_volume, volume};

/// Recomputed floors must agree with the certified value to this (relative) tolerance.
pub const FLOOR_RECOMPUTE_TOL: f64 = 1e-9;
/// Default relative curvature excess of the hemisphere stand-in.
pub const STAND_IN_EXCESS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IngredientShape {
    /// Closed round `S^n(radius)`; glued at a pole.
    RoundSphere { radius: f64 },
    /// Round upper hemisphere; glued at its pole, boundary at the equator.
    RoundHemisphere { radius: f64 },
    /// Rotationally symmetric warp profile with a smooth pole at `s = 0`.
    Profile { profile: ProfileDescriptor },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IngredientSource {
    Builtin,
    StandIn,
    External { path: String },
    ExternalTrusted { path: String },
}

impl IngredientSource {
    pub fn label(&self) -> String {
        match self {
            Self::Builtin => "builtin".into(),
            Self::StandIn => "STAND-IN (round model, not a Min-Oo counterexample)".into(),
            Self::External { path } => format!("external file {path}"),
            Self::ExternalTrusted { path } => format!("EXTERNAL-TRUSTED {path}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngredientMetric {
    pub name: String,
    pub n: usize,
    pub shape: IngredientShape,
    pub certified_r_floor: f64,
    pub volume: f64,
    pub source: IngredientSource,
}

fn round_jet(rho: f64, s: f64) -> (f64, f64, f64) {
    let (sn, cs) = (s / rho).sin_cos();
    (rho * sn, cs, -sn / rho)
}

/// Volume of a geodesic ball of radius `r` in `S^n(rho)`.
pub fn round_ball_volume(n: usize, rho: f64, r: f64) -> Result<f64> {
    let grid = GridSpec::default();
    let w = WarpProfile::from_fn(grid.uniform(r), n - 1, |s| round_jet(rho, s))?;
    volume(&Profile::Warp(w))
}

impl IngredientMetric {
    pub fn round_sphere(n: usize, radius: f64) -> Self {
        Self {
            name: format!("round S^{n}({radius})"),
            n,
            shape: IngredientShape::RoundSphere { radius },
            certified_r_floor: (n * (n - 1)) as f64 / (radius * radius),
            volume: unit_sphere_volume(n) * radius.powi(n as i32),
            source: IngredientSource::Builtin,
        }
    }

    pub fn round_hemisphere(n: usize, radius: f64) -> Self {
        Self {
            name: format!("round hemisphere S^{n}_+({radius})"),
            n,
            shape: IngredientShape::RoundHemisphere { radius },
            certified_r_floor: (n * (n - 1)) as f64 / (radius * radius),
            volume: 0.5 * unit_sphere_volume(n) * radius.powi(n as i32),
            source: IngredientSource::Builtin,
        }
    }

    /// Round hemisphere scaled so that `R = n(n-1)(1 + excess)`.
    pub fn hemisphere_stand_in(n: usize, excess: f64) -> Self {
        let mut h = Self::round_hemisphere(n, 1.0 / (1.0 + excess).sqrt());
        h.name = format!("hemisphere stand-in, R = n(n-1)(1 + {excess:e})");
        h.source = IngredientSource::StandIn;
        h
    }

    /// Wraps a warp profile; floor and volume are computed here.
    pub fn from_profile(name: &str, profile: WarpProfile, source: IngredientSource) -> Result<Self> {
        if !profile.poles().contains(&PoleSide::Start) {
            return Err(NeckError::InvalidProfile(
                "ingredient needs a smooth pole at s = 0".into(),
            ));
        }
        let p = Profile::Warp(profile);
        Ok(Self {
            name: name.into(),
            n: p.dim(),
            certified_r_floor: min_scalar(&p)?,
            volume: volume(&p)?,
            shape: IngredientShape::Profile {
                profile: ProfileDescriptor::from(&p),
            },
            source,
        })
    }

    /// Loads a JSON profile descriptor (a warp profile with a pole at `s = 0`).
    pub fn load_external(path: &Path, trusted: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let Profile::Warp(w) = profile_from_json(&text)? else {
            return Err(NeckError::SchemaViolation("ingredient must be a warp profile".into()));
        };
        let p = path.display().to_string();
        let source = if trusted {
            IngredientSource::ExternalTrusted { path: p }
        } else {
            IngredientSource::External { path: p }
        };
        Self::from_profile(&format!("external {}", path.display()), w, source)
    }

    pub fn is_hemisphere(&self) -> bool {
        match &self.shape {
            IngredientShape::RoundHemisphere { .. } => true,
            IngredientShape::RoundSphere { .. } => false,
            IngredientShape::Profile { profile } => match profile {
                ProfileDescriptor::Warp { phi, .. } => phi.value.last().is_some_and(|&v| v > 1e-12),
                ProfileDescriptor::Doubly { .. } => false,
            },
        }
    }

    /// The full profile, pole at `s = 0`.
    pub fn profile(&self, grid: &GridSpec) -> Result<WarpProfile> {
        match &self.shape {
            IngredientShape::RoundSphere { radius } => {
                WarpProfile::from_fn(grid.uniform(PI * radius), self.n - 1, |s| round_jet(*radius, s))
            }
            IngredientShape::RoundHemisphere { radius } => {
                WarpProfile::from_fn(grid.uniform(FRAC_PI_2 * radius), self.n - 1, |s| round_jet(*radius, s))
            }
            IngredientShape::Profile { profile } => match profile.to_profile()? {
                Profile::Warp(w) => Ok(w),
                Profile::Doubly(_) => Err(NeckError::SchemaViolation("ingredient must be a warp profile".into())),
            },
        }
    }

    /// Recomputes floor and volume; fails if the floor disagrees with the certified one.
    pub fn verify(&self, grid: &GridSpec) -> Result<(f64, f64)> {
        let p = Profile::Warp(self.profile(grid)?);
        let floor = min_scalar(&p)?;
        let vol = volume(&p)?;
        if (floor - self.certified_r_floor).abs() > FLOOR_RECOMPUTE_TOL * floor.abs().max(1.0) {
            return Err(NeckError::FloorCheckFailed(format!(
                "{}: recomputed floor {floor} vs certified {}",
                self.name, self.certified_r_floor
            )));
        }
        Ok((floor, vol))
    }

    /// Radius of the round sphere matching the metric near the gluing pole.
    /// Profiles must be round to 1e-9 (relative) on `[0, reach]`.
    pub fn gluing_radius(&self, reach: f64, grid: &GridSpec) -> Result<f64> {
        match &self.shape {
            IngredientShape::RoundSphere { radius } | IngredientShape::RoundHemisphere { radius } => Ok(*radius),
            IngredientShape::Profile { .. } => {
                let w = self.profile(grid)?;
                let phi = w.phi();
                // A round cap has R = n(n-1)/ρ² at every node; the pole value
                // itself is extrapolated, so read it off the next node.
                let k = crate::metric::curvature::scalar_curvature_warped(&w)?[1];
                let nn = (self.n * (self.n - 1)) as f64;
                if !(k > 0.0) {
                    return Err(NeckError::InvalidParameter(format!(
                        "gluing point has R = {k}; need a round positive cap"
                    )));
                }
                let rho = (nn / k).sqrt();
                let worst = phi
                    .nodes
                    .iter()
                    .zip(&phi.value)
                    .take_while(|(s, _)| **s <= reach)
                    .map(|(s, v)| (v - round_jet(rho, *s).0).abs() / rho)
                    .fold(0.0, f64::max);
                if worst > 1e-9 {
                    return Err(NeckError::InvalidParameter(format!(
                        "ingredient is not round near the gluing point (deviation {worst:e})"
                    )));
                }
                Ok(rho)
            }
        }
    }

    /// The profile with the ball `B(r0)` around the gluing pole removed,
    /// rebased so the cut is at `s = 0`.
    pub fn trimmed(&self, r0: f64, grid: &GridSpec) -> Result<Profile> {
        let shift = |len: f64, rho: f64| -> Result<Profile> {
            let nodes = grid.uniform(len - r0);
            Ok(WarpProfile::from_fn(nodes, self.n - 1, |s| round_jet(rho, s + r0))?.into())
        };
        match &self.shape {
            IngredientShape::RoundSphere { radius } => shift(PI * radius, *radius),
            IngredientShape::RoundHemisphere { radius } => shift(FRAC_PI_2 * radius, *radius),
            IngredientShape::Profile { .. } => {
                let w = self.profile(grid)?;
                let phi = w.phi();
                if !(r0 > 0.0 && r0 < phi.end()) {
                    return Err(NeckError::RadiusOutOfRange {
                        eps: r0,
                        limit: phi.end(),
                    });
                }
                let first = phi.nodes.partition_point(|&s| s <= r0);
                let (v, d1, d2) = phi.eval(r0);
                let mut jets = JetCurve {
                    nodes: vec![r0],
                    value: vec![v],
                    d1: vec![d1],
                    d2: vec![d2],
                };
                jets.nodes.extend_from_slice(&phi.nodes[first..]);
                jets.value.extend_from_slice(&phi.value[first..]);
                jets.d1.extend_from_slice(&phi.d1[first..]);
                jets.d2.extend_from_slice(&phi.d2[first..]);
                let j = JetCurve::new(jets.nodes, jets.value, jets.d1, jets.d2)?;
                Ok(WarpProfile::from_jets(j, self.n - 1)?.into())
            }
        }
    }

    /// A unit-sphere style annulus: `B(r0)` removed around both poles.
    pub fn annulus(&self, r0: f64, grid: &GridSpec) -> Result<Profile> {
        match &self.shape {
            IngredientShape::RoundSphere { radius } => {
                let rho = *radius;
                let nodes = grid.uniform(PI * rho - 2.0 * r0);
                Ok(WarpProfile::from_fn(nodes, self.n - 1, |s| round_jet(rho, s + r0))?.into())
            }
            _ => Err(NeckError::InvalidParameter(
                "annuli are built from round spheres only".into(),
            )),
        }
    }

    pub fn record(&self) -> IngredientRecord {
        IngredientRecord {
            name: self.name.clone(),
            source: self.source.label(),
            certified_r_floor: self.certified_r_floor,
            volume: self.volume,
        }
    }
}
