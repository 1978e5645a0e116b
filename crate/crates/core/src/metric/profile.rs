//! Warped-product profiles: `ds² + φ(s)² g_{S^m}` and
//! `ds² + a(s)² g_{S^p} + b(s)² g_{S^{q-1}}`.

use serde::{Deserialize, Serialize};

use super::spline::{uniform_nodes, JetCurve};
use crate::error::{NeckError, Result};

/// Minimum number of samples a profile may carry.
pub const MIN_SAMPLES: usize = 8;

/// Tolerance for recognising a smooth pole (`φ = 0`, `|φ'| = 1`, `φ'' = 0`).
const POLE_TOL: f64 = 1e-6;

/// Grid resolution used when sampling a profile from a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Nodes per unit arc-length.
    pub density: f64,
    /// Lower bound on the node count of any piece.
    pub min_nodes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            density: 2048.0,
            min_nodes: 256,
        }
    }
}

impl GridSpec {
    pub fn with_density(density: f64) -> Self {
        Self {
            density,
            ..Self::default()
        }
    }

    pub fn nodes_for(&self, length: f64) -> usize {
        let n = (self.density * length).ceil();
        let n = if n.is_finite() { n as usize + 1 } else { self.min_nodes };
        n.max(self.min_nodes).max(MIN_SAMPLES)
    }

    pub fn uniform(&self, length: f64) -> Vec<f64> {
        uniform_nodes(0.0, length, self.nodes_for(length))
    }
}

/// Where a factor of a profile closes up smoothly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSide {
    Start,
    End,
}

fn check_factor(name: &str, jets: &JetCurve) -> Result<Vec<PoleSide>> {
    let n = jets.len();
    let mut poles = Vec::new();
    for (i, (&s, &v)) in jets.nodes.iter().zip(&jets.value).enumerate() {
        if v > 1e-12 {
            continue;
        }
        if v < -1e-12 {
            return Err(NeckError::NonPositiveWarp { s, value: v });
        }
        let side = if i == 0 {
            Some(PoleSide::Start)
        } else if i == n - 1 {
            Some(PoleSide::End)
        } else {
            None
        };
        let expected_slope = match side {
            Some(PoleSide::Start) => 1.0,
            Some(PoleSide::End) => -1.0,
            None => return Err(NeckError::NonPositiveWarp { s, value: v }),
        };
        let smooth = v.abs() <= 1e-12
            && (jets.d1[i] - expected_slope).abs() <= POLE_TOL
            && jets.d2[i].abs() <= POLE_TOL.max(1e-3 * jets.d2.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
        if !smooth {
            return Err(NeckError::InvalidProfile(format!(
                "{name} vanishes at s = {s} without closing smoothly (value {v}, slope {})",
                jets.d1[i]
            )));
        }
        poles.push(side.unwrap());
    }
    Ok(poles)
}

/// `ds² + φ(s)² g_{S^m}` on `[0, L]`; total dimension `m + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpProfile {
    m: usize,
    phi: JetCurve,
    poles: Vec<PoleSide>,
}

impl WarpProfile {
    pub fn from_jets(phi: JetCurve, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(NeckError::InvalidProfile("fiber dimension m must be >= 1".into()));
        }
        if phi.len() < MIN_SAMPLES {
            return Err(NeckError::DegenerateGrid(format!(
                "{} samples, need at least {MIN_SAMPLES}",
                phi.len()
            )));
        }
        let phi = if phi.start() != 0.0 { phi.rebased() } else { phi };
        let poles = check_factor("phi", &phi)?;
        Ok(Self { m, phi, poles })
    }

    /// Plain samples; derivatives come from the not-a-knot spline.
    pub fn from_samples(nodes: Vec<f64>, phi: Vec<f64>, m: usize) -> Result<Self> {
        if nodes.len() < MIN_SAMPLES {
            return Err(NeckError::DegenerateGrid(format!(
                "{} samples, need at least {MIN_SAMPLES}",
                nodes.len()
            )));
        }
        Self::from_jets(JetCurve::from_samples(nodes, phi)?, m)
    }

    /// Samples a closed form `s -> (φ, φ', φ'')` at the given nodes.
    pub fn from_fn<F>(nodes: Vec<f64>, m: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64, f64),
    {
        let jets = sample_jets(nodes, f)?;
        Self::from_jets(jets, m)
    }

    pub fn constant(length: f64, radius: f64, m: usize, grid: &GridSpec) -> Result<Self> {
        Self::from_fn(grid.uniform(length), m, |_| (radius, 0.0, 0.0))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn length(&self) -> f64 {
        self.phi.end()
    }

    pub fn phi(&self) -> &JetCurve {
        &self.phi
    }

    pub fn nodes(&self) -> &[f64] {
        &self.phi.nodes
    }

    pub fn poles(&self) -> &[PoleSide] {
        &self.poles
    }

    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        self.phi.eval(s)
    }

    /// Values and first two derivatives at `s = 0` and `s = L`.
    pub fn boundary_data(&self) -> [(f64, f64, f64); 2] {
        let n = self.phi.len() - 1;
        [
            (self.phi.value[0], self.phi.d1[0], self.phi.d2[0]),
            (self.phi.value[n], self.phi.d1[n], self.phi.d2[n]),
        ]
    }

    pub fn reversed(&self) -> Self {
        let phi = self.phi.reversed();
        let poles = self
            .poles
            .iter()
            .map(|p| match p {
                PoleSide::Start => PoleSide::End,
                PoleSide::End => PoleSide::Start,
            })
            .collect();
        Self { m: self.m, phi, poles }
    }

    /// `φ -> cφ`, `s -> cs`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let p = &self.phi;
        let jets = JetCurve::new(
            p.nodes.iter().map(|s| c * s).collect(),
            p.value.iter().map(|v| c * v).collect(),
            p.d1.clone(),
            p.d2.iter().map(|d| d / c).collect(),
        )?;
        Self::from_jets(jets, self.m)
    }
}

/// `ds² + a(s)² g_{S^p} + b(s)² g_{S^{q-1}}` on `[0, L]`; dimension `p + q`.
///
/// For `p = 0` there is no base factor and `a` is carried as the constant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyWarpProfile {
    p: usize,
    q: usize,
    a: JetCurve,
    b: JetCurve,
    poles: Vec<(char, PoleSide)>,
}

impl DoublyWarpProfile {
    pub fn from_jets(a: JetCurve, b: JetCurve, p: usize, q: usize) -> Result<Self> {
        if q < 3 {
            return Err(NeckError::CodimensionTooSmall { q });
        }
        if b.len() < MIN_SAMPLES {
            return Err(NeckError::DegenerateGrid(format!(
                "{} samples, need at least {MIN_SAMPLES}",
                b.len()
            )));
        }
        if a.nodes != b.nodes {
            return Err(NeckError::DegenerateGrid("a and b must share one grid".into()));
        }
        let (a, b) = if b.start() != 0.0 {
            (a.rebased(), b.rebased())
        } else {
            (a, b)
        };
        let mut poles: Vec<(char, PoleSide)> = Vec::new();
        if p > 0 {
            poles.extend(check_factor("a", &a)?.into_iter().map(|s| ('a', s)));
        }
        poles.extend(check_factor("b", &b)?.into_iter().map(|s| ('b', s)));
        for side in [PoleSide::Start, PoleSide::End] {
            if poles.iter().filter(|(_, s)| *s == side).count() > 1 {
                return Err(NeckError::InvalidProfile(
                    "both factors collapse at the same end".into(),
                ));
            }
        }
        Ok(Self { p, q, a, b, poles })
    }

    pub fn from_samples(nodes: Vec<f64>, a: Vec<f64>, b: Vec<f64>, p: usize, q: usize) -> Result<Self> {
        if nodes.len() < MIN_SAMPLES {
            return Err(NeckError::DegenerateGrid(format!(
                "{} samples, need at least {MIN_SAMPLES}",
                nodes.len()
            )));
        }
        let a = JetCurve::from_samples(nodes.clone(), a)?;
        let b = JetCurve::from_samples(nodes, b)?;
        Self::from_jets(a, b, p, q)
    }

    pub fn from_fn<F, G>(nodes: Vec<f64>, p: usize, q: usize, a: F, b: G) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64, f64),
        G: Fn(f64) -> (f64, f64, f64),
    {
        let aj = sample_jets(nodes.clone(), a)?;
        let bj = sample_jets(nodes, b)?;
        Self::from_jets(aj, bj, p, q)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn length(&self) -> f64 {
        self.b.end()
    }

    pub fn a(&self) -> &JetCurve {
        &self.a
    }

    pub fn b(&self) -> &JetCurve {
        &self.b
    }

    pub fn nodes(&self) -> &[f64] {
        &self.b.nodes
    }

    pub fn poles(&self) -> Vec<PoleSide> {
        self.poles.iter().map(|(_, s)| *s).collect()
    }

    /// Poles tagged with the closing factor, `'a'` or `'b'`.
    pub fn factor_poles(&self) -> &[(char, PoleSide)] {
        &self.poles
    }

    pub fn reversed(&self) -> Self {
        Self::from_jets(self.a.reversed(), self.b.reversed(), self.p, self.q).expect("reversal preserves validity")
    }
}

pub(crate) fn sample_jets<F>(nodes: Vec<f64>, f: F) -> Result<JetCurve>
where
    F: Fn(f64) -> (f64, f64, f64),
{
    let n = nodes.len();
    let mut v = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for &s in &nodes {
        let (x, y, z) = f(s);
        v.push(x);
        d1.push(y);
        d2.push(z);
    }
    JetCurve::new(nodes, v, d1, d2)
}

/// Either profile shape; the unit every assembled piece is made of.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Warp(WarpProfile),
    Doubly(DoublyWarpProfile),
}

impl Profile {
    pub fn length(&self) -> f64 {
        match self {
            Profile::Warp(w) => w.length(),
            Profile::Doubly(d) => d.length(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Profile::Warp(w) => w.dim(),
            Profile::Doubly(d) => d.dim(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        match self {
            Profile::Warp(w) => w.nodes(),
            Profile::Doubly(d) => d.nodes(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes().len()
    }

    pub fn reversed(&self) -> Self {
        match self {
            Profile::Warp(w) => Profile::Warp(w.reversed()),
            Profile::Doubly(d) => Profile::Doubly(d.reversed()),
        }
    }

    /// Largest diameter of a cross-section `{s} × fiber`.
    ///
    /// Round `S^m(φ)` has diameter `πφ`; a product `S^p(a) × S^{q-1}(b)`
    /// has diameter `π·sqrt(a² + b²)`.
    pub fn max_fiber_diameter(&self) -> f64 {
        use std::f64::consts::PI;
        match self {
            Profile::Warp(w) => PI * w.phi().max_value(),
            Profile::Doubly(d) => {
                let a = if d.p() > 0 {
                    d.a().value.clone()
                } else {
                    vec![0.0; d.b().len()]
                };
                a.iter()
                    .zip(&d.b().value)
                    .map(|(x, y)| PI * (x * x + y * y).sqrt())
                    .fold(0.0, f64::max)
            }
        }
    }
}

impl From<WarpProfile> for Profile {
    fn from(w: WarpProfile) -> Self {
        Profile::Warp(w)
    }
}

impl From<DoublyWarpProfile> for Profile {
    fn from(d: DoublyWarpProfile) -> Self {
        Profile::Doubly(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_interior() {
        let nodes = uniform_nodes(0.0, 1.0, 16);
        let phi: Vec<f64> = nodes.iter().map(|s| s - 0.5).collect();
        assert!(matches!(
            WarpProfile::from_samples(nodes, phi, 2),
            Err(NeckError::NonPositiveWarp { .. })
        ));
    }

    #[test]
    fn rejects_short_grid() {
        let nodes = uniform_nodes(0.0, 1.0, 7);
        assert!(matches!(
            WarpProfile::from_samples(nodes, vec![1.0; 7], 2),
            Err(NeckError::DegenerateGrid(_))
        ));
    }

    #[test]
    fn accepts_smooth_poles_only() {
        let nodes = uniform_nodes(0.0, std::f64::consts::PI, 64);
        let w = WarpProfile::from_fn(nodes.clone(), 2, |s| (s.sin().max(0.0), s.cos(), -s.sin())).unwrap();
        assert_eq!(w.poles(), &[PoleSide::Start, PoleSide::End]);
        // a cone tip is not smooth
        let cone = WarpProfile::from_fn(nodes, 2, |s| (0.5 * s, 0.5, 0.0));
        assert!(cone.is_err());
    }

    #[test]
    fn samples_reproduced_at_nodes() {
        let nodes = uniform_nodes(0.0, 2.0, 40);
        let phi: Vec<f64> = nodes.iter().map(|s| 1.0 + 0.3 * (2.0 * s).sin()).collect();
        let w = WarpProfile::from_samples(nodes.clone(), phi.clone(), 3).unwrap();
        for (s, v) in nodes.iter().zip(&phi) {
            assert_eq!(w.eval(*s).0, *v);
        }
    }

    #[test]
    fn grid_spec_minimum() {
        let g = GridSpec::default();
        assert_eq!(g.nodes_for(0.01), 256);
        assert_eq!(g.nodes_for(1.0), 2049);
    }
}
