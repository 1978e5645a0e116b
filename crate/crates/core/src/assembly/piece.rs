use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{NeckError, Result};
use crate::metric::curvature::min_scalar;
use crate::metric::diameter::{chain_diameter, DiameterBounds};
use crate::metric::io::profile_to_csv;
use crate::metric::profile::{PoleSide, Profile};
use crate::metric::volume::volume;

/// Jets at a junction must agree to this (scale-free) tolerance.
pub const JET_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Body,
    Neck,
    Collar,
    Cap,
    Tunnel,
    Cylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    /// The `S^p` factor.
    Base,
    /// The `S^{q-1}` factor (the only one for singly warped pieces).
    Fiber,
}

/// Value and outward normal derivatives of one sphere factor's radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorJet {
    pub factor: Factor,
    pub dim: usize,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterfaceKind {
    RoundSphere { radius: f64 },
    ProductOfRounds { rho_p: f64, a: f64 },
}

/// Gluing data on one side of a hypersurface `{s = const}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryInterface {
    pub kind: InterfaceKind,
    pub dim: usize,
    pub jet: Vec<FactorJet>,
    /// Second fundamental form vanishes (all outward first derivatives are zero).
    pub totally_geodesic: bool,
}

impl BoundaryInterface {
    pub fn from_jets(mut jet: Vec<FactorJet>) -> Result<Self> {
        jet.sort_by_key(|j| j.factor);
        if jet.is_empty()
            || jet
                .iter()
                .any(|j| !(j.value > 0.0) || !j.d1.is_finite() || !j.d2.is_finite())
        {
            return Err(NeckError::InvalidParameter(format!("invalid interface jets {jet:?}")));
        }
        let kind = match jet.as_slice() {
            [f] => InterfaceKind::RoundSphere { radius: f.value },
            [b, f] => InterfaceKind::ProductOfRounds {
                rho_p: b.value,
                a: f.value,
            },
            _ => return Err(NeckError::InvalidParameter("at most two sphere factors".into())),
        };
        let dim = jet.iter().map(|j| j.dim).sum();
        let totally_geodesic = jet.iter().all(|j| j.d1.abs() <= 1e-12 * j.value.max(1.0));
        Ok(Self {
            kind,
            dim,
            jet,
            totally_geodesic,
        })
    }

    /// Round `S^{dim}(radius)` with the given outward derivatives.
    pub fn round(dim: usize, radius: f64, d1: f64, d2: f64) -> Result<Self> {
        Self::from_jets(vec![FactorJet {
            factor: Factor::Fiber,
            dim,
            value: radius,
            d1,
            d2,
        }])
    }

    /// Scale-free distance between the two sides of a junction: values
    /// equal, outward first derivatives opposite, second derivatives equal.
    pub fn mismatch(&self, other: &BoundaryInterface) -> Option<f64> {
        if self.jet.len() != other.jet.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (x, y) in self.jet.iter().zip(&other.jet) {
            if x.factor != y.factor || x.dim != y.dim {
                return None;
            }
            let v = 0.5 * (x.value + y.value);
            worst = worst
                .max((x.value - y.value).abs() / v)
                .max((x.d1 + y.d1).abs())
                .max((x.d2 - y.d2).abs() * v);
        }
        Some(worst)
    }
}

/// A region whose geometry is known exactly but is not a single profile,
/// e.g. a round sphere with several balls removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRegion {
    pub description: String,
    pub dim: usize,
    pub volume: f64,
    pub min_r: f64,
    pub ports: Vec<BoundaryInterface>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Profile(Profile),
    Region(ModelRegion),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub role: Role,
    pub label: String,
    pub geometry: Geometry,
    /// Verified minimum of the scalar curvature over the piece's grid.
    pub min_r: f64,
    pub volume: f64,
}

impl Piece {
    pub fn from_profile(role: Role, label: impl Into<String>, profile: Profile) -> Result<Self> {
        let min_r = min_scalar(&profile)?;
        let volume = volume(&profile)?;
        Ok(Self {
            role,
            label: label.into(),
            geometry: Geometry::Profile(profile),
            min_r,
            volume,
        })
    }

    pub fn from_region(role: Role, label: impl Into<String>, region: ModelRegion) -> Self {
        Self {
            role,
            label: label.into(),
            min_r: region.min_r,
            volume: region.volume,
            geometry: Geometry::Region(region),
        }
    }

    pub fn profile(&self) -> Option<&Profile> {
        match &self.geometry {
            Geometry::Profile(p) => Some(p),
            Geometry::Region(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.geometry {
            Geometry::Profile(p) => p.dim(),
            Geometry::Region(r) => r.dim,
        }
    }

    pub fn port_count(&self) -> usize {
        match &self.geometry {
            Geometry::Profile(_) => 2,
            Geometry::Region(r) => r.ports.len(),
        }
    }

    /// Interface at a port. Profile ports are `0` (s = 0) and `1` (s = L);
    /// a port where a factor closes up smoothly has no interface.
    pub fn port(&self, port: usize) -> Result<BoundaryInterface> {
        match &self.geometry {
            Geometry::Region(r) => r
                .ports
                .get(port)
                .cloned()
                .ok_or_else(|| NeckError::InvalidParameter(format!("{} has no port {port}", self.label))),
            Geometry::Profile(p) => profile_port(p, port)
                .ok_or_else(|| NeckError::InvalidParameter(format!("{} is closed at port {port}", self.label))),
        }
    }
}

/// Interface of a profile at `s = 0` (`port = 0`) or `s = L` (`port = 1`).
pub fn profile_port(profile: &Profile, port: usize) -> Option<BoundaryInterface> {
    let side = match port {
        0 => PoleSide::Start,
        1 => PoleSide::End,
        _ => return None,
    };
    let sign = if port == 0 { -1.0 } else { 1.0 };
    let pick = |j: &crate::metric::spline::JetCurve| {
        let i = if port == 0 { 0 } else { j.len() - 1 };
        (j.value[i], sign * j.d1[i], j.d2[i])
    };
    let mut jets = Vec::new();
    match profile {
        Profile::Warp(w) => {
            if w.poles().contains(&side) {
                return None;
            }
            let (v, d1, d2) = pick(w.phi());
            jets.push(FactorJet {
                factor: Factor::Fiber,
                dim: w.m(),
                value: v,
                d1,
                d2,
            });
        }
        Profile::Doubly(d) => {
            if d.poles().contains(&side) {
                return None;
            }
            if d.p() > 0 {
                let (v, d1, d2) = pick(d.a());
                jets.push(FactorJet {
                    factor: Factor::Base,
                    dim: d.p(),
                    value: v,
                    d1,
                    d2,
                });
            }
            let (v, d1, d2) = pick(d.b());
            jets.push(FactorJet {
                factor: Factor::Fiber,
                dim: d.q() - 1,
                value: v,
                d1,
                d2,
            });
        }
    }
    BoundaryInterface::from_jets(jets).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortRef {
    pub piece: usize,
    pub port: usize,
}

impl PortRef {
    pub fn start(piece: usize) -> Self {
        Self { piece, port: 0 }
    }

    pub fn end(piece: usize) -> Self {
        Self { piece, port: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub left: PortRef,
    pub right: PortRef,
    pub left_jet: BoundaryInterface,
    pub right_jet: BoundaryInterface,
    pub mismatch: f64,
}

/// Construction parameters carried alongside an assembly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub delta: Option<f64>,
    pub d: Option<f64>,
    pub j: Option<f64>,
    pub kappa: Option<f64>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
}

/// Pieces glued along verified junctions, plus the free boundary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assembly {
    pub pieces: Vec<Piece>,
    pub junctions: Vec<Junction>,
    pub boundary: Vec<(PortRef, BoundaryInterface)>,
    pub provenance: Provenance,
}

impl Assembly {
    pub fn new(provenance: Provenance) -> Self {
        Self {
            provenance,
            ..Self::default()
        }
    }

    pub fn add(&mut self, piece: Piece) -> usize {
        self.pieces.push(piece);
        self.pieces.len() - 1
    }

    /// Glues two ports, rejecting jets that disagree beyond [`JET_TOL`].
    pub fn join(&mut self, left: PortRef, right: PortRef) -> Result<()> {
        let (a, b) = (self.piece(left.piece)?, self.piece(right.piece)?);
        if a.dim() != b.dim() {
            return Err(NeckError::InterfaceMismatch {
                left: left.piece,
                right: right.piece,
                detail: format!("dimensions {} and {}", a.dim(), b.dim()),
            });
        }
        let lj = a.port(left.port)?;
        let rj = b.port(right.port)?;
        let mismatch = lj.mismatch(&rj).ok_or_else(|| NeckError::InterfaceMismatch {
            left: left.piece,
            right: right.piece,
            detail: "factor structure differs".into(),
        })?;
        if !(mismatch <= JET_TOL) {
            return Err(NeckError::InterfaceMismatch {
                left: left.piece,
                right: right.piece,
                detail: format!("jet mismatch {mismatch:e} ({} vs {})", a.label, b.label),
            });
        }
        self.junctions.push(Junction {
            left,
            right,
            left_jet: lj,
            right_jet: rj,
            mismatch,
        });
        Ok(())
    }

    /// Appends `piece` and glues its start to the end of the previous piece.
    pub fn push_chain(&mut self, piece: Piece) -> Result<usize> {
        let idx = self.add(piece);
        if idx > 0 {
            self.join(PortRef::end(idx - 1), PortRef::start(idx))?;
        }
        Ok(idx)
    }

    pub fn mark_boundary(&mut self, port: PortRef) -> Result<()> {
        let b = self.piece(port.piece)?.port(port.port)?;
        self.boundary.push((port, b));
        Ok(())
    }

    fn piece(&self, i: usize) -> Result<&Piece> {
        self.pieces
            .get(i)
            .ok_or_else(|| NeckError::InvalidParameter(format!("no piece {i}")))
    }

    pub fn min_r(&self) -> f64 {
        self.pieces.iter().map(|p| p.min_r).fold(f64::INFINITY, f64::min)
    }

    pub fn volume(&self) -> f64 {
        self.pieces.iter().map(|p| p.volume).sum()
    }

    pub fn max_mismatch(&self) -> f64 {
        self.junctions.iter().map(|j| j.mismatch).fold(0.0, f64::max)
    }

    pub fn total_nodes(&self) -> usize {
        self.pieces
            .iter()
            .filter_map(|p| p.profile().map(Profile::node_count))
            .sum()
    }

    /// Re-evaluates every junction and every piece's curvature minimum.
    pub fn verify(&self, floor: f64) -> Result<()> {
        for j in &self.junctions {
            let lj = self.piece(j.left.piece)?.port(j.left.port)?;
            let rj = self.piece(j.right.piece)?.port(j.right.port)?;
            match lj.mismatch(&rj) {
                Some(m) if m <= JET_TOL => {}
                other => {
                    return Err(NeckError::InterfaceMismatch {
                        left: j.left.piece,
                        right: j.right.piece,
                        detail: format!("re-verification gave {other:?}"),
                    })
                }
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            let r = match &p.geometry {
                Geometry::Profile(pr) => min_scalar(pr)?,
                Geometry::Region(reg) => reg.min_r,
            };
            if !(r > floor) {
                return Err(NeckError::InfeasibleBudget(format!(
                    "piece {i} ({}) has min R {r} <= floor {floor}",
                    p.label
                )));
            }
        }
        Ok(())
    }

    /// Indices of pieces in order when the junction graph is a simple path of
    /// profile pieces; `None` otherwise.
    pub fn linear_order(&self) -> Option<Vec<usize>> {
        let n = self.pieces.len();
        if n == 0 || self.junctions.len() != n - 1 {
            return None;
        }
        let mut adj = vec![Vec::new(); n];
        for j in &self.junctions {
            adj[j.left.piece].push(j.right.piece);
            adj[j.right.piece].push(j.left.piece);
        }
        if adj.iter().any(|a| a.len() > 2) {
            return None;
        }
        let start = if n == 1 {
            0
        } else {
            adj.iter().position(|a| a.len() == 1)?
        };
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&x| x != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        (order.len() == n).then_some(order)
    }

    /// Diameter bounds for a chain of profile pieces.
    pub fn diameter(&self) -> Result<DiameterBounds> {
        if let Some(p) = self.pieces.iter().find(|p| p.profile().is_none()) {
            return Err(NeckError::UnsupportedPiece(p.label.clone()));
        }
        let order = self
            .linear_order()
            .ok_or_else(|| NeckError::InvalidParameter("junction graph is not a simple chain".into()))?;
        let profiles: Vec<&Profile> = order.iter().filter_map(|&i| self.pieces[i].profile()).collect();
        chain_diameter(&profiles)
    }

    pub fn descriptor(&self, certificate_ref: Option<&str>) -> AssemblyDescriptor {
        AssemblyDescriptor {
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceDescriptor {
                    role: p.role,
                    label: p.label.clone(),
                    kind: match &p.geometry {
                        Geometry::Profile(Profile::Warp(_)) => "warp".into(),
                        Geometry::Profile(Profile::Doubly(_)) => "doubly".into(),
                        Geometry::Region(_) => "model_region".into(),
                    },
                    length: p.profile().map(Profile::length),
                    nodes: p.profile().map(Profile::node_count),
                    min_r: p.min_r,
                    volume: p.volume,
                })
                .collect(),
            interfaces: self.junctions.clone(),
            boundary: self.boundary.clone(),
            provenance: self.provenance.clone(),
            certificate_ref: certificate_ref.map(str::to_string),
        }
    }

    pub fn to_json(&self, certificate_ref: Option<&str>) -> String {
        serde_json::to_string_pretty(&self.descriptor(certificate_ref)).expect("descriptor serializes")
    }

    /// Writes one `NN_label.csv` per profile piece into `dir`.
    pub fn export_profiles(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if let Some(pr) = p.profile() {
                let name: String = p
                    .label
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                    .collect();
                let path = dir.join(format!("{i:02}_{name}.csv"));
                std::fs::write(&path, profile_to_csv(pr))?;
                out.push(path);
            }
        }
        Ok(out)
    }

    /// Piece volumes keyed by role, for reporting.
    pub fn volume_by_role(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for p in &self.pieces {
            let key = serde_json::to_value(p.role).unwrap().as_str().unwrap().to_string();
            *m.entry(key).or_insert(0.0) += p.volume;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceDescriptor {
    pub role: Role,
    pub label: String,
    pub kind: String,
    pub length: Option<f64>,
    pub nodes: Option<usize>,
    pub min_r: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyDescriptor {
    pub pieces: Vec<PieceDescriptor>,
    pub interfaces: Vec<Junction>,
    pub boundary: Vec<(PortRef, BoundaryInterface)>,
    pub provenance: Provenance,
    pub certificate_ref: Option<String>,
}
