//! Profile serialization: plot-ready CSV and a JSON piece descriptor.
//!
//! Floats are written in Rust's shortest round-trip form, so a write/read
//! cycle reproduces every sample bit for bit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::profile::{DoublyWarpProfile, Profile, WarpProfile};
use super::spline::JetCurve;
use crate::error::{NeckError, Result};

/// One sampled factor: values and first two derivatives on the shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSamples {
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl From<&JetCurve> for FactorSamples {
    fn from(j: &JetCurve) -> Self {
        Self {
            value: j.value.clone(),
            d1: j.d1.clone(),
            d2: j.d2.clone(),
        }
    }
}

/// JSON piece descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileDescriptor {
    Warp {
        #[serde(rename = "L")]
        length: f64,
        m: usize,
        s: Vec<f64>,
        phi: FactorSamples,
    },
    Doubly {
        #[serde(rename = "L")]
        length: f64,
        p: usize,
        q: usize,
        s: Vec<f64>,
        a: FactorSamples,
        b: FactorSamples,
    },
}

impl From<&Profile> for ProfileDescriptor {
    fn from(p: &Profile) -> Self {
        match p {
            Profile::Warp(w) => ProfileDescriptor::Warp {
                length: w.length(),
                m: w.m(),
                s: w.nodes().to_vec(),
                phi: w.phi().into(),
            },
            Profile::Doubly(d) => ProfileDescriptor::Doubly {
                length: d.length(),
                p: d.p(),
                q: d.q(),
                s: d.nodes().to_vec(),
                a: d.a().into(),
                b: d.b().into(),
            },
        }
    }
}

fn jets(s: &[f64], f: &FactorSamples) -> Result<JetCurve> {
    JetCurve::new(s.to_vec(), f.value.clone(), f.d1.clone(), f.d2.clone())
}

impl ProfileDescriptor {
    pub fn to_profile(&self) -> Result<Profile> {
        match self {
            ProfileDescriptor::Warp { m, s, phi, .. } => Ok(WarpProfile::from_jets(jets(s, phi)?, *m)?.into()),
            ProfileDescriptor::Doubly { p, q, s, a, b, .. } => {
                Ok(DoublyWarpProfile::from_jets(jets(s, a)?, jets(s, b)?, *p, *q)?.into())
            }
        }
    }
}

pub fn profile_to_json(profile: &Profile) -> String {
    serde_json::to_string(&ProfileDescriptor::from(profile)).expect("descriptor serializes")
}

pub fn profile_from_json(text: &str) -> Result<Profile> {
    let d: ProfileDescriptor = serde_json::from_str(text).map_err(|e| NeckError::SchemaViolation(e.to_string()))?;
    d.to_profile()
}

/// CSV with header `s,phi,dphi,d2phi` or `s,a,b,da,db,d2a,d2b`.
pub fn profile_to_csv(profile: &Profile) -> String {
    let mut out = String::new();
    match profile {
        Profile::Warp(w) => {
            out.push_str("s,phi,dphi,d2phi\n");
            let f = w.phi();
            for i in 0..f.len() {
                let _ = writeln!(out, "{},{},{},{}", f.nodes[i], f.value[i], f.d1[i], f.d2[i]);
            }
        }
        Profile::Doubly(d) => {
            let _ = writeln!(out, "# p={},q={}", d.p(), d.q());
            out.push_str("s,a,b,da,db,d2a,d2b\n");
            let (a, b) = (d.a(), d.b());
            for i in 0..b.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    b.nodes[i], a.value[i], b.value[i], a.d1[i], b.d1[i], a.d2[i], b.d2[i]
                );
            }
        }
    }
    out
}

/// Parses [`profile_to_csv`] output. Warp profiles need the fiber dimension `m`;
/// doubly warped ones carry `p, q` in a leading comment line.
pub fn profile_from_csv(text: &str, m: usize) -> Result<Profile> {
    let mut dims: Option<(usize, usize)> = None;
    let mut header: Option<Vec<&str>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(meta) = line.strip_prefix('#') {
            let mut p = None;
            let mut q = None;
            for kv in meta.trim().split(',') {
                match kv.split_once('=') {
                    Some(("p", v)) => p = v.trim().parse().ok(),
                    Some(("q", v)) => q = v.trim().parse().ok(),
                    _ => {}
                }
            }
            dims = p.zip(q);
        } else if header.is_none() {
            header = Some(line.split(',').map(str::trim).collect());
        } else {
            let row = line
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| NeckError::SchemaViolation(format!("bad CSV number: {e}")))?;
            rows.push(row);
        }
    }
    let header = header.ok_or_else(|| NeckError::SchemaViolation("missing CSV header".into()))?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    if rows.iter().any(|r| r.len() != header.len()) {
        return Err(NeckError::SchemaViolation("ragged CSV rows".into()));
    }
    match header.as_slice() {
        ["s", "phi", "dphi", "d2phi"] => {
            let j = JetCurve::new(col(0), col(1), col(2), col(3))?;
            Ok(WarpProfile::from_jets(j, m)?.into())
        }
        ["s", "a", "b", "da", "db", "d2a", "d2b"] => {
            let (p, q) = dims.ok_or_else(|| NeckError::SchemaViolation("missing `# p=..,q=..` line".into()))?;
            let a = JetCurve::new(col(0), col(1), col(3), col(5))?;
            let b = JetCurve::new(col(0), col(2), col(4), col(6))?;
            Ok(DoublyWarpProfile::from_jets(a, b, p, q)?.into())
        }
        other => Err(NeckError::SchemaViolation(format!("unknown CSV header {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::spline::uniform_nodes;

    #[test]
    fn round_trips() {
        let w: Profile = WarpProfile::from_fn(uniform_nodes(0.0, 1.0, 64), 2, |s| {
            (1.0 + 0.3 * s.sin(), 0.3 * s.cos(), -0.3 * s.sin())
        })
        .unwrap()
        .into();
        assert_eq!(profile_from_json(&profile_to_json(&w)).unwrap(), w);
        assert_eq!(profile_from_csv(&profile_to_csv(&w), 2).unwrap(), w);

        let d: Profile = DoublyWarpProfile::from_fn(
            uniform_nodes(0.0, 2.0, 40),
            1,
            3,
            |_| (0.7, 0.0, 0.0),
            |s| (0.2 + 0.01 * s * s, 0.02 * s, 0.02),
        )
        .unwrap()
        .into();
        assert_eq!(profile_from_json(&profile_to_json(&d)).unwrap(), d);
        assert_eq!(profile_from_csv(&profile_to_csv(&d), 0).unwrap(), d);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(profile_from_json("{}"), Err(NeckError::SchemaViolation(_))));
        assert!(profile_from_csv("x,y\n1,2\n", 2).is_err());
    }
}
