//! Certificates: claims with their operands, canonical JSON and re-checking.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{NeckError, Result};
use crate::metric::diameter::DiameterBounds;

/// Strict inequalities need at least this much room to count as passing.
pub const STRICT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// Decides `lhs rel rhs`; strict relations with less than `margin` of room
/// are inconclusive.
pub fn judge(lhs: f64, rel: Relation, rhs: f64, margin: f64) -> Status {
    if !lhs.is_finite() || !rhs.is_finite() {
        return Status::Fail;
    }
    let room = match rel {
        Relation::Gt | Relation::Ge => lhs - rhs,
        Relation::Lt | Relation::Le => rhs - lhs,
    };
    match rel {
        Relation::Gt | Relation::Lt if room > margin => Status::Pass,
        Relation::Gt | Relation::Lt if room > 0.0 => Status::Inconclusive,
        Relation::Ge | Relation::Le if room >= 0.0 => Status::Pass,
        _ => Status::Fail,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub inequality: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub margin: f64,
    pub status: Status,
    pub pass: bool,
}

impl Claim {
    /// Operands are rounded to their canonical text form first, so the
    /// verdict is reproducible from the emitted file.
    pub fn new(name: &str, inequality: &str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        Self::with_margin(name, inequality, lhs, relation, rhs, STRICT_MARGIN)
    }

    /// As [`Claim::new`] with a wider strict margin (never below [`STRICT_MARGIN`]).
    pub fn with_margin(name: &str, inequality: &str, lhs: f64, relation: Relation, rhs: f64, margin: f64) -> Self {
        let margin = canonical_round(margin.max(STRICT_MARGIN));
        let (lhs, rhs) = (canonical_round(lhs), canonical_round(rhs));
        let status = judge(lhs, relation, rhs, margin);
        Self {
            name: name.into(),
            inequality: inequality.into(),
            lhs,
            relation,
            rhs,
            margin,
            status,
            pass: status == Status::Pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub density: f64,
    pub min_nodes: u64,
    pub total_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub strict_margin: f64,
    pub jet_match: f64,
    pub quadrature_rtol: f64,
    pub floor_recompute: f64,
    pub isometry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            strict_margin: STRICT_MARGIN,
            jet_match: crate::assembly::piece::JET_TOL,
            quadrature_rtol: crate::metric::volume::VOLUME_RTOL,
            floor_recompute: 1e-9,
            isometry: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngredientRecord {
    pub name: String,
    pub source: String,
    pub certified_r_floor: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertProvenance {
    pub pipeline: String,
    pub parameters: BTreeMap<String, f64>,
    pub seed: u64,
    pub ingredients: Vec<IngredientRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub pipeline: String,
    pub claims: Vec<Claim>,
    pub global_min_r: f64,
    pub floor: f64,
    pub volume: f64,
    pub diameter: Option<DiameterBounds>,
    pub grid: GridRecord,
    pub tolerances: Tolerances,
    /// Achieved constants such as tunnel volume and diameter constants.
    pub constants: BTreeMap<String, f64>,
    /// Targets and reference values: `D`, `V`, `omega_n`, `m`.
    pub symbols: BTreeMap<String, f64>,
    pub provenance: CertProvenance,
    pub notes: Vec<String>,
    pub digest: String,
}

impl Certificate {
    pub fn new(pipeline: &str, seed: u64) -> Self {
        Self {
            pipeline: pipeline.into(),
            claims: Vec::new(),
            global_min_r: f64::NAN,
            floor: f64::NAN,
            volume: f64::NAN,
            diameter: None,
            grid: GridRecord {
                density: 0.0,
                min_nodes: 0,
                total_nodes: 0,
            },
            tolerances: Tolerances::default(),
            constants: BTreeMap::new(),
            symbols: BTreeMap::new(),
            provenance: CertProvenance {
                pipeline: pipeline.into(),
                parameters: BTreeMap::new(),
                seed,
                ingredients: Vec::new(),
            },
            notes: Vec::new(),
            digest: String::new(),
        }
    }

    pub fn claim(&mut self, name: &str, inequality: &str, lhs: f64, relation: Relation, rhs: f64) -> &Claim {
        let margin = self.tolerances.strict_margin;
        self.claims
            .push(Claim::with_margin(name, inequality, lhs, relation, rhs, margin));
        self.claims.last().unwrap()
    }

    pub fn param(&mut self, key: &str, value: f64) {
        self.provenance.parameters.insert(key.into(), canonical_round(value));
    }

    pub fn constant(&mut self, key: &str, value: f64) {
        self.constants.insert(key.into(), canonical_round(value));
    }

    pub fn symbol(&mut self, key: &str, value: f64) {
        self.symbols.insert(key.into(), canonical_round(value));
    }

    pub fn all_pass(&self) -> bool {
        !self.claims.is_empty() && self.claims.iter().all(|c| c.pass)
    }

    pub fn claim_named(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    /// Rounds every float to its canonical form and seals the digest.
    pub fn finalize(mut self) -> Result<Self> {
        for x in [&mut self.global_min_r, &mut self.floor, &mut self.volume] {
            *x = canonical_round(*x);
        }
        if let Some(d) = &mut self.diameter {
            d.lower = canonical_round(d.lower);
            d.upper = canonical_round(d.upper);
        }
        self.digest.clear();
        let mut v = serde_json::to_value(&self).map_err(|e| NeckError::SchemaViolation(e.to_string()))?;
        // Re-read through the canonical text so the digest matches a reload.
        let body = canonical_json(&strip_digest(&mut v));
        self = serde_json::from_str(&body).map_err(|e| NeckError::SchemaViolation(e.to_string()))?;
        self.digest = sha256_hex(&body);
        Ok(self)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("certificate serializes"))
    }
}

fn strip_digest(v: &mut Value) -> Value {
    if let Value::Object(m) = v {
        m.insert("digest".into(), Value::String(String::new()));
    }
    v.clone()
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// `%.12e`: 13 significant digits, signed two-digit exponent.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

pub fn canonical_round(x: f64) -> f64 {
    if x.is_finite() {
        format_float(x).parse().expect("canonical float parses")
    } else {
        x
    }
}

/// Sorted keys, two-space indentation, floats as `%.12e`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap()));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                write_value(&m[k.as_str()], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

pub fn emit_certificate(cert: &Certificate, path: &Path) -> Result<()> {
    if cert.digest.is_empty() {
        return Err(NeckError::InvalidParameter("certificate is not finalized".into()));
    }
    std::fs::write(path, cert.to_canonical_json())?;
    Ok(())
}

pub fn load_certificate(text: &str) -> Result<Certificate> {
    serde_json::from_str(text).map_err(|e| NeckError::SchemaViolation(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecheckReport {
    pub digest_ok: bool,
    /// Claims whose stored verdict differs from the recomputed one.
    pub mismatches: Vec<String>,
    /// `global_min_R > floor` recomputed from the stored values.
    pub floor_ok: bool,
    pub all_claims_pass: bool,
}

impl RecheckReport {
    /// The file is internally consistent.
    pub fn consistent(&self) -> bool {
        self.digest_ok && self.mismatches.is_empty() && self.floor_ok
    }

    /// Consistent and every claim passes.
    pub fn passed(&self) -> bool {
        self.consistent() && self.all_claims_pass
    }
}

/// Re-evaluates every claim from the stored operands and re-derives the digest.
pub fn recheck_certificate(text: &str) -> Result<RecheckReport> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| NeckError::SchemaViolation(e.to_string()))?;
    let cert = load_certificate(text)?;
    let body = canonical_json(&strip_digest(&mut v));
    let digest_ok = sha256_hex(&body) == cert.digest;
    let mut mismatches = Vec::new();
    for c in &cert.claims {
        let status = judge(c.lhs, c.relation, c.rhs, c.margin.max(cert.tolerances.strict_margin));
        if status != c.status || c.pass != (status == Status::Pass) || c.margin < STRICT_MARGIN {
            mismatches.push(format!(
                "{}: stored {:?}/{} but recomputed {:?}",
                c.name, c.status, c.pass, status
            ));
        }
    }
    let floor_ok = judge(cert.global_min_r, Relation::Gt, cert.floor, STRICT_MARGIN) == Status::Pass;
    Ok(RecheckReport {
        digest_ok,
        mismatches,
        floor_ok,
        all_claims_pass: cert.all_pass(),
    })
}

pub fn recheck_file(path: &Path) -> Result<RecheckReport> {
    recheck_certificate(&std::fs::read_to_string(path)?)
}
