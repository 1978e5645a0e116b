//! Pipelines: build an assembly, then certify what it achieves.
//!
//! Every pipeline returns the finalized certificate together with the
//! assembly it describes, so callers can export the profiles.

use std::f64::consts::{FRAC_PI_2, PI};

use super::certificate::{canonical_round, Certificate, GridRecord, Relation, STRICT_MARGIN};
use super::ingredient::{round_ball_volume, IngredientMetric, IngredientSource, STAND_IN_EXCESS};
use crate::assembly::piece::JET_TOL;
use crate::assembly::{
    body_minus_tube, model_volume, perform_surgery, profile_port, surgery_handle, tunnel_pieces, Assembly,
    BoundaryInterface, ModelRegion, Piece, PortRef, Provenance, Role, TunnelEnd, TunnelParams, TunnelReport,
};
use crate::bending::START_RADIUS_FACTOR;
use crate::error::{NeckError, Result};
use crate::metric::curvature::doubly_scalar_at;
use crate::metric::diameter::{chain_diameter, DiameterBounds};
use crate::metric::model::AmbientModel;
use crate::metric::profile::{GridSpec, Profile};
use crate::metric::volume::{unit_sphere_volume, volume, VOLUME_RTOL};

/// Settings shared by every pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub grid: GridSpec,
    /// Recorded in the provenance; the constructions are deterministic.
    pub seed: u64,
    /// Room required for a strict claim to pass (never below 1e-9).
    pub strict_margin: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            seed: 0,
            strict_margin: STRICT_MARGIN,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub certificate: Certificate,
    pub assembly: Assembly,
}

fn einstein(n: usize) -> f64 {
    (n * (n - 1)) as f64
}

fn new_cert(pipeline: &str, opts: &PipelineOptions) -> Certificate {
    let mut c = Certificate::new(pipeline, opts.seed);
    c.tolerances.strict_margin = canonical_round(opts.strict_margin.max(STRICT_MARGIN));
    c.grid = GridRecord {
        density: opts.grid.density,
        min_nodes: opts.grid.min_nodes as u64,
        total_nodes: 0,
    };
    c
}

fn seal(mut cert: Certificate, assembly: Assembly) -> Result<PipelineRun> {
    cert.grid.total_nodes = assembly.total_nodes() as u64;
    cert.global_min_r = assembly.min_r();
    cert.volume = assembly.volume();
    Ok(PipelineRun {
        certificate: cert.finalize()?,
        assembly,
    })
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(NeckError::InvalidParameter(format!("{name} = {x} must be positive")))
    }
}

/// Recomputes the ingredient's floor, then enforces `floor > n(n-1)` strictly.
fn check_floor(ing: &IngredientMetric, n: usize, grid: &GridSpec) -> Result<f64> {
    if ing.n != n {
        return Err(NeckError::InvalidParameter(format!(
            "{} has dimension {}, expected {n}",
            ing.name, ing.n
        )));
    }
    let (recomputed, _) = ing.verify(grid)?;
    let required = einstein(n);
    if !(ing.certified_r_floor > required) {
        return Err(NeckError::IngredientFloorTooLow {
            floor: ing.certified_r_floor,
            required,
        });
    }
    Ok(recomputed)
}

/// Smallest `j' >= j` whose tunnel floor `κ - 1/j'` clears `must_exceed`
/// by a fifth of the gap. Larger `j'` would thin the neck needlessly.
fn effective_j(j: f64, kappa: f64, must_exceed: Option<f64>) -> Result<f64> {
    check_positive("j", j)?;
    match must_exceed {
        None => Ok(j),
        Some(f) => {
            let gap = kappa - f;
            if !(gap > 0.0) {
                return Err(NeckError::InfeasibleBudget(format!(
                    "gluing curvature {kappa} does not exceed the target floor {f}"
                )));
            }
            Ok(j.max((1.25 / gap).ceil()))
        }
    }
}

/// Round `S^{n-1}` bounding a removed ball of radius `r` in `S^n(rho)`, seen
/// from the outside of the ball.
fn ball_port(n: usize, rho: f64, r: f64) -> Result<BoundaryInterface> {
    let model = AmbientModel::round_sphere(n, rho);
    let (v, d1, d2) = model.sn(r);
    BoundaryInterface::round(n - 1, v, -d1, d2)
}

struct Attachment {
    tunnel: TunnelReport,
    j: f64,
    /// Index of the first tunnel piece.
    first: usize,
    hemisphere: usize,
    rho: f64,
}

/// Glues the pole of `hemi` to the free port `at` through a tunnel of length
/// `d`. The neighborhood of `at` is a ball in `S^n(rho_left)`. The last piece
/// is the trimmed hemisphere, whose end is marked as the boundary.
#[allow(clippy::too_many_arguments)]
fn attach_hemisphere(
    asm: &mut Assembly,
    at: PortRef,
    rho_left: f64,
    hemi: &IngredientMetric,
    d: f64,
    j: f64,
    delta: f64,
    must_exceed: Option<f64>,
    grid: &GridSpec,
) -> Result<Attachment> {
    let n = hemi.n;
    let rho = hemi.gluing_radius(2.0 * delta, grid)?;
    let (k_left, k_hemi) = (einstein(n) / (rho_left * rho_left), einstein(n) / (rho * rho));
    let j_eff = effective_j(j, k_left.min(k_hemi), must_exceed)?;
    let params = TunnelParams {
        left: TunnelEnd::round(n, k_left, delta)?,
        right: TunnelEnd::round(n, k_hemi, delta)?,
        d,
        j: j_eff,
        grid: *grid,
    };
    let tunnel = tunnel_pieces(&params)?;
    let mut pieces = tunnel.pieces.into_iter();
    let first = asm.add(pieces.next().expect("a tunnel has pieces"));
    asm.join(at, PortRef::start(first))?;
    for p in pieces {
        asm.push_chain(p)?;
    }
    let r0 = START_RADIUS_FACTOR * delta;
    let trimmed = hemi.trimmed(r0, grid)?;
    let h = asm.push_chain(Piece::from_profile(Role::Body, "hemisphere", trimmed)?)?;
    asm.mark_boundary(PortRef::end(h))?;
    Ok(Attachment {
        tunnel: tunnel.report,
        j: j_eff,
        first,
        hemisphere: h,
        rho,
    })
}

fn profiles_in(asm: &Assembly, range: std::ops::Range<usize>) -> Vec<&Profile> {
    asm.pieces[range].iter().filter_map(Piece::profile).collect()
}

/// Claims that the free boundary is the untouched boundary of `hemi`.
fn boundary_claims(cert: &mut Certificate, asm: &Assembly, hemi: &IngredientMetric, grid: &GridSpec) -> Result<()> {
    let full = Profile::Warp(hemi.profile(grid)?);
    let input =
        profile_port(&full, 1).ok_or_else(|| NeckError::InvalidProfile(format!("{} has no boundary", hemi.name)))?;
    let (_, out) = asm
        .boundary
        .last()
        .ok_or_else(|| NeckError::InvalidParameter("assembly has no boundary".into()))?;
    let dist = if input.jet.len() == out.jet.len() {
        input
            .jet
            .iter()
            .zip(&out.jet)
            .map(|(a, b)| {
                (a.value - b.value)
                    .abs()
                    .max((a.d1 - b.d1).abs())
                    .max((a.d2 - b.d2).abs())
            })
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let tol = cert.tolerances.isometry;
    cert.claim(
        "boundary_unchanged",
        "max |jet(N boundary) - jet(input hemisphere boundary)| <= isometry tolerance",
        dist,
        Relation::Le,
        tol,
    );
    let sff = out.jet.iter().map(|j| j.d1.abs()).fold(0.0, f64::max);
    cert.claim(
        "boundary_totally_geodesic",
        "max |outward d1| on the boundary <= isometry tolerance",
        sff,
        Relation::Le,
        tol,
    );
    let same_flag = if out.totally_geodesic == input.totally_geodesic {
        1.0
    } else {
        0.0
    };
    cert.claim(
        "boundary_flag_preserved",
        "totally geodesic flag equals the input flag (1 = equal)",
        same_flag,
        Relation::Ge,
        1.0,
    );
    cert.constant("boundary_radius", out.jet[0].value);
    Ok(())
}

fn tunnel_constants(cert: &mut Certificate, prefix: &str, rep: &TunnelReport) {
    cert.constant(&format!("{prefix}volume_constant"), rep.volume_constant);
    cert.constant(&format!("{prefix}diameter_constant"), rep.diameter_constant);
    cert.constant(&format!("{prefix}volume"), rep.volume);
    cert.constant(&format!("{prefix}min_r"), rep.min_r);
    cert.constant(&format!("{prefix}floor"), rep.floor);
    cert.constant(&format!("{prefix}eta_left"), rep.eta.0);
    cert.constant(&format!("{prefix}eta_right"), rep.eta.1);
    cert.constant(&format!("{prefix}cylinder_radius"), rep.cylinder_radius);
    cert.constant(&format!("{prefix}end_isometry_error"), rep.end_isometry_error);
}

fn stand_in_notes(cert: &mut Certificate, hemi: &IngredientMetric, rho: f64) {
    if hemi.source == IngredientSource::StandIn {
        cert.notes.push(format!(
            "hemisphere is a STAND-IN round hemisphere ({}); it is not a Min-Oo counterexample. Its boundary is the \
             round S^{} of radius {} rather than the unit sphere.",
            hemi.name,
            hemi.n - 1,
            format_args!("{rho:.12e}")
        ));
    }
    cert.notes.push(
        "gluing happens only at the hemisphere pole, an interior point with R > n(n-1); the boundary annulus is \
         never modified"
            .into(),
    );
}

fn common_claims(cert: &mut Certificate, asm: &Assembly, att: &Attachment, floor: f64) {
    cert.claim(
        "junction_mismatch",
        "max scale-free jet mismatch over junctions <= jet tolerance",
        asm.max_mismatch(),
        Relation::Le,
        JET_TOL,
    );
    cert.claim(
        "tunnel_budget",
        "min R(tunnel) > min kappa - 1/j",
        att.tunnel.min_r,
        Relation::Gt,
        att.tunnel.floor,
    );
    cert.floor = floor;
}

/// `M # H` with the tunnel of length `D` in between.
#[allow(clippy::too_many_arguments)]
fn main_a_like(
    pipeline: &str,
    ingredient: &IngredientMetric,
    hemisphere: Option<&IngredientMetric>,
    d_target: f64,
    n: usize,
    j: f64,
    delta: f64,
    opts: &PipelineOptions,
) -> Result<PipelineRun> {
    if !(d_target >= 0.0 && d_target.is_finite()) {
        return Err(NeckError::InvalidParameter(format!("D = {d_target} must be >= 0")));
    }
    check_positive("delta", delta)?;
    let grid = &opts.grid;
    let hemi = hemisphere
        .cloned()
        .unwrap_or_else(|| IngredientMetric::hemisphere_stand_in(n, STAND_IN_EXCESS));
    if !hemi.is_hemisphere() {
        return Err(NeckError::InvalidParameter(format!("{} has no boundary", hemi.name)));
    }
    let nn = einstein(n);
    let floor_m = check_floor(ingredient, n, grid)?;
    let floor_h = check_floor(&hemi, n, grid)?;
    let rho_m = ingredient.gluing_radius(2.0 * delta, grid)?;
    let r0 = START_RADIUS_FACTOR * delta;

    let mut asm = Assembly::new(Provenance {
        delta: Some(delta),
        d: Some(d_target),
        j: Some(j),
        kappa: Some(nn),
        n: Some(n),
        p: Some(0),
        q: Some(n),
    });
    let body = ingredient.trimmed(r0, grid)?.reversed();
    asm.add(Piece::from_profile(Role::Body, "ingredient", body)?);
    let att = attach_hemisphere(
        &mut asm,
        PortRef::end(0),
        rho_m,
        &hemi,
        d_target,
        j,
        delta,
        Some(nn),
        grid,
    )?;
    asm.provenance.j = Some(att.j);

    let diameter = chain_diameter(&profiles_in(&asm, 0..asm.pieces.len()))?;
    let mut cert = new_cert(pipeline, opts);
    cert.claim("min_r", "min R(N) > n(n-1)", asm.min_r(), Relation::Gt, nn);
    cert.claim(
        "diameter",
        "diam lower bound >= D",
        diameter.lower,
        Relation::Ge,
        d_target,
    );
    boundary_claims(&mut cert, &asm, &hemi, grid)?;
    cert.claim(
        "ingredient_floor",
        "certified R floor of M > n(n-1)",
        ingredient.certified_r_floor,
        Relation::Gt,
        nn,
    );
    cert.claim(
        "hemisphere_floor",
        "certified R floor of H > n(n-1)",
        hemi.certified_r_floor,
        Relation::Gt,
        nn,
    );
    common_claims(&mut cert, &asm, &att, nn);
    cert.diameter = Some(diameter);
    for (k, v) in [
        ("D", d_target),
        ("n", n as f64),
        ("j", j),
        ("delta", delta),
        ("j_effective", att.j),
    ] {
        cert.param(k, v);
    }
    cert.symbol("D", d_target);
    cert.symbol("omega_n", unit_sphere_volume(n));
    cert.constant("ingredient_floor_recomputed", floor_m);
    cert.constant("hemisphere_floor_recomputed", floor_h);
    cert.constant("ingredient_gluing_radius", rho_m);
    tunnel_constants(&mut cert, "tunnel_", &att.tunnel);
    cert.provenance.ingredients = vec![ingredient.record(), hemi.record()];
    stand_in_notes(&mut cert, &hemi, att.rho);
    if att.j > j {
        cert.notes.push(format!(
            "j raised from {j} to {} so that the tunnel floor stays above n(n-1)",
            att.j
        ));
    }
    seal(cert, asm)
}

/// Glues `ingredient` (with `R > n(n-1)`) to a hemisphere through a tunnel
/// of length `D`, keeping the hemisphere boundary untouched.
///
/// `hemisphere = None` selects the round stand-in.
pub fn pipeline_main_a(
    ingredient: &IngredientMetric,
    hemisphere: Option<&IngredientMetric>,
    d_target: f64,
    n: usize,
    j: f64,
    delta: f64,
    opts: &PipelineOptions,
) -> Result<PipelineRun> {
    main_a_like("main-a", ingredient, hemisphere, d_target, n, j, delta, opts)
}

/// The diameter corollary: [`pipeline_main_a`] with `M = S^n(1/2)`.
pub fn pipeline_cor_d(n: usize, d_target: f64, j: f64, delta: f64, opts: &PipelineOptions) -> Result<PipelineRun> {
    let m = IngredientMetric::round_sphere(n, 0.5);
    main_a_like("cor-d", &m, None, d_target, n, j, delta, opts)
}

/// Radius of both factors in the product metric `(g_1^p + g_1^q) / (2n(n-1))`.
pub fn product_metric_radius(n: usize) -> f64 {
    1.0 / (2.0 * einstein(n)).sqrt()
}

/// Minimum scalar curvature of `S^p(r) × S^q(r)`, recomputed node by node
/// from the doubly warped closed form with `a ≡ r` and `b = r sin(s/r)`.
pub fn product_floor(p: usize, q: usize, r: f64, grid: &GridSpec) -> Result<f64> {
    check_positive("r", r)?;
    let (lo, hi) = (p.min(q), p.max(q));
    let nodes = grid.uniform(PI * r);
    let inner = &nodes[1..nodes.len() - 1];
    Ok(inner
        .iter()
        .map(|&s| {
            let (sn, cs) = (s / r).sin_cos();
            doubly_scalar_at(lo, hi, (r, 0.0, 0.0), (r * sn, cs, -sn / r))
        })
        .fold(f64::INFINITY, f64::min))
}

/// Radius of the round sphere on which the product is realized.
const REALIZATION_RADIUS: f64 = 0.5;

/// The product corollary: `S^p × S^q` glued to the hemisphere.
///
/// The floor of the product metric is recomputed. The manifold itself is
/// realized with rotational symmetry by surgery on a great sphere in
/// `S^n(1/2)` (a self-tunnel when `min(p, q) = 1`).
pub fn pipeline_cor_t(p: usize, q: usize, j: f64, delta: f64, opts: &PipelineOptions) -> Result<PipelineRun> {
    let n = p + q;
    if p == 0 || q == 0 || n < 3 {
        return Err(NeckError::InvalidParameter(format!(
            "need p, q >= 1 and p + q >= 3 (p = {p}, q = {q})"
        )));
    }
    check_positive("delta", delta)?;
    let grid = &opts.grid;
    let nn = einstein(n);
    let r_h = product_metric_radius(n);
    let closed = ((p * (p - 1) + q * (q - 1)) as f64) / (r_h * r_h);
    let recomputed = product_floor(p, q, r_h, grid)?;
    if !(recomputed > nn) {
        return Err(NeckError::FloorCheckFailed(format!(
            "product metric has R = {recomputed} <= {nn}"
        )));
    }

    let rho = REALIZATION_RADIUS;
    let kappa = nn / (rho * rho);
    let r_ball = START_RADIUS_FACTOR * delta;
    let ps = p.min(q) - 1;
    let hemi = IngredientMetric::hemisphere_stand_in(n, STAND_IN_EXCESS);
    check_floor(&hemi, n, grid)?;
    let mut asm = Assembly::new(Provenance {
        delta: Some(delta),
        d: Some(0.0),
        j: Some(j),
        kappa: Some(nn),
        n: Some(n),
        p: Some(p),
        q: Some(q),
    });
    let mut cert = new_cert("cor-t", opts);
    let sphere_vol = unit_sphere_volume(n) * rho.powi(n as i32);
    let ball_vol = round_ball_volume(n, rho, r_ball)?;
    let hemi_port;
    let realization;
    if ps >= 1 {
        let model = AmbientModel::great_sphere_tube(ps, n - ps, rho);
        let handle = surgery_handle(&model, delta, grid)?;
        if !(r_ball + handle.r0 < FRAC_PI_2 * rho) {
            return Err(NeckError::InfeasibleBudget("tube and gluing ball overlap".into()));
        }
        let body = body_minus_tube(&model, handle.r0, grid)?;
        let surgery_port =
            profile_port(&body, 1).ok_or_else(|| NeckError::InvalidProfile("tube boundary degenerated".into()))?;
        let region = ModelRegion {
            description: format!("S^{n}({rho}) minus a tube around a great S^{ps} and a ball on the dual sphere"),
            dim: n,
            volume: volume(&body)? - ball_vol,
            min_r: kappa,
            ports: vec![surgery_port, ball_port(n, rho, r_ball)?],
        };
        asm.add(Piece::from_region(Role::Body, "round body", region));
        let surgery_floor = kappa - delta;
        let handle_min = handle.pieces.iter().map(|x| x.min_r).fold(f64::INFINITY, f64::min);
        let mut pieces = handle.pieces.into_iter();
        let neck = asm.add(pieces.next().expect("handle has a neck"));
        asm.join(PortRef { piece: 0, port: 0 }, PortRef::start(neck))?;
        for x in pieces {
            asm.push_chain(x)?;
        }
        cert.claim(
            "surgery_budget",
            "min R(neck, collar, cap) > kappa - delta",
            handle_min,
            Relation::Gt,
            surgery_floor,
        );
        hemi_port = PortRef { piece: 0, port: 1 };
        realization = format!("surgery on a great S^{ps} in S^{n}({rho})");
    } else {
        let region = ModelRegion {
            description: format!("S^{n}({rho}) minus three disjoint balls"),
            dim: n,
            volume: sphere_vol - 3.0 * ball_vol,
            min_r: kappa,
            ports: vec![ball_port(n, rho, r_ball)?; 3],
        };
        if !(2.0 * r_ball < FRAC_PI_2 * rho) {
            return Err(NeckError::InfeasibleBudget("gluing balls overlap".into()));
        }
        asm.add(Piece::from_region(Role::Body, "round body", region));
        let selft = tunnel_pieces(&TunnelParams::symmetric(delta, 0.0, j, kappa, n)?)?;
        let mut pieces = selft.pieces.into_iter();
        let first = asm.add(pieces.next().expect("a tunnel has pieces"));
        asm.join(PortRef { piece: 0, port: 0 }, PortRef::start(first))?;
        for x in pieces {
            asm.push_chain(x)?;
        }
        let last = asm.pieces.len() - 1;
        asm.join(PortRef::end(last), PortRef { piece: 0, port: 1 })?;
        cert.claim(
            "surgery_budget",
            "min R(self-tunnel) > kappa - 1/j",
            selft.report.min_r,
            Relation::Gt,
            selft.report.floor,
        );
        tunnel_constants(&mut cert, "self_tunnel_", &selft.report);
        hemi_port = PortRef { piece: 0, port: 2 };
        realization = format!(
            "S^{n}({rho}) with a tunnel between two of its balls (S^1 x S^{})",
            n - 1
        );
    }
    let att = attach_hemisphere(&mut asm, hemi_port, rho, &hemi, 0.0, j, delta, Some(nn), grid)?;
    asm.provenance.j = Some(att.j);

    let tail = chain_diameter(&profiles_in(&asm, att.first..asm.pieces.len()))?;
    let all = chain_diameter(&profiles_in(&asm, 0..asm.pieces.len()))?;
    let diameter = DiameterBounds {
        lower: tail.lower,
        upper: all.upper + PI * rho,
    };
    cert.claim(
        "product_metric_floor",
        "recomputed min R of the product metric > n(n-1)",
        recomputed,
        Relation::Gt,
        nn,
    );
    cert.claim(
        "product_metric_closed_form",
        "|recomputed - closed form| / closed form <= floor recompute tolerance",
        (recomputed - closed).abs() / closed,
        Relation::Le,
        cert.tolerances.floor_recompute,
    );
    cert.claim("min_r", "min R(N) > n(n-1)", asm.min_r(), Relation::Gt, nn);
    cert.claim("diameter", "diam lower bound >= D", diameter.lower, Relation::Ge, 0.0);
    boundary_claims(&mut cert, &asm, &hemi, grid)?;
    common_claims(&mut cert, &asm, &att, nn);
    cert.diameter = Some(diameter);
    for (k, v) in [
        ("p", p as f64),
        ("q", q as f64),
        ("n", n as f64),
        ("j", j),
        ("delta", delta),
        ("j_effective", att.j),
    ] {
        cert.param(k, v);
    }
    cert.symbol("D", 0.0);
    cert.symbol("omega_n", unit_sphere_volume(n));
    cert.constant("product_metric_radius", r_h);
    cert.constant("product_metric_floor", recomputed);
    cert.constant("product_metric_floor_closed_form", closed);
    cert.constant("realization_radius", rho);
    tunnel_constants(&mut cert, "tunnel_", &att.tunnel);
    cert.provenance.ingredients = vec![hemi.record()];
    cert.notes
        .push("the manifold glued to the hemisphere is the product S^p x S^q (not the connected sum S^p # S^q)".into());
    cert.notes.push(format!(
        "the product metric with radius {r_h:.12e} has R = {recomputed:.12e} > n(n-1), so no radius sweep was needed"
    ));
    cert.notes.push(format!(
        "the product is realized rotationally symmetrically as {realization}; its R floor comes from that metric"
    ));
    cert.notes
        .push("the diameter upper bound adds pi * realization radius for the round body".into());
    stand_in_notes(&mut cert, &hemi, att.rho);
    seal(cert, asm)
}

/// Smallest `m >= 2` with `floor(m / 2) ω_n > V`.
pub fn spheres_needed(v: f64, n: usize) -> usize {
    let omega = unit_sphere_volume(n);
    let mut m = 2;
    while ((m / 2) as f64) * omega <= v {
        m += 1;
    }
    m
}

/// The volume corollary: `m` unit spheres chained by tunnels, then the
/// hemisphere, with total volume at least `V`.
pub fn pipeline_cor_v(v: f64, n: usize, j: f64, delta: f64, opts: &PipelineOptions) -> Result<PipelineRun> {
    check_positive("V", v)?;
    check_positive("delta", delta)?;
    let grid = &opts.grid;
    let nn = einstein(n);
    let omega = unit_sphere_volume(n);
    let m = spheres_needed(v, n);
    let r0 = START_RADIUS_FACTOR * delta;
    let unit = IngredientMetric::round_sphere(n, 1.0);
    let hemi = IngredientMetric::hemisphere_stand_in(n, STAND_IN_EXCESS);
    check_floor(&hemi, n, grid)?;
    let link = tunnel_pieces(&TunnelParams::symmetric(delta, 0.0, j, nn, n)?)?;

    let mut asm = Assembly::new(Provenance {
        delta: Some(delta),
        d: Some(0.0),
        j: Some(j),
        kappa: Some(nn),
        n: Some(n),
        p: Some(0),
        q: Some(n),
    });
    asm.add(Piece::from_profile(
        Role::Body,
        "sphere 1",
        unit.trimmed(r0, grid)?.reversed(),
    )?);
    let annulus = unit.annulus(r0, grid)?;
    for i in 2..=m {
        for p in &link.pieces {
            asm.push_chain(p.clone())?;
        }
        asm.push_chain(Piece::from_profile(Role::Body, format!("sphere {i}"), annulus.clone())?)?;
    }
    let last_sphere = asm.pieces.len() - 1;
    let att = attach_hemisphere(
        &mut asm,
        PortRef::end(last_sphere),
        1.0,
        &hemi,
        0.0,
        j,
        delta,
        None,
        grid,
    )?;

    let total = asm.volume();
    let tunnels: f64 = asm
        .pieces
        .iter()
        .filter(|p| p.role != Role::Body)
        .map(|p| p.volume)
        .sum();
    let balls = (2 * m - 1) as f64 * round_ball_volume(n, 1.0, r0)? + round_ball_volume(n, att.rho, r0)?;
    let models = m as f64 * omega + hemi.volume;
    let slack = VOLUME_RTOL * models;
    let gluings = m as f64;
    let diameter = chain_diameter(&profiles_in(&asm, 0..asm.pieces.len()))?;

    let mut cert = new_cert("cor-v", opts);
    cert.claim("volume", "vol(N) >= V", total, Relation::Ge, v);
    cert.claim(
        "sphere_count",
        "floor(m/2) * omega_n > V",
        ((m / 2) as f64) * omega,
        Relation::Gt,
        v,
    );
    cert.claim(
        "min_r",
        "min R(N) > n(n-1) - k/j with k = m gluings",
        asm.min_r(),
        Relation::Gt,
        nn - gluings / att.j,
    );
    cert.claim(
        "volume_additivity_lower",
        "vol(N) >= sum of model volumes - removed balls - quadrature slack",
        total,
        Relation::Ge,
        models - balls - slack,
    );
    cert.claim(
        "volume_additivity_upper",
        "vol(N) <= sum of model volumes + tunnel volumes + quadrature slack",
        total,
        Relation::Le,
        models + tunnels + slack,
    );
    boundary_claims(&mut cert, &asm, &hemi, grid)?;
    cert.claim(
        "link_tunnel_budget",
        "min R(sphere-to-sphere tunnel) > n(n-1) - 1/j",
        link.report.min_r,
        Relation::Gt,
        link.report.floor,
    );
    common_claims(&mut cert, &asm, &att, nn - gluings / att.j);
    cert.diameter = Some(diameter);
    for (k, x) in [("V", v), ("n", n as f64), ("j", j), ("delta", delta)] {
        cert.param(k, x);
    }
    cert.symbol("V", v);
    cert.symbol("omega_n", omega);
    cert.symbol("m", m as f64);
    cert.constant("tunnel_volume_total", tunnels);
    cert.constant("removed_ball_volume", balls);
    tunnel_constants(&mut cert, "link_", &link.report);
    cert.provenance.ingredients = vec![unit.record(), hemi.record()];
    stand_in_notes(&mut cert, &hemi, att.rho);
    seal(cert, asm)
}

/// Round hemisphere stand-in whose volume deficit fits the `ε` budget:
/// `R = n(n-1)(1 + 3ε^n / n)`, so `ω_n/2 - vol ≈ (3/4) ω_n ε^n`.
pub fn main_b_stand_in(n: usize, eps: f64) -> IngredientMetric {
    IngredientMetric::hemisphere_stand_in(n, 3.0 * eps.powi(n as i32) / n as f64)
}

/// Checks the volume inequality chain for a hemisphere glued to a small
/// round sphere of radius `10 ε` through a long thin tunnel.
///
/// `delta = None` uses `ε / 2`.
pub fn verify_main_b_budget(
    hemisphere: Option<&IngredientMetric>,
    eps: f64,
    d_target: f64,
    n: usize,
    delta: Option<f64>,
    j: f64,
    opts: &PipelineOptions,
) -> Result<PipelineRun> {
    let hemi = hemisphere
        .ok_or_else(|| NeckError::MissingIngredient("an external hemisphere certificate is required".into()))?;
    check_positive("epsilon", eps)?;
    let delta = delta.unwrap_or(0.5 * eps);
    if !(delta > 0.0 && delta < eps) {
        return Err(NeckError::InvalidParameter(format!(
            "need 0 < delta < epsilon (delta = {delta})"
        )));
    }
    if !(d_target >= 0.0 && d_target.is_finite()) {
        return Err(NeckError::InvalidParameter(format!("D = {d_target} must be >= 0")));
    }
    if !hemi.is_hemisphere() {
        return Err(NeckError::InvalidParameter(format!("{} has no boundary", hemi.name)));
    }
    let grid = &opts.grid;
    let nn = einstein(n);
    let omega = unit_sphere_volume(n);
    let eps_n = eps.powi(n as i32);
    let floor_h = check_floor(hemi, n, grid)?;
    let vol_gap = (hemi.volume - 0.5 * omega).abs();
    if !(vol_gap < omega * eps_n) {
        return Err(NeckError::InvalidParameter(format!(
            "|vol(H) - omega_n/2| = {vol_gap:e} is not below omega_n eps^n = {:e}",
            omega * eps_n
        )));
    }
    let eta = 10.0 * eps;
    let small = IngredientMetric::round_sphere(n, eta);
    let r0 = START_RADIUS_FACTOR * delta;

    let mut asm = Assembly::new(Provenance {
        delta: Some(delta),
        d: Some(d_target),
        j: Some(j),
        kappa: Some(nn),
        n: Some(n),
        p: Some(0),
        q: Some(n),
    });
    asm.add(Piece::from_profile(
        Role::Body,
        "small sphere",
        small.trimmed(r0, grid)?.reversed(),
    )?);
    let att = attach_hemisphere(&mut asm, PortRef::end(0), eta, hemi, d_target, j, delta, Some(nn), grid)?;
    asm.provenance.j = Some(att.j);

    let v_s = asm.pieces[0].volume;
    let v_h = asm.pieces[att.hemisphere].volume;
    let v_t: f64 = asm.pieces[att.first..att.hemisphere].iter().map(|p| p.volume).sum();
    let v_n = asm.volume();
    let v_h_closed = hemi.volume - round_ball_volume(n, att.rho, r0)?;
    let half = 0.5 * omega;
    let big = 10f64.powi(n as i32);
    let c = (v_t + (big + 2.0) * omega * eps_n) / eps.powi(n as i32 - 1);
    let diameter = chain_diameter(&profiles_in(&asm, 0..asm.pieces.len()))?;
    let rtol = cert_rtol();

    let mut cert = new_cert("main-b-budget", opts);
    cert.claim(
        "precondition_volume",
        "|vol(H) - omega_n/2| < omega_n eps^n",
        vol_gap,
        Relation::Lt,
        omega * eps_n,
    );
    cert.claim(
        "hemisphere_floor",
        "certified R floor of H > n(n-1)",
        hemi.certified_r_floor,
        Relation::Gt,
        nn,
    );
    cert.claim(
        "link_1",
        "omega_n/2 <= vol(H minus B) + 2 omega_n eps^n",
        half,
        Relation::Le,
        v_h + 2.0 * omega * eps_n,
    );
    cert.claim(
        "link_2",
        "vol(H minus B) + 2 omega_n eps^n <= vol(H minus B) + vol(T) + (10^n - 1) omega_n eps^n",
        v_h + 2.0 * omega * eps_n,
        Relation::Le,
        v_h + v_t + (big - 1.0) * omega * eps_n,
    );
    cert.claim(
        "link_3",
        "vol(H minus B) + vol(T) + (10^n - 1) omega_n eps^n <= vol(N)",
        v_h + v_t + (big - 1.0) * omega * eps_n,
        Relation::Le,
        v_n,
    );
    cert.claim(
        "link_4",
        "|vol(N) - (vol(H minus B) + vol(T) + vol(S_eta minus B))| <= rtol vol(N)",
        (v_n - (v_h + v_t + v_s)).abs(),
        Relation::Le,
        rtol * v_n,
    );
    cert.claim(
        "link_5",
        "vol(N) <= omega_n/2 + C eps^(n-1)",
        v_n,
        Relation::Le,
        half + c * eps.powi(n as i32 - 1),
    );
    cert.claim(
        "trimmed_hemisphere_volume",
        "|vol(H minus B) - (vol(H) - vol(B))| <= rtol vol(H minus B)",
        (v_h - v_h_closed).abs(),
        Relation::Le,
        rtol * v_h,
    );
    cert.claim(
        "diameter",
        "diam lower bound > D",
        diameter.lower,
        Relation::Gt,
        d_target,
    );
    cert.claim("min_r", "min R(N) > n(n-1)", asm.min_r(), Relation::Gt, nn);
    boundary_claims(&mut cert, &asm, hemi, grid)?;
    common_claims(&mut cert, &asm, &att, nn);
    cert.diameter = Some(diameter);
    for (k, x) in [
        ("epsilon", eps),
        ("D", d_target),
        ("n", n as f64),
        ("delta", delta),
        ("eta", eta),
        ("j", j),
        ("j_effective", att.j),
    ] {
        cert.param(k, x);
    }
    cert.symbol("D", d_target);
    cert.symbol("omega_n", omega);
    cert.constant("C", c);
    cert.constant("volume_excess", v_n - half);
    cert.constant("vol_tunnel", v_t);
    cert.constant("vol_small_sphere_trimmed", v_s);
    cert.constant("vol_hemisphere_trimmed", v_h);
    cert.constant("hemisphere_floor_recomputed", floor_h);
    tunnel_constants(&mut cert, "tunnel_", &att.tunnel);
    let mut rec = hemi.record();
    if !matches!(hemi.source, IngredientSource::ExternalTrusted { .. }) {
        rec.source = format!("EXTERNAL-TRUSTED slot filled by {}", rec.source);
    }
    cert.provenance.ingredients = vec![rec, small.record()];
    cert.notes.push(
        "the hemisphere ingredient is trusted as supplied; only its recorded floor and volume are rechecked".into(),
    );
    cert.notes
        .push("C eps^(n-1) = vol(T) + (10^n + 2) omega_n eps^n is built from the measured tunnel volume".to_string());
    stand_in_notes(&mut cert, hemi, att.rho);
    seal(cert, asm)
}

fn cert_rtol() -> f64 {
    10.0 * VOLUME_RTOL
}

/// Certificate for a standalone tunnel.
pub fn tunnel_certificate(params: &TunnelParams, opts: &PipelineOptions) -> Result<PipelineRun> {
    let mut params = params.clone();
    params.grid = opts.grid;
    let (asm, rep) = crate::assembly::build_tunnel_with(&params)?;
    let mut cert = new_cert("tunnel", opts);
    cert.claim(
        "min_r",
        "min R(T) > min kappa - 1/j",
        rep.min_r,
        Relation::Gt,
        rep.floor,
    );
    cert.claim(
        "diameter",
        "diam lower bound > d",
        rep.diameter.lower,
        Relation::Gt,
        params.d,
    );
    cert.claim(
        "junction_mismatch",
        "max scale-free jet mismatch over junctions <= jet tolerance",
        rep.max_jet_mismatch,
        Relation::Le,
        JET_TOL,
    );
    let tol = cert.tolerances.isometry;
    cert.claim(
        "end_isometry",
        "max gap between tunnel ends and the ambient annuli <= isometry tolerance",
        rep.end_isometry_error,
        Relation::Le,
        tol,
    );
    cert.floor = rep.floor;
    cert.diameter = Some(rep.diameter);
    for (k, x) in [
        ("n", params.n() as f64),
        ("kappa_left", params.left.kappa),
        ("kappa_right", params.right.kappa),
        ("delta_left", params.left.delta),
        ("delta_right", params.right.delta),
        ("d", params.d),
        ("j", params.j),
    ] {
        cert.param(k, x);
    }
    cert.symbol("D", params.d);
    cert.symbol("omega_n", unit_sphere_volume(params.n()));
    tunnel_constants(&mut cert, "", &rep);
    cert.constant("stretch_left", rep.stretch.0);
    cert.constant("stretch_right", rep.stretch.1);
    seal(cert, asm)
}

/// Certificate for a surgery on `model` with tube radius `delta`.
pub fn surgery_certificate(model: &AmbientModel, delta: f64, j: f64, opts: &PipelineOptions) -> Result<PipelineRun> {
    let (asm, rep) = perform_surgery(model, delta, j, &opts.grid)?;
    let before = model_volume(model)?;
    let mut cert = new_cert("surgery", opts);
    cert.claim("min_r", "min R(N) > kappa - delta", rep.min_r, Relation::Gt, rep.floor);
    cert.claim(
        "volume_lower",
        "vol(N) >= (1 - delta) vol(M)",
        rep.volume_after,
        Relation::Ge,
        (1.0 - delta) * before,
    );
    cert.claim(
        "volume_upper",
        "vol(N) <= (1 + delta) vol(M)",
        rep.volume_after,
        Relation::Le,
        (1.0 + delta) * before,
    );
    cert.claim(
        "junction_mismatch",
        "max scale-free jet mismatch over junctions <= jet tolerance",
        rep.max_jet_mismatch,
        Relation::Le,
        JET_TOL,
    );
    cert.floor = rep.floor;
    cert.diameter = chain_diameter(&profiles_in(&asm, 0..asm.pieces.len())).ok();
    for (k, x) in [
        ("n", model.n as f64),
        ("p", model.p as f64),
        ("q", model.q as f64),
        ("delta", delta),
        ("j", j),
        ("kappa", rep.kappa),
    ] {
        cert.param(k, x);
    }
    cert.symbol("omega_n", unit_sphere_volume(model.n));
    cert.constant("volume_before", before);
    cert.constant("relative_volume_change", rep.relative_volume_change);
    cert.constant("stretch", rep.stretch);
    cert.constant("cap_fiber_radius", rep.cap_fiber_radius);
    cert.notes.push(format!("ambient model: {:?}", model.kind));
    seal(cert, asm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_count() {
        assert_eq!(spheres_needed(6.0 * PI * PI, 3), 8);
        assert_eq!(spheres_needed(1.0, 3), 2);
    }

    #[test]
    fn product_floor_values() {
        let g = GridSpec::default();
        let r = product_metric_radius(3);
        let f = product_floor(1, 2, r, &g).unwrap();
        assert!((f - 24.0).abs() < 1e-6, "{f}");
        let f = product_floor(2, 2, product_metric_radius(4), &g).unwrap();
        assert!((f - 4.0 * 24.0).abs() < 1e-6, "{f}");
    }
}
