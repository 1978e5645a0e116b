//! Bending-curve design by a curvature control law.
//!
//! `R^Σ` is affine in the geodesic curvature `k`: `R = A(θ, r) + B(θ, r) k`
//! with `B < 0` once `θ > 0`. The designer integrates
//! `θ' = k, r' = -cos θ, t' = sin θ` with
//!
//! ```text
//! k = ramp(s) · 1 / (1/k_allow + r/β),   k_allow = (A - floor) / (-B)
//! ```
//!
//! where `floor = κ - σδ`. The harmonic cap `β/r` keeps the step count
//! logarithmic in the radius ratio. Once `θ` is within `Δθ` of the target the
//! curvature is tapered to zero by a septic smoothstep, which lands exactly on
//! the target angle, and a straight final segment follows. Every accepted
//! curve is re-verified node by node through two independent formulas.

use serde::{Deserialize, Serialize};

use super::curve::{gauss_scalar_at, sigma_scalar_closed_form, BendingCurve, CurveState};
use crate::error::{NeckError, Result};
use crate::metric::model::AmbientModel;
use crate::metric::profile::GridSpec;

/// Fraction of the tube radius at which the vertical start begins.
pub const START_RADIUS_FACTOR: f64 = 1.98;
const NODES_PER_RADIUS: f64 = 64.0;
const MAX_NODES: usize = 4_000_000;
const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDesignParams {
    /// Floor `κ` of the ambient scalar curvature near the core.
    pub kappa: f64,
    /// Budget: the curve must keep `R^Σ > κ - delta`.
    pub delta: f64,
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub ambient: AmbientModel,
    /// Acceptance bound `C` in `length(γ) ≤ C · tube_radius`.
    pub max_length_factor: f64,
    /// Tube radius; the curve starts at `1.98 · tube_radius` and bends inside
    /// `tube_radius`. Defaults to `delta`.
    pub tube_radius: Option<f64>,
    /// Final angle; `π/2` for a neck, `0` for the degenerate straight curve.
    pub target_angle: f64,
    pub grid: GridSpec,
}

impl CurveDesignParams {
    /// Parameters for a neck in `ambient` with floor `kappa` and budget `delta`.
    pub fn new(ambient: AmbientModel, kappa: f64, delta: f64) -> Self {
        Self {
            kappa,
            delta,
            p: ambient.p,
            q: ambient.q,
            n: ambient.n,
            ambient,
            max_length_factor: 4.0,
            tube_radius: None,
            target_angle: std::f64::consts::FRAC_PI_2,
            grid: GridSpec::default(),
        }
    }

    pub fn with_tube_radius(mut self, r: f64) -> Self {
        self.tube_radius = Some(r);
        self
    }

    pub fn tube(&self) -> f64 {
        self.tube_radius.unwrap_or(self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        self.ambient.validate()?;
        if !(self.delta > 0.0) || !self.kappa.is_finite() {
            return Err(NeckError::InvalidParameter(format!(
                "need delta > 0 and finite kappa (delta = {}, kappa = {})",
                self.delta, self.kappa
            )));
        }
        if self.q < 3 {
            return Err(NeckError::CodimensionTooSmall { q: self.q });
        }
        if self.p + self.q != self.n || (self.p, self.q, self.n) != (self.ambient.p, self.ambient.q, self.ambient.n) {
            return Err(NeckError::InvalidParameter(
                "dimensions disagree with the ambient model".into(),
            ));
        }
        let ambient_kappa = self.ambient.kappa();
        if self.kappa > ambient_kappa * (1.0 + 1e-12) + 1e-12 {
            return Err(NeckError::InvalidParameter(format!(
                "requested floor {} exceeds the ambient scalar curvature {ambient_kappa}",
                self.kappa
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.target_angle) {
            return Err(NeckError::InvalidParameter("target angle must lie in [0, π/2]".into()));
        }
        if !(self.max_length_factor > 0.0) {
            return Err(NeckError::InvalidParameter("max_length_factor must be positive".into()));
        }
        let tube = self.tube();
        if !(tube > 0.0) {
            return Err(NeckError::InvalidParameter("tube radius must be positive".into()));
        }
        self.ambient.check_radius(START_RADIUS_FACTOR * tube)
    }
}

/// Verification record of a designed curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub floor: f64,
    pub budget: f64,
    pub tube_radius: f64,
    pub length: f64,
    /// `length / tube_radius`.
    pub achieved_c: f64,
    pub eta: f64,
    pub min_r_closed_form: f64,
    pub min_r_gauss: f64,
    /// Largest relative gap between the Gauss and closed-form evaluations.
    pub gauss_discrepancy: f64,
    pub unit_speed_defect: f64,
    pub curvature_consistency: f64,
    pub grid_nodes: usize,
    pub attempts: usize,
    pub sigma: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDesign {
    pub curve: BendingCurve,
    pub report: DesignReport,
}

/// `C^∞` step from 0 (x ≤ 0) to 1 (x ≥ 1).
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Septic smoothstep and its antiderivative (`∫_0^1 = 1/2`).
fn septic(u: f64) -> (f64, f64) {
    let u = u.clamp(0.0, 1.0);
    let u4 = u.powi(4);
    let s = u4 * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
    let i = u4 * u * (7.0 - 14.0 * u + 10.0 * u * u - 2.5 * u * u * u);
    (s, i)
}

struct Law<'a> {
    model: &'a AmbientModel,
    floor: f64,
    beta: f64,
    ramp_start: f64,
    ramp_len: f64,
}

impl Law<'_> {
    fn k(&self, s: f64, theta: f64, r: f64) -> f64 {
        let ramp = smooth_step((s - self.ramp_start) / self.ramp_len);
        if ramp == 0.0 {
            return 0.0;
        }
        let st = |k| CurveState { s, theta, k, t: 0.0, r };
        let a = sigma_scalar_closed_form(self.model, &st(0.0));
        let b = sigma_scalar_closed_form(self.model, &st(1.0)) - a;
        let inv_allow = if b < 0.0 {
            let slack = (a - self.floor).max(0.0);
            if slack == 0.0 {
                return 0.0;
            }
            -b / slack
        } else {
            0.0
        };
        ramp / (inv_allow + r / self.beta)
    }
}

struct Builder {
    s: Vec<f64>,
    theta: Vec<f64>,
    k: Vec<f64>,
    k_mid: Vec<f64>,
    t: Vec<f64>,
    r: Vec<f64>,
}

impl Builder {
    fn push(&mut self, s: f64, theta: f64, k: f64, t: f64, r: f64, k_mid_prev: f64) {
        if !self.s.is_empty() {
            self.k_mid.push(k_mid_prev);
        }
        self.s.push(s);
        self.theta.push(theta);
        self.k.push(k);
        self.t.push(t);
        self.r.push(r);
    }

    fn last(&self) -> (f64, f64, f64, f64, f64) {
        let i = self.s.len() - 1;
        (self.s[i], self.theta[i], self.k[i], self.t[i], self.r[i])
    }

    fn check_size(&self) -> Result<()> {
        if self.s.len() > MAX_NODES {
            return Err(NeckError::InfeasibleBudget(format!(
                "curve needs more than {MAX_NODES} nodes"
            )));
        }
        Ok(())
    }

    fn finish(self) -> BendingCurve {
        BendingCurve {
            s: self.s,
            theta: self.theta,
            k: self.k,
            k_mid: self.k_mid,
            t: self.t,
            r: self.r,
        }
    }
}

/// Straight segment from radius `r0` toward the core (`θ ≡ 0`).
pub fn vertical_curve(r0: f64, r1: f64, nodes: usize) -> Result<BendingCurve> {
    if !(r0 > r1 && r1 > 0.0) || nodes < 8 {
        return Err(NeckError::InvalidParameter(
            "need r0 > r1 > 0 and at least 8 nodes".into(),
        ));
    }
    let s: Vec<f64> = crate::metric::spline::uniform_nodes(0.0, r0 - r1, nodes);
    let n = s.len();
    Ok(BendingCurve {
        r: s.iter().map(|x| r0 - x).collect(),
        theta: vec![0.0; n],
        k: vec![0.0; n],
        k_mid: vec![0.0; n - 1],
        t: vec![0.0; n],
        s,
    })
}

/// Straight segment at constant radius `eta` (`θ ≡ π/2`).
pub fn horizontal_curve(eta: f64, length: f64, nodes: usize) -> Result<BendingCurve> {
    if !(eta > 0.0 && length > 0.0) || nodes < 8 {
        return Err(NeckError::InvalidParameter(
            "need eta > 0, length > 0, at least 8 nodes".into(),
        ));
    }
    let s: Vec<f64> = crate::metric::spline::uniform_nodes(0.0, length, nodes);
    let n = s.len();
    Ok(BendingCurve {
        t: s.clone(),
        theta: vec![std::f64::consts::FRAC_PI_2; n],
        k: vec![0.0; n],
        k_mid: vec![0.0; n - 1],
        r: vec![eta; n],
        s,
    })
}

fn integrate(params: &CurveDesignParams, sigma: f64, beta: f64) -> Result<BendingCurve> {
    let model = &params.ambient;
    let tube = params.tube();
    let r0 = START_RADIUS_FACTOR * tube;
    let h_max = 1.0 / params.grid.density;
    let target = params.target_angle;

    if target == 0.0 {
        let n = ((r0 - 0.5 * tube) / h_max.min(tube / NODES_PER_RADIUS)).ceil() as usize + 1;
        return vertical_curve(r0, 0.5 * tube, n.max(params.grid.min_nodes));
    }

    let mut b = Builder {
        s: Vec::new(),
        theta: Vec::new(),
        k: Vec::new(),
        k_mid: Vec::new(),
        t: Vec::new(),
        r: Vec::new(),
    };

    // Vertical start from r0 down to the tube radius.
    let vert_len = r0 - tube;
    let nv = ((vert_len / h_max.min(tube / NODES_PER_RADIUS)).ceil() as usize).max(16);
    for i in 0..=nv {
        let s = vert_len * i as f64 / nv as f64;
        b.push(s, 0.0, 0.0, 0.0, if i == nv { tube } else { r0 - s }, 0.0);
    }

    let law = Law {
        model,
        floor: params.kappa - sigma * params.delta,
        beta,
        ramp_start: vert_len,
        ramp_len: 0.05 * tube,
    };
    let landing = target - (0.02_f64).min(0.25 * target);
    let r_min = 1e-13 * tube;

    // Bend under the control law (RK4 in (θ, r, t)).
    loop {
        let (s, th, k, t, r) = b.last();
        if th >= landing {
            break;
        }
        if r < r_min {
            return Err(NeckError::InfeasibleBudget(format!(
                "radius fell below {r_min:e} before the curve turned (budget {} too small for tube {tube})",
                params.delta
            )));
        }
        let mut h = h_max.min(r / NODES_PER_RADIUS);
        if k > 0.0 {
            h = h.min(0.02 / k);
        }
        if s < law.ramp_start + law.ramp_len {
            h = h.min(law.ramp_len / 256.0);
        }
        let f = |s: f64, th: f64, r: f64| {
            let k = law.k(s, th, r);
            (k, -th.cos(), th.sin())
        };
        let k1 = f(s, th, r);
        let k2 = f(s + 0.5 * h, th + 0.5 * h * k1.0, r + 0.5 * h * k1.1);
        let k3 = f(s + 0.5 * h, th + 0.5 * h * k2.0, r + 0.5 * h * k2.1);
        let k4 = f(s + h, th + h * k3.0, r + h * k3.1);
        let th_n = th + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        let r_n = r + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let t_n = t + h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
        if !(r_n > 0.0) || model.check_radius(r_n).is_err() {
            return Err(NeckError::InfeasibleBudget("curve left the model tube".into()));
        }
        let s_n = s + h;
        let k_n = law.k(s_n, th_n, r_n);
        // Midpoint curvature evaluated on the Hermite-interpolated state.
        let th_m = 0.5 * (th + th_n) + h / 8.0 * (k - k_n);
        let r_m = 0.5 * (r + r_n) + h / 8.0 * (-th.cos() + th_n.cos());
        let k_m = law.k(s + 0.5 * h, th_m, r_m);
        b.push(s_n, th_n, k_n, t_n, r_n, k_m);
        b.check_size()?;
    }

    // Taper: k = k_L (1 - S(u)), θ known in closed form.
    let (s_l, th_l, k_l, _, _) = b.last();
    if !(k_l > 0.0) {
        return Err(NeckError::InfeasibleBudget("curvature vanished before landing".into()));
    }
    let ell = 2.0 * (target - th_l) / k_l;
    let theta_at = |x: f64| {
        let u = (x / ell).clamp(0.0, 1.0);
        let (_, i) = septic(u);
        if u >= 1.0 {
            target
        } else {
            th_l + k_l * ell * (u - i)
        }
    };
    let k_at = |x: f64| k_l * (1.0 - septic(x / ell).0);
    let mut x = 0.0;
    while x < ell {
        let (_, _, _, t, r) = b.last();
        let mut h = h_max.min(r / NODES_PER_RADIUS).min(ell / 128.0);
        let last = x + h > ell - 1e-3 * h;
        if last {
            h = ell - x;
        }
        let (c0, cm, c1) = (theta_at(x).cos(), theta_at(x + 0.5 * h).cos(), theta_at(x + h).cos());
        let (s0, sm, s1) = (theta_at(x).sin(), theta_at(x + 0.5 * h).sin(), theta_at(x + h).sin());
        let r_n = r - h / 6.0 * (c0 + 4.0 * cm + c1);
        let t_n = t + h / 6.0 * (s0 + 4.0 * sm + s1);
        let x_n = if last { ell } else { x + h };
        let (th_n, k_n) = if x_n >= ell {
            (target, 0.0)
        } else {
            (theta_at(x_n), k_at(x_n))
        };
        b.push(s_l + x_n, th_n, k_n, t_n, r_n, k_at(x + 0.5 * h));
        b.check_size()?;
        x = x_n;
    }

    // Straight final segment.
    let (s_e, _, _, t_e, r_e) = b.last();
    let final_len = r_e;
    let nf = 64;
    let (sin, cos) = if target == std::f64::consts::FRAC_PI_2 {
        (1.0, 0.0)
    } else {
        target.sin_cos()
    };
    for i in 1..=nf {
        let x = final_len * i as f64 / nf as f64;
        b.push(s_e + x, target, 0.0, t_e + sin * x, r_e - cos * x, 0.0);
    }
    Ok(b.finish())
}

/// Verifies a curve against `R^Σ > floor` through both the Gauss equation and
/// the closed form. Returns `(min closed, min gauss, max relative gap)`.
pub fn verify_curve(curve: &BendingCurve, model: &AmbientModel) -> (f64, f64, f64) {
    let mut min_c = f64::INFINITY;
    let mut min_g = f64::INFINITY;
    let mut gap: f64 = 0.0;
    for i in 0..curve.len() {
        let st = curve.node(i);
        let c = sigma_scalar_closed_form(model, &st);
        let g = gauss_scalar_at(model, &st);
        min_c = min_c.min(c);
        min_g = min_g.min(g);
        gap = gap.max((c - g).abs() / c.abs().max(1.0));
    }
    (min_c, min_g, gap)
}

/// Designs and certifies a bending curve, retrying with a stricter control
/// law before giving up with [`NeckError::InfeasibleBudget`].
pub fn design_bending_curve(params: &CurveDesignParams) -> Result<CurveDesign> {
    params.validate()?;
    let floor = params.kappa - params.delta;
    let tube = params.tube();
    let (mut sigma, mut beta) = (0.5, 4.0);
    let mut last_err = String::new();
    for attempt in 1..=MAX_ATTEMPTS {
        match integrate(params, sigma, beta) {
            Ok(curve) => {
                let (min_c, min_g, gap) = verify_curve(&curve, &params.ambient);
                let length = curve.length();
                let achieved_c = length / tube;
                let eta = curve.eta();
                let ok_r = min_c > floor && min_g > floor;
                let ok_len = achieved_c <= params.max_length_factor;
                let ok_eta = eta < tube;
                if ok_r && ok_len && ok_eta {
                    let report = DesignReport {
                        floor,
                        budget: params.delta,
                        tube_radius: tube,
                        length,
                        achieved_c,
                        eta,
                        min_r_closed_form: min_c,
                        min_r_gauss: min_g,
                        gauss_discrepancy: gap,
                        unit_speed_defect: curve.unit_speed_defect(),
                        curvature_consistency: curve.curvature_consistency(),
                        grid_nodes: curve.len(),
                        attempts: attempt,
                        sigma,
                        beta,
                    };
                    return Ok(CurveDesign { curve, report });
                }
                last_err = format!(
                    "attempt {attempt}: min R {min_c:.6e} (floor {floor:.6e}), C = {achieved_c:.3} (max {}), eta = {eta:.3e}",
                    params.max_length_factor
                );
            }
            Err(NeckError::InfeasibleBudget(msg)) => last_err = msg,
            Err(e) => return Err(e),
        }
        sigma *= 0.5;
        beta *= 0.7;
    }
    Err(NeckError::InfeasibleBudget(last_err))
}

/// Plot-ready CSV: `s,theta,k,t,r,R_sigma`.
pub fn curve_to_csv(curve: &BendingCurve, model: &AmbientModel) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("s,theta,k,t,r,R_sigma\n");
    for i in 0..curve.len() {
        let st = curve.node(i);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            st.s,
            st.theta,
            st.k,
            st.t,
            st.r,
            sigma_scalar_closed_form(model, &st)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn septic_integral() {
        assert_eq!(septic(1.0), (1.0, 0.5));
        assert_eq!(septic(0.0), (0.0, 0.0));
        let (s, _) = septic(0.5);
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn round_model_neck() {
        let model = AmbientModel::round_sphere(3, 1.0);
        let d = design_bending_curve(&CurveDesignParams::new(model, 6.0, 0.1)).unwrap();
        let c = &d.curve;
        assert!(d.report.min_r_closed_form > 5.9);
        assert!(c.is_theta_monotone() && c.is_r_monotone());
        assert!(c.vertical_prefix() > 0.0 && c.terminal_suffix() > 0.0);
        assert_eq!(c.theta[c.len() - 1], std::f64::consts::FRAC_PI_2);
        assert!(c.eta() < 0.1);
        assert!(d.report.gauss_discrepancy < 1e-10);
        let worst = (0..c.len() - 1)
            .max_by(|&i, &j| {
                let e = |i: usize| {
                    let h = c.s[i + 1] - c.s[i];
                    (c.theta[i + 1] - c.theta[i] - h / 6.0 * (c.k[i] + 4.0 * c.k_mid[i] + c.k[i + 1])).abs()
                };
                e(i).partial_cmp(&e(j)).unwrap()
            })
            .unwrap();
        assert!(
            c.curvature_consistency() < 1e-8,
            "{} at node {worst} of {} (s = {}, theta = {}, k = {})",
            c.curvature_consistency(),
            c.len(),
            c.s[worst],
            c.theta[worst],
            c.k[worst]
        );
    }

    #[test]
    fn degenerate_target() {
        let model = AmbientModel::round_sphere(3, 1.0);
        let mut p = CurveDesignParams::new(model, 6.0, 0.1);
        p.target_angle = 0.0;
        let d = design_bending_curve(&p).unwrap();
        assert!(d.curve.theta.iter().all(|&t| t == 0.0));
        assert!((d.report.min_r_closed_form - 6.0).abs() < 1e-9);
    }
}
