use serde::{Deserialize, Serialize};

use crate::error::{NeckError, Result};
use crate::metric::curvature::doubly_scalar_at;
use crate::metric::model::{AmbientModel, Jet};
use crate::metric::profile::{DoublyWarpProfile, Profile, WarpProfile};
use crate::metric::spline::JetCurve;

/// Unit-speed plane curve `γ(s) = (t(s), r(s))` with `t' = sin θ`, `r' = -cos θ`.
///
/// `θ = 0` is the vertical direction (moving toward the core), `θ = π/2`
/// the horizontal one. Samples live on a strictly increasing, generally
/// non-uniform grid; `k_mid` holds the curvature at interval midpoints so
/// that `θ' = k` can be audited by Simpson's rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BendingCurve {
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    pub k: Vec<f64>,
    pub k_mid: Vec<f64>,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
}

/// Curve data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveState {
    pub s: f64,
    pub theta: f64,
    pub k: f64,
    pub t: f64,
    pub r: f64,
}

impl BendingCurve {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    pub fn r0(&self) -> f64 {
        self.r[0]
    }

    /// Ending radius `η = r(L)`.
    pub fn eta(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    pub fn node(&self, i: usize) -> CurveState {
        CurveState {
            s: self.s[i],
            theta: self.theta[i],
            k: self.k[i],
            t: self.t[i],
            r: self.r[i],
        }
    }

    /// State at an arbitrary `s`: cubic Hermite in `θ` (slope `k`) and in
    /// `t, r` (slopes `sin θ`, `-cos θ`); `k` is quadratic through the
    /// midpoint sample.
    pub fn state_at(&self, s: f64) -> Result<CurveState> {
        let length = self.length();
        if !(0.0..=length).contains(&s) {
            return Err(NeckError::ParameterOutOfRange { s, length });
        }
        let i = match self.s.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => return Ok(self.node(i)),
            Err(i) => i - 1,
        };
        let h = self.s[i + 1] - self.s[i];
        let u = (s - self.s[i]) / h;
        let herm = |y0: f64, d0: f64, y1: f64, d1: f64| {
            let (u2, u3) = (u * u, u * u * u);
            (2.0 * u3 - 3.0 * u2 + 1.0) * y0
                + (u3 - 2.0 * u2 + u) * h * d0
                + (-2.0 * u3 + 3.0 * u2) * y1
                + (u3 - u2) * h * d1
        };
        let (th0, th1) = (self.theta[i], self.theta[i + 1]);
        let theta = herm(th0, self.k[i], th1, self.k[i + 1]);
        let t = herm(self.t[i], th0.sin(), self.t[i + 1], th1.sin());
        let r = herm(self.r[i], -th0.cos(), self.r[i + 1], -th1.cos());
        let (k0, km, k1) = (self.k[i], self.k_mid[i], self.k[i + 1]);
        let k = k0 * 2.0 * (u - 0.5) * (u - 1.0) + km * 4.0 * u * (1.0 - u) + k1 * 2.0 * u * (u - 0.5);
        Ok(CurveState { s, theta, k, t, r })
    }

    /// Largest `|t'^2 + r'^2 - 1|` over the nodes.
    pub fn unit_speed_defect(&self) -> f64 {
        self.theta
            .iter()
            .map(|th| (th.sin().powi(2) + (-th.cos()).powi(2) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Δθ - ∫k|` over the intervals (Simpson with the midpoint sample).
    pub fn curvature_consistency(&self) -> f64 {
        (0..self.s.len() - 1)
            .map(|i| {
                let h = self.s[i + 1] - self.s[i];
                let integral = h / 6.0 * (self.k[i] + 4.0 * self.k_mid[i] + self.k[i + 1]);
                (self.theta[i + 1] - self.theta[i] - integral).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_theta_monotone(&self) -> bool {
        self.theta.windows(2).all(|w| w[1] >= w[0]) && self.k.iter().all(|&k| k >= 0.0)
    }

    pub fn is_r_monotone(&self) -> bool {
        self.r.windows(2).all(|w| w[1] <= w[0]) && self.r.iter().all(|&r| r > 0.0)
    }

    /// Length of the initial stretch with `θ ≡ 0`.
    pub fn vertical_prefix(&self) -> f64 {
        let n = self.theta.iter().take_while(|&&th| th == 0.0).count();
        if n == 0 {
            0.0
        } else {
            self.s[n - 1]
        }
    }

    /// Length of the final stretch with `θ` equal to its terminal value.
    pub fn terminal_suffix(&self) -> f64 {
        let last = self.theta[self.theta.len() - 1];
        let n = self.theta.iter().rev().take_while(|&&th| th == last).count();
        if n == 0 {
            0.0
        } else {
            self.length() - self.s[self.s.len() - n]
        }
    }
}

/// Jets in `s` of the base radius `a` and fiber radius `b` of Σ at a curve state.
pub fn sigma_jets(model: &AmbientModel, state: &CurveState) -> (Jet, Jet) {
    let (sin, cos) = state.theta.sin_cos();
    let (a, ar, arr) = model.base(state.r);
    let (b, br, brr) = model.sn(state.r);
    let aj = (a, -cos * ar, arr * cos * cos + ar * sin * state.k);
    let bj = (b, -cos * br, brr * cos * cos + br * sin * state.k);
    (aj, bj)
}

/// Closed-form scalar curvature of the induced metric at one curve state.
pub fn sigma_scalar_closed_form(model: &AmbientModel, state: &CurveState) -> f64 {
    let (a, b) = sigma_jets(model, state);
    doubly_scalar_at(model.p, model.q, a, b)
}

/// The induced metric `g_γ` on `Σ = {(t, u, v) : (t, r(v)) ∈ γ}`.
///
/// `p = 0` gives `ds² + sn(r(s))² g_{S^{q-1}}`; otherwise the base factor
/// `a(r(s))² g_{S^p}` is carried along as a doubly warped profile.
pub fn induce_sigma_metric(curve: &BendingCurve, model: &AmbientModel) -> Result<Profile> {
    model.validate()?;
    for &r in &curve.r {
        model.check_radius(r)?;
    }
    let n = curve.len();
    let mut a = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut b = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let (aj, bj) = sigma_jets(model, &curve.node(i));
        a.0.push(aj.0);
        a.1.push(aj.1);
        a.2.push(aj.2);
        b.0.push(bj.0);
        b.1.push(bj.1);
        b.2.push(bj.2);
    }
    let bjets = JetCurve::new(curve.s.clone(), b.0, b.1, b.2)?;
    if model.p == 0 {
        Ok(Profile::Warp(WarpProfile::from_jets(bjets, model.q - 1)?))
    } else {
        let ajets = JetCurve::new(curve.s.clone(), a.0, a.1, a.2)?;
        Ok(Profile::Doubly(DoublyWarpProfile::from_jets(
            ajets, bjets, model.p, model.q,
        )?))
    }
}

/// Principal curvatures of Σ ⊂ ℝ × T at parameter `s`, ordered
/// `[λ_1 = k, λ_2..λ_q (fiber), λ_{q+1}..λ_n (base)]`.
pub fn principal_curvatures_sigma(curve: &BendingCurve, model: &AmbientModel, s: f64) -> Result<Vec<f64>> {
    let st = curve.state_at(s)?;
    Ok(principal_curvatures_at(model, &st))
}

pub fn principal_curvatures_at(model: &AmbientModel, st: &CurveState) -> Vec<f64> {
    let sin = st.theta.sin();
    let (a, ar, _) = model.base(st.r);
    let (b, br, _) = model.sn(st.r);
    let mut out = Vec::with_capacity(model.n);
    out.push(st.k);
    out.extend(std::iter::repeat_n(-(br / b) * sin, model.q - 1));
    out.extend(std::iter::repeat_n(-(ar / a) * sin, model.p));
    out
}

/// `R^Σ` from the Gauss equation: ambient sectional curvatures of `ℝ × T`
/// in the principal frame plus the products `λ_i λ_j`.
pub fn gauss_scalar_at(model: &AmbientModel, st: &CurveState) -> f64 {
    let (p, m) = (model.p as f64, (model.q - 1) as f64);
    let pairs = |x: f64| x * (x - 1.0) / 2.0;
    let c2 = st.theta.cos().powi(2);
    let kc = model.tube_curvatures(st.r);
    let ambient = p * c2 * kc.radial_base
        + m * c2 * kc.radial_fiber
        + pairs(p) * kc.base_base
        + pairs(m) * kc.fiber_fiber
        + p * m * kc.base_fiber;
    let lam = principal_curvatures_at(model, st);
    let k = lam[0];
    let lf = if model.q > 1 { lam[1] } else { 0.0 };
    let lb = if model.p > 0 { lam[model.q] } else { 0.0 };
    let products = k * (p * lb + m * lf) + pairs(p) * lb * lb + pairs(m) * lf * lf + p * m * lb * lf;
    2.0 * (ambient + products)
}

pub fn gauss_scalar_reconstruction(curve: &BendingCurve, model: &AmbientModel, s: f64) -> Result<f64> {
    let st = curve.state_at(s)?;
    Ok(gauss_scalar_at(model, &st))
}
