//! Volumes by the coarea formula: integrate the fiber volume over `s`.

use super::profile::{DoublyWarpProfile, Profile, WarpProfile};
use super::spline::JetCurve;
use crate::error::{NeckError, Result};

/// Relative accuracy targeted by [`volume`].
pub const VOLUME_RTOL: f64 = 1e-6;
const MAX_DEPTH: u32 = 40;

/// Volume of the unit round `S^m`.
pub fn unit_sphere_volume(m: usize) -> f64 {
    use std::f64::consts::PI;
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * unit_sphere_volume(m - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    /// Sum of the per-panel Richardson error estimates.
    pub error: f64,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<(f64, f64)> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * tol {
        // Richardson: the extrapolated value removes the h^4 term.
        return Ok((left + right + diff / 15.0, diff.abs() / 15.0));
    }
    if depth >= MAX_DEPTH {
        return Err(NeckError::QuadratureNonConvergence { a, b });
    }
    let (l, el) = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let (r, er) = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok((l + r, el + er))
}

/// Adaptive Simpson with Richardson extrapolation, panel by panel over `knots`.
pub fn integrate_over_knots<F: Fn(f64) -> f64>(f: F, knots: &[f64], rtol: f64) -> Result<VolumeEstimate> {
    let coarse: f64 = knots
        .windows(2)
        .map(|w| simpson(f(w[0]), f(0.5 * (w[0] + w[1])), f(w[1]), w[1] - w[0]))
        .sum();
    let span = knots[knots.len() - 1] - knots[0];
    let scale = coarse.abs().max(f64::MIN_POSITIVE);
    let mut value = 0.0;
    let mut error = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        let whole = simpson(fa, fm, fb, b - a);
        let tol = rtol * scale * (b - a) / span;
        let (v, e) = adaptive(&f, a, b, fa, fm, fb, whole, tol, 0)?;
        value += v;
        error += e;
    }
    Ok(VolumeEstimate { value, error })
}

fn power_integrand<'a>(jets: &'a JetCurve, power: usize) -> impl Fn(f64) -> f64 + 'a {
    move |s| jets.eval(s).0.max(0.0).powi(power as i32)
}

pub fn volume_warped(profile: &WarpProfile) -> Result<VolumeEstimate> {
    let m = profile.m();
    let est = integrate_over_knots(power_integrand(profile.phi(), m), profile.nodes(), VOLUME_RTOL * 1e-2)?;
    let w = unit_sphere_volume(m);
    Ok(VolumeEstimate {
        value: w * est.value,
        error: w * est.error,
    })
}

pub fn volume_doubly(profile: &DoublyWarpProfile) -> Result<VolumeEstimate> {
    let (p, k) = (profile.p(), profile.q() - 1);
    let (a, b) = (profile.a(), profile.b());
    let f = |s: f64| {
        let bv = b.eval(s).0.max(0.0).powi(k as i32);
        if p == 0 {
            bv
        } else {
            a.eval(s).0.max(0.0).powi(p as i32) * bv
        }
    };
    let est = integrate_over_knots(f, profile.nodes(), VOLUME_RTOL * 1e-2)?;
    let w = if p == 0 { 1.0 } else { unit_sphere_volume(p) } * unit_sphere_volume(k);
    Ok(VolumeEstimate {
        value: w * est.value,
        error: w * est.error,
    })
}

pub fn volume_estimate(profile: &Profile) -> Result<VolumeEstimate> {
    match profile {
        Profile::Warp(w) => volume_warped(w),
        Profile::Doubly(d) => volume_doubly(d),
    }
}

/// Volume of a profile piece.
pub fn volume(profile: &Profile) -> Result<f64> {
    Ok(volume_estimate(profile)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::profile::GridSpec;
    use crate::metric::spline::uniform_nodes;
    use std::f64::consts::PI;

    #[test]
    fn sphere_volumes() {
        assert!((unit_sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn hemisphere_three() {
        let nodes = uniform_nodes(0.0, PI / 2.0, 256);
        let w = WarpProfile::from_fn(nodes, 2, |s| (s.sin(), s.cos(), -s.sin())).unwrap();
        let v = volume(&w.into()).unwrap();
        assert!(((v - PI * PI) / (PI * PI)).abs() < 1e-6, "{v}");
    }

    #[test]
    fn cylinder() {
        let w = WarpProfile::constant(2.5, 0.7, 2, &GridSpec::default()).unwrap();
        let v = volume(&w.into()).unwrap();
        assert!((v - 2.5 * 4.0 * PI * 0.49).abs() < 1e-9);
    }

    #[test]
    fn product_volume() {
        let nodes = uniform_nodes(0.0, PI, 300);
        let d = DoublyWarpProfile::from_fn(nodes, 1, 3, |_| (0.8, 0.0, 0.0), |s| (s.sin(), s.cos(), -s.sin())).unwrap();
        let v = volume(&d.into()).unwrap();
        let exact = 2.0 * PI * 0.8 * 2.0 * PI * PI;
        assert!(((v - exact) / exact).abs() < 1e-6);
    }
}
