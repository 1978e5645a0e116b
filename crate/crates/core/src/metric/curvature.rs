//! Closed-form scalar curvature of (doubly) warped products.
//!
//! For `g = ds² + φ² g_{S^m}`:
//!
//! ```text
//! R = m(m-1)(1 - φ'²)/φ² - 2m φ''/φ
//! ```
//!
//! and for `g = ds² + a² g_{S^p} + b² g_{S^k}` (k = q - 1):
//!
//! ```text
//! R = p(p-1)(1 - a'²)/a² - 2p a''/a
//!   + k(k-1)(1 - b'²)/b² - 2k b''/b
//!   - 2pk a'b'/(ab)
//! ```
//!
//! At a smooth pole the expressions are 0/0. There, and at nodes so close to
//! a pole that `1 - φ'²` suffers cancellation, the value comes from a
//! least-squares fit `α + β d²` (d = distance to the pole) on nearby nodes.

use super::profile::{DoublyWarpProfile, PoleSide, Profile, WarpProfile};
use super::spline::JetCurve;
use crate::error::Result;

pub fn warped_scalar_at(m: usize, phi: (f64, f64, f64)) -> f64 {
    warped_with_defect(m, phi, 1.0 - phi.1 * phi.1)
}

fn warped_with_defect(m: usize, phi: (f64, f64, f64), defect: f64) -> f64 {
    let (f, _, ddf) = phi;
    let m = m as f64;
    m * (m - 1.0) * defect / (f * f) - 2.0 * m * ddf / f
}

pub fn doubly_scalar_at(p: usize, q: usize, a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    doubly_with_defects(p, q, a, b, 1.0 - a.1 * a.1, 1.0 - b.1 * b.1)
}

fn doubly_with_defects(p: usize, q: usize, a: (f64, f64, f64), b: (f64, f64, f64), da_def: f64, db_def: f64) -> f64 {
    let k = (q - 1) as f64;
    let (bv, db, ddb) = b;
    let mut r = k * (k - 1.0) * db_def / (bv * bv) - 2.0 * k * ddb / bv;
    if p > 0 {
        let pf = p as f64;
        let (av, da, dda) = a;
        r += pf * (pf - 1.0) * da_def / (av * av) - 2.0 * pf * dda / av;
        r -= 2.0 * pf * k * da * db / (av * bv);
    }
    r
}

/// Below this value of `1 - φ'²` the direct difference has lost too many
/// digits to be trusted, so curvature there is extrapolated instead.
pub const POLE_ZONE_DEFECT: f64 = 1e-5;
const MAX_ZONE_NODES: usize = 16;
const FIT_NODES: usize = 24;

fn defects(phi: &JetCurve) -> Vec<f64> {
    phi.d1.iter().map(|d| 1.0 - d * d).collect()
}

/// Number of nodes next to each pole whose curvature is extrapolated.
fn zone(defect: &[f64], side: PoleSide) -> usize {
    let n = defect.len();
    let idx = |k: usize| match side {
        PoleSide::Start => k,
        PoleSide::End => n - 1 - k,
    };
    let limit = MAX_ZONE_NODES.min(n.saturating_sub(3) / 2);
    (1..=limit)
        .find(|&k| defect[idx(k)] >= POLE_ZONE_DEFECT)
        .unwrap_or(limit)
        .max(1)
}

fn patch_poles(values: &mut [f64], nodes: &[f64], poles: &[(PoleSide, usize)]) {
    let n = values.len();
    for &(side, z) in poles {
        let idx = |k: usize| match side {
            PoleSide::Start => k,
            PoleSide::End => n - 1 - k,
        };
        let pole = nodes[idx(0)];
        let d2 = |k: usize| (nodes[idx(k)] - pole).powi(2);
        // R is even in the distance to a smooth pole: fit α + β d² by least
        // squares on the nodes just outside the zone.
        let end = (z + FIT_NODES.max(z)).min(n / 2).max(z + 2);
        let m = (end - z) as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for k in z..end {
            let (x, y) = (d2(k), values[idx(k)]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let det = m * sxx - sx * sx;
        let beta = if det > 0.0 { (m * sxy - sx * sy) / det } else { 0.0 };
        let alpha = (sy - beta * sx) / m;
        for k in 0..z {
            values[idx(k)] = alpha + beta * d2(k);
        }
    }
}

/// Scalar curvature of `ds² + φ² g_{S^m}` at every node.
pub fn scalar_curvature_warped(profile: &WarpProfile) -> Result<Vec<f64>> {
    let phi = profile.phi();
    let def = defects(phi);
    let mut out: Vec<f64> = (0..phi.len())
        .map(|i| warped_with_defect(profile.m(), (phi.value[i], phi.d1[i], phi.d2[i]), def[i]))
        .collect();
    let zones: Vec<_> = profile.poles().iter().map(|&sd| (sd, zone(&def, sd))).collect();
    patch_poles(&mut out, &phi.nodes, &zones);
    Ok(out)
}

/// Scalar curvature of `ds² + a² g_{S^p} + b² g_{S^{q-1}}` at every node.
pub fn scalar_curvature_doubly_warped(profile: &DoublyWarpProfile) -> Result<Vec<f64>> {
    let (a, b) = (profile.a(), profile.b());
    let (adef, bdef) = (defects(a), defects(b));
    let mut out: Vec<f64> = (0..b.len())
        .map(|i| {
            doubly_with_defects(
                profile.p(),
                profile.q(),
                (a.value[i], a.d1[i], a.d2[i]),
                (b.value[i], b.d1[i], b.d2[i]),
                adef[i],
                bdef[i],
            )
        })
        .collect();
    let zones: Vec<_> = profile
        .factor_poles()
        .iter()
        .map(|&(f, sd)| (sd, zone(if f == 'a' { &adef } else { &bdef }, sd)))
        .collect();
    patch_poles(&mut out, &b.nodes, &zones);
    Ok(out)
}

pub fn scalar_curvature(profile: &Profile) -> Result<Vec<f64>> {
    match profile {
        Profile::Warp(w) => scalar_curvature_warped(w),
        Profile::Doubly(d) => scalar_curvature_doubly_warped(d),
    }
}

/// Smallest node value of the scalar curvature.
pub fn min_scalar(profile: &Profile) -> Result<f64> {
    Ok(scalar_curvature(profile)?.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::profile::GridSpec;
    use crate::metric::spline::uniform_nodes;
    use crate::metric::spline::JetCurve;

    #[test]
    fn round_three_sphere() {
        let nodes = uniform_nodes(0.0, std::f64::consts::PI - 0.2, 512);
        let w = WarpProfile::from_fn(nodes, 2, |s| (s.sin(), s.cos(), -s.sin())).unwrap();
        for r in scalar_curvature_warped(&w).unwrap() {
            assert!((r - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn round_sphere_with_spline_derivatives() {
        let nodes = uniform_nodes(0.1, std::f64::consts::PI - 0.1, 2048);
        let vals = nodes.iter().map(|s| s.sin()).collect();
        let w = WarpProfile::from_samples(nodes, vals, 2).unwrap();
        let r = scalar_curvature_warped(&w).unwrap();
        let worst = r.iter().map(|x| (x - 6.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn cylinder_half_radius() {
        let w = WarpProfile::constant(3.0, 0.5, 2, &GridSpec::default()).unwrap();
        for r in scalar_curvature_warped(&w).unwrap() {
            assert!((r - 8.0).abs() < 1e-9);
        }
    }

    #[test]
    fn product_of_rounds_doubly() {
        let beta: f64 = 0.3;
        let nodes = uniform_nodes(0.0, 1.0, 64);
        let d = DoublyWarpProfile::from_fn(nodes, 1, 3, |_| (1.0, 0.0, 0.0), |_| (beta, 0.0, 0.0)).unwrap();
        for r in scalar_curvature_doubly_warped(&d).unwrap() {
            assert!((r - 2.0 / (beta * beta)).abs() < 1e-9);
        }
    }

    #[test]
    fn p_zero_matches_warped() {
        let nodes = uniform_nodes(0.0, 1.5, 300);
        let f = |s: f64| {
            (
                1.0 + 0.2 * (3.0 * s).sin(),
                0.6 * (3.0 * s).cos(),
                -1.8 * (3.0 * s).sin(),
            )
        };
        let w = WarpProfile::from_fn(nodes.clone(), 3, f).unwrap();
        let d = DoublyWarpProfile::from_fn(nodes, 0, 4, |_| (1.0, 0.0, 0.0), f).unwrap();
        let rw = scalar_curvature_warped(&w).unwrap();
        let rd = scalar_curvature_doubly_warped(&d).unwrap();
        for (x, y) in rw.iter().zip(&rd) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn pole_value_extrapolated() {
        let rho = 0.5;
        let nodes = uniform_nodes(0.0, std::f64::consts::PI * rho, 400);
        let w = WarpProfile::from_fn(nodes, 3, |s| {
            let x = s / rho;
            (rho * x.sin(), x.cos(), -x.sin() / rho)
        })
        .unwrap();
        let jets: &JetCurve = w.phi();
        assert_eq!(jets.value[0], 0.0);
        let r = scalar_curvature_warped(&w).unwrap();
        for v in r {
            assert!((v - 12.0 / (rho * rho)).abs() < 1e-8, "{v}");
        }
    }
}
