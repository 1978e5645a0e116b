//! The disk cap `D^{p+1} × S^{q-1}` that closes a surgery.
//!
//! The disk carries `R sin ψ(x)` with `ψ' = 1` near the pole and a septic
//! taper of `ψ'` to zero, so `ψ` reaches `π/2` with vanishing first and second
//! derivatives. Near the pole this is exactly the round hemisphere; at the
//! rim the radius function is flat to second order and glues to a product
//! collar end.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::piece::{profile_port, BoundaryInterface};
use crate::error::{NeckError, Result};
use crate::metric::profile::{DoublyWarpProfile, GridSpec, Profile};
use crate::metric::spline::{uniform_nodes, JetCurve};

/// Length of the cap in units of its disk radius.
pub const CAP_LENGTH: f64 = 3.0 * FRAC_PI_4;

/// `(ψ, ψ', ψ'')` in the unit-radius variable.
fn psi(x: f64) -> (f64, f64, f64) {
    if x <= FRAC_PI_4 {
        return (x, 1.0, 0.0);
    }
    let u = ((x - FRAC_PI_4) / FRAC_PI_2).min(1.0);
    let (u2, u3, u4) = (u * u, u * u * u, u * u * u * u);
    let s = u4 * (35.0 - 84.0 * u + 70.0 * u2 - 20.0 * u3);
    let ds = 140.0 * u3 * (1.0 - u).powi(3);
    let int = u4 * u * (7.0 - 14.0 * u + 10.0 * u2 - 2.5 * u3);
    (FRAC_PI_4 + FRAC_PI_2 * (u - int), 1.0 - s, -ds / FRAC_PI_2)
}

/// `(r sin ψ(s/r))` and its two `s`-derivatives.
fn disk_radius(r: f64, s: f64) -> (f64, f64, f64) {
    let (p, dp, ddp) = psi(s / r);
    let (sn, cs) = p.sin_cos();
    (r * sn, cs * dp, (-sn * dp * dp + cs * ddp) / r)
}

/// Cap with unit disk radius; see [`cap_piece_with_radius`].
pub fn cap_piece(p: usize, q: usize, a: f64) -> Result<(DoublyWarpProfile, BoundaryInterface)> {
    cap_piece_with_radius(p, q, a, 1.0, &GridSpec::default())
}

/// Cap whose rim (at `s = 0`) is the product `S^p(disk_radius) × S^{q-1}(a)`.
///
/// For `p = 0` the fiber itself closes up: the piece is a flattened round
/// hemisphere of radius `a` and `disk_radius` is ignored.
pub fn cap_piece_with_radius(
    p: usize,
    q: usize,
    a: f64,
    disk_radius_value: f64,
    grid: &GridSpec,
) -> Result<(DoublyWarpProfile, BoundaryInterface)> {
    if q < 3 {
        return Err(NeckError::CodimensionTooSmall { q });
    }
    if !(a > 0.0) || (p > 0 && !(disk_radius_value > 0.0)) {
        return Err(NeckError::InvalidParameter(format!(
            "cap radii must be positive (a = {a}, disk = {disk_radius_value})"
        )));
    }
    let r = if p == 0 { a } else { disk_radius_value };
    let length = CAP_LENGTH * r;
    let n = grid.nodes_for(length).max(grid.min_nodes).max(1025);
    let nodes = uniform_nodes(0.0, length, n);
    let collect = |f: &dyn Fn(f64) -> (f64, f64, f64)| -> Result<JetCurve> {
        let (mut v, mut d1, mut d2) = (Vec::new(), Vec::new(), Vec::new());
        for &s in &nodes {
            let (x, y, z) = f(s);
            v.push(x);
            d1.push(y);
            d2.push(z);
        }
        JetCurve::new(nodes.clone(), v, d1, d2)
    };
    let disk = collect(&|s| disk_radius(r, s))?;
    let (aj, bj) = if p == 0 {
        (collect(&|_| (1.0, 0.0, 0.0))?, disk)
    } else {
        (disk, collect(&|_| (a, 0.0, 0.0))?)
    };
    let cap = DoublyWarpProfile::from_jets(aj, bj, p, q)?.reversed();
    let rim = profile_port(&Profile::Doubly(cap.clone()), 0)
        .ok_or_else(|| NeckError::InvalidProfile("cap rim degenerated".into()))?;
    Ok((cap, rim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::curvature::scalar_curvature_doubly_warped;

    #[test]
    fn psi_lands_flat() {
        let (v, d1, d2) = psi(CAP_LENGTH);
        assert!((v - FRAC_PI_2).abs() < 1e-15);
        assert_eq!((d1, d2), (0.0, 0.0));
        let (v, d1, d2) = psi(FRAC_PI_4);
        assert_eq!((v, d1, d2), (FRAC_PI_4, 1.0, 0.0));
    }

    #[test]
    fn cap_curvature_positive() {
        let (cap, rim) = cap_piece(1, 3, 0.03).unwrap();
        let r = scalar_curvature_doubly_warped(&cap).unwrap();
        let fiber = 2.0 / (0.03 * 0.03);
        assert!(r.iter().all(|&x| x >= fiber - 1e-9));
        assert!(rim.totally_geodesic);
        let (cap0, _) = cap_piece(0, 3, 0.5).unwrap();
        let r0 = scalar_curvature_doubly_warped(&cap0).unwrap();
        assert!(r0.iter().all(|&x| x > 0.0));
        assert!((r0[r0.len() - 1] - 6.0 / 0.25).abs() < 1e-6);
    }
}
