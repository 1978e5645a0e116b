//! Finite-difference scalar curvature of an arbitrary coordinate chart.
//!
//! This path shares no code with the closed forms in `curvature`: it takes
//! the metric as a black box, builds Christoffel symbols by central
//! differences, differentiates them again, and contracts the Riemann tensor.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::profile::{DoublyWarpProfile, WarpProfile};
use crate::error::{NeckError, Result};

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A metric given by its components on a coordinate box.
#[derive(Clone)]
pub struct CoordinateChartMetric {
    pub dim: usize,
    pub metric_fn: MetricFn,
    pub domain_box: Vec<(f64, f64)>,
}

impl std::fmt::Debug for CoordinateChartMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoordinateChartMetric")
            .field("dim", &self.dim)
            .field("domain_box", &self.domain_box)
            .finish()
    }
}

impl CoordinateChartMetric {
    pub fn new<F>(dim: usize, domain_box: Vec<(f64, f64)>, metric_fn: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            metric_fn: Arc::new(metric_fn),
            domain_box,
        }
    }

    /// Metric at `x`, checked symmetric positive definite.
    pub fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let g = (self.metric_fn)(x);
        let asym = (&g - g.transpose()).abs().max();
        if asym > 1e-12 * g.abs().max().max(1.0) || g.clone().cholesky().is_none() {
            return Err(NeckError::SingularMetric { point: x.to_vec() });
        }
        Ok(g)
    }

    /// Flat `R^dim` in Cartesian coordinates.
    pub fn euclidean(dim: usize, half_width: f64) -> Self {
        Self::new(dim, vec![(-half_width, half_width); dim], move |_| {
            DMatrix::identity(dim, dim)
        })
    }

    /// `ds² + φ(s)² g_{S^m}` with `g_{S^m}` in nested polar angles.
    pub fn warped<F>(m: usize, s_range: (f64, f64), phi: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut domain = vec![s_range];
        domain.extend(sphere_angle_box(m));
        Self::new(m + 1, domain, move |x| {
            let f = phi(x[0]);
            let mut g = DMatrix::zeros(m + 1, m + 1);
            g[(0, 0)] = 1.0;
            for (i, w) in sphere_weights(&x[1..]).into_iter().enumerate() {
                g[(i + 1, i + 1)] = f * f * w;
            }
            g
        })
    }

    /// Chart of a [`WarpProfile`], evaluated through its interpolant.
    pub fn from_warp_profile(profile: &WarpProfile) -> Self {
        let p = profile.clone();
        Self::warped(profile.m(), (0.0, profile.length()), move |s| p.eval(s).0)
    }

    /// Round `S^n` of radius `rho` in polar coordinates.
    pub fn round_sphere(n: usize, rho: f64) -> Self {
        Self::warped(n - 1, (0.0, std::f64::consts::PI * rho), move |s| rho * (s / rho).sin())
    }

    /// `ds² + a(s)² g_{S^p} + b(s)² g_{S^{q-1}}`.
    pub fn doubly_warped<A, B>(p: usize, q: usize, s_range: (f64, f64), a: A, b: B) -> Self
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let k = q - 1;
        let mut domain = vec![s_range];
        domain.extend(sphere_angle_box(p));
        domain.extend(sphere_angle_box(k));
        Self::new(1 + p + k, domain, move |x| {
            let (av, bv) = (a(x[0]), b(x[0]));
            let mut g = DMatrix::zeros(1 + p + k, 1 + p + k);
            g[(0, 0)] = 1.0;
            for (i, w) in sphere_weights(&x[1..1 + p]).into_iter().enumerate() {
                g[(1 + i, 1 + i)] = av * av * w;
            }
            for (i, w) in sphere_weights(&x[1 + p..]).into_iter().enumerate() {
                g[(1 + p + i, 1 + p + i)] = bv * bv * w;
            }
            g
        })
    }

    pub fn from_doubly_profile(profile: &DoublyWarpProfile) -> Self {
        let pa = profile.a().clone();
        let pb = profile.b().clone();
        Self::doubly_warped(
            profile.p(),
            profile.q(),
            (0.0, profile.length()),
            move |s| pa.eval(s).0,
            move |s| pb.eval(s).0,
        )
    }
}

/// Diagonal of the round metric on `S^m` in angles `(ψ_1..ψ_m)`:
/// `1, sin²ψ_1, sin²ψ_1 sin²ψ_2, ...`.
fn sphere_weights(angles: &[f64]) -> Vec<f64> {
    let mut w = Vec::with_capacity(angles.len());
    let mut acc = 1.0;
    for &psi in angles {
        w.push(acc);
        acc *= psi.sin().powi(2);
    }
    w
}

fn sphere_angle_box(m: usize) -> Vec<(f64, f64)> {
    use std::f64::consts::PI;
    (0..m).map(|i| if i + 1 == m { (-PI, PI) } else { (0.0, PI) }).collect()
}

fn christoffel(chart: &CoordinateChartMetric, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = chart.dim;
    let g = chart.metric(x)?;
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| NeckError::SingularMetric { point: x.to_vec() })?;
    // dg[k] = ∂_k g
    let mut dg = Vec::with_capacity(n);
    let mut xp = x.to_vec();
    for k in 0..n {
        xp[k] = x[k] + h;
        let gp = chart.metric(&xp)?;
        xp[k] = x[k] - h;
        let gm = chart.metric(&xp)?;
        xp[k] = x[k];
        dg.push((gp - gm) / (2.0 * h));
    }
    // Γ^l_{ij} stored at [l*n*n + i*n + j]
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            for l in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    let lower = dg[i][(k, j)] + dg[j][(k, i)] - dg[k][(i, j)];
                    acc += ginv[(l, k)] * lower;
                }
                gamma[l * n * n + i * n + j] = 0.5 * acc;
                gamma[l * n * n + j * n + i] = 0.5 * acc;
            }
        }
    }
    Ok(gamma)
}

/// Scalar curvature at `point` by second-order central differences with step `h`.
pub fn finite_difference_scalar(chart: &CoordinateChartMetric, point: &[f64], h: f64) -> Result<f64> {
    let n = chart.dim;
    if !(h > 0.0) || point.len() != n {
        return Err(NeckError::InvalidParameter(format!(
            "need h > 0 and a point of dimension {n}"
        )));
    }
    for (axis, (&x, &(lo, hi))) in point.iter().zip(&chart.domain_box).enumerate() {
        if x - lo < 2.0 * h || hi - x < 2.0 * h {
            return Err(NeckError::BoundaryProximity { axis });
        }
    }
    let idx = |l: usize, i: usize, j: usize| l * n * n + i * n + j;
    let gamma = christoffel(chart, point, h)?;
    let mut dgamma = Vec::with_capacity(n);
    let mut xp = point.to_vec();
    for k in 0..n {
        xp[k] = point[k] + h;
        let gp = christoffel(chart, &xp, h)?;
        xp[k] = point[k] - h;
        let gm = christoffel(chart, &xp, h)?;
        xp[k] = point[k];
        dgamma.push(
            gp.iter()
                .zip(&gm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
    }
    // Ric_{bd} = ∂_a Γ^a_{db} - ∂_d Γ^a_{ab} + Γ^a_{ae} Γ^e_{db} - Γ^a_{de} Γ^e_{ab}
    let ginv = chart
        .metric(point)?
        .try_inverse()
        .ok_or_else(|| NeckError::SingularMetric { point: point.to_vec() })?;
    let mut scalar = 0.0;
    for b in 0..n {
        for d in 0..n {
            let w = ginv[(b, d)];
            if w == 0.0 {
                continue;
            }
            let mut ric = 0.0;
            for a in 0..n {
                ric += dgamma[a][idx(a, d, b)] - dgamma[d][idx(a, a, b)];
                for e in 0..n {
                    ric += gamma[idx(a, a, e)] * gamma[idx(e, d, b)] - gamma[idx(a, d, e)] * gamma[idx(e, a, b)];
                }
            }
            scalar += w * ric;
        }
    }
    Ok(scalar)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_three_sphere() {
        let chart = CoordinateChartMetric::round_sphere(3, 1.0);
        let r = finite_difference_scalar(&chart, &[1.1, 0.9, 0.4], 1e-3).unwrap();
        assert!((r - 6.0).abs() < 1e-4, "{r}");
    }

    #[test]
    fn flat_space() {
        let chart = CoordinateChartMetric::euclidean(4, 1.0);
        let r = finite_difference_scalar(&chart, &[0.1, -0.2, 0.3, 0.0], 1e-3).unwrap();
        assert!(r.abs() < 1e-6);
    }

    #[test]
    fn boundary_and_singular_errors() {
        let chart = CoordinateChartMetric::euclidean(2, 1.0);
        assert!(matches!(
            finite_difference_scalar(&chart, &[0.9995, 0.0], 1e-3),
            Err(NeckError::BoundaryProximity { axis: 0 })
        ));
        let bad = CoordinateChartMetric::new(2, vec![(-1.0, 1.0); 2], |x| {
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0]])
        });
        assert!(matches!(
            finite_difference_scalar(&bad, &[0.0, 0.0], 1e-3),
            Err(NeckError::SingularMetric { .. })
        ));
    }
}
