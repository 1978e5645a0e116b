//! One-dimensional interpolation used by every profile.
//!
//! Samples enter either as plain values (a not-a-knot cubic spline supplies
//! the first two derivatives at the nodes) or as exact jets. Off-node
//! evaluation always goes through the quintic Hermite interpolant of the
//! node jets, which is C² and reproduces values and both derivatives at the
//! nodes exactly.

use crate::error::{NeckError, Result};

/// Not-a-knot cubic spline through `(xs, ys)`; returns first and second
/// derivatives at the nodes.
pub fn not_a_knot_derivatives(xs: &[f64], ys: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = xs.len();
    if n != ys.len() {
        return Err(NeckError::DegenerateGrid(format!(
            "{} abscissae but {} values",
            n,
            ys.len()
        )));
    }
    if n < 4 {
        return Err(NeckError::DegenerateGrid(format!(
            "not-a-knot spline needs at least 4 nodes, got {n}"
        )));
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    if h.iter().any(|&hi| !(hi > 0.0)) {
        return Err(NeckError::DegenerateGrid("nodes must be strictly increasing".into()));
    }
    let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    // Unknowns M_1 .. M_{n-2}; M_0 and M_{n-1} are eliminated with the
    // not-a-knot conditions (third derivative continuous at x_1, x_{n-2}).
    let m = n - 2;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        lower[k] = h[i - 1];
        diag[k] = 2.0 * (h[i - 1] + h[i]);
        upper[k] = h[i];
        rhs[k] = 6.0 * (slope[i] - slope[i - 1]);
    }
    if m == 2 {
        // n == 4: a single cubic interpolates all four points.
        let (h0, h1, h2) = (h[0], h[1], h[2]);
        let a11 = diag[0] + h0 * (h0 + h1) / h1;
        let a12 = upper[0] - h0 * h0 / h1;
        let a21 = lower[1] - h2 * h2 / h1;
        let a22 = diag[1] + h2 * (h1 + h2) / h1;
        let det = a11 * a22 - a12 * a21;
        let m1 = (rhs[0] * a22 - a12 * rhs[1]) / det;
        let m2 = (a11 * rhs[1] - a21 * rhs[0]) / det;
        let mut sec = vec![0.0; 4];
        sec[1] = m1;
        sec[2] = m2;
        sec[0] = ((h0 + h1) * m1 - h0 * m2) / h1;
        sec[3] = ((h1 + h2) * m2 - h2 * m1) / h1;
        let first = first_from_second(&h, &slope, &sec);
        return Ok((first, sec));
    }
    {
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        upper[0] -= h0 * h0 / h1;
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[m - 1] += hb * (ha + hb) / ha;
        lower[m - 1] -= hb * hb / ha;
    }
    let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs);
    let mut sec = vec![0.0; n];
    sec[1..n - 1].copy_from_slice(&inner);
    sec[0] = ((h[0] + h[1]) * sec[1] - h[0] * sec[2]) / h[1];
    let (ha, hb) = (h[n - 3], h[n - 2]);
    sec[n - 1] = ((ha + hb) * sec[n - 2] - hb * sec[n - 3]) / ha;
    let first = first_from_second(&h, &slope, &sec);
    Ok((first, sec))
}

fn first_from_second(h: &[f64], slope: &[f64], sec: &[f64]) -> Vec<f64> {
    let n = sec.len();
    let mut first = vec![0.0; n];
    for i in 0..n - 1 {
        first[i] = slope[i] - h[i] * (2.0 * sec[i] + sec[i + 1]) / 6.0;
    }
    let j = n - 2;
    first[n - 1] = slope[j] + h[j] * (sec[j] + 2.0 * sec[j + 1]) / 6.0;
    first
}

/// Thomas algorithm; the systems built here are diagonally dominant.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Node jets of a scalar function: value plus first and second derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct JetCurve {
    pub nodes: Vec<f64>,
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl JetCurve {
    pub fn new(nodes: Vec<f64>, value: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if value.len() != n || d1.len() != n || d2.len() != n {
            return Err(NeckError::DegenerateGrid("jet arrays differ in length".into()));
        }
        if n < 2 {
            return Err(NeckError::DegenerateGrid("need at least two nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NeckError::DegenerateGrid("nodes must be strictly increasing".into()));
        }
        if value.iter().chain(&d1).chain(&d2).any(|v| !v.is_finite()) {
            return Err(NeckError::InvalidProfile("non-finite jet value".into()));
        }
        Ok(Self { nodes, value, d1, d2 })
    }

    /// Builds jets from plain samples with a not-a-knot cubic spline.
    pub fn from_samples(nodes: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        let (d1, d2) = not_a_knot_derivatives(&nodes, &value)?;
        Self::new(nodes, value, d1, d2)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index `i` of the interval `[x_i, x_{i+1}]` containing `s` (clamped).
    pub fn interval(&self, s: f64) -> usize {
        let n = self.nodes.len();
        if s <= self.nodes[0] {
            return 0;
        }
        if s >= self.nodes[n - 1] {
            return n - 2;
        }
        match self.nodes.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        }
    }

    /// Value, first and second derivative of the quintic Hermite
    /// interpolant at `s`.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        if let Ok(i) = self.nodes.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            return (self.value[i], self.d1[i], self.d2[i]);
        }
        let i = self.interval(s);
        let h = self.nodes[i + 1] - self.nodes[i];
        let t = (s - self.nodes[i]) / h;
        let c0 = self.value[i];
        let c1 = h * self.d1[i];
        let c2 = 0.5 * h * h * self.d2[i];
        let e0 = self.value[i + 1] - c0 - c1 - c2;
        let e1 = h * self.d1[i + 1] - c1 - 2.0 * c2;
        let e2 = h * h * self.d2[i + 1] - 2.0 * c2;
        let c3 = 10.0 * e0 - 4.0 * e1 + 0.5 * e2;
        let c4 = -15.0 * e0 + 7.0 * e1 - e2;
        let c5 = 6.0 * e0 - 3.0 * e1 + 0.5 * e2;
        let v = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
        let dv = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
        let ddv = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
        (v, dv / h, ddv / (h * h))
    }

    pub fn value_at(&self, s: f64) -> f64 {
        self.eval(s).0
    }

    pub fn min_value(&self) -> f64 {
        self.value.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.value.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Reversed orientation: `s -> L - s` (first derivative flips sign).
    pub fn reversed(&self) -> Self {
        let end = self.end();
        let start = self.start();
        let nodes = self.nodes.iter().rev().map(|x| start + end - x).collect();
        let value = self.value.iter().rev().copied().collect();
        let d1 = self.d1.iter().rev().map(|d| -d).collect();
        let d2 = self.d2.iter().rev().copied().collect();
        Self { nodes, value, d1, d2 }
    }

    /// Same jets on nodes shifted to start at zero.
    pub fn rebased(&self) -> Self {
        let start = self.start();
        let mut out = self.clone();
        out.nodes.iter_mut().for_each(|x| *x -= start);
        out
    }
}

/// `n` uniformly spaced nodes on `[a, b]`, endpoints exact.
pub fn uniform_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    v[n - 1] = b;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic() {
        let xs = uniform_nodes(0.0, 2.0, 11);
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x + 0.25 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let (d1, d2) = not_a_knot_derivatives(&xs, &ys).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            assert!((d1[i] - (-2.0 + x + 0.75 * x * x)).abs() < 1e-11);
            assert!((d2[i] - (1.0 + 1.5 * x)).abs() < 1e-10);
        }
    }

    #[test]
    fn spline_four_nodes_nonuniform() {
        let xs = vec![0.0, 0.3, 1.1, 1.5];
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
        let (d1, d2) = not_a_knot_derivatives(&xs, &ys).unwrap();
        for (i, x) in xs.iter().enumerate() {
            assert!((d1[i] - 3.0 * x * x).abs() < 1e-11);
            assert!((d2[i] - 6.0 * x).abs() < 1e-10);
        }
    }

    #[test]
    fn hermite_reproduces_jets_and_quintics() {
        let xs = vec![0.0, 0.4, 0.5, 1.3];
        let f = |x: f64| {
            (
                x.powi(5) - 2.0 * x.powi(3) + x,
                5.0 * x.powi(4) - 6.0 * x * x + 1.0,
                20.0 * x.powi(3) - 12.0 * x,
            )
        };
        let jets = JetCurve::new(
            xs.clone(),
            xs.iter().map(|&x| f(x).0).collect(),
            xs.iter().map(|&x| f(x).1).collect(),
            xs.iter().map(|&x| f(x).2).collect(),
        )
        .unwrap();
        for &x in &xs {
            let (v, d, dd) = jets.eval(x);
            let e = f(x);
            assert_eq!(v, e.0);
            assert!((d - e.1).abs() < 1e-12 && (dd - e.2).abs() < 1e-10);
        }
        for k in 0..50 {
            let x = 1.3 * k as f64 / 49.0;
            let (v, d, dd) = jets.eval(x);
            let e = f(x);
            assert!((v - e.0).abs() < 1e-12, "{x}");
            assert!((d - e.1).abs() < 1e-10);
            assert!((dd - e.2).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_short_or_unsorted_grids() {
        assert!(not_a_knot_derivatives(&[0.0, 1.0, 2.0], &[0.0; 3]).is_err());
        assert!(not_a_knot_derivatives(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4]).is_err());
    }
}
