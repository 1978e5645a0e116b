//! Python bindings for `scalneck`.
//!
//! Reports and certificates cross the boundary as plain dicts and JSON text.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use scalneck::assembly::{self, TunnelParams};
use scalneck::bending::{self, CurveDesignParams};
use scalneck::certify::{self, IngredientMetric, PipelineOptions};
use scalneck::metric::curvature::{scalar_curvature_doubly_warped, scalar_curvature_warped};
use scalneck::metric::io::{profile_from_json, profile_to_json};
use scalneck::metric::{self, AmbientModel, DoublyWarpProfile, GridSpec, Profile};
use scalneck::NeckError;

create_exception!(scalneck_py, ScalneckError, PyException);

fn err(e: NeckError) -> PyErr {
    ScalneckError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py_any(py)?,
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_py_any(py)?,
            None => n.as_f64().unwrap_or(f64::NAN).into_py_any(py)?,
        },
        Value::String(s) => s.into_py_any(py)?,
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any().unbind()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn report<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| ScalneckError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn model_named(body: &str, p: usize, q: usize, radius: f64) -> PyResult<AmbientModel> {
    Ok(match body {
        "product" => AmbientModel::product_of_rounds(p, q, radius, radius),
        "round" => AmbientModel::round_sphere(p + q, radius),
        "great-sphere" | "great_sphere" => AmbientModel::great_sphere_tube(p, q, radius),
        "euclidean" => AmbientModel::euclidean(p + q),
        other => return Err(ScalneckError::new_err(format!("unknown body `{other}`"))),
    })
}

/// `ds² + φ(s)² g_{S^m}` sampled on a grid.
#[pyclass(name = "WarpProfile", module = "scalneck_py", from_py_object)]
#[derive(Clone)]
struct PyWarpProfile {
    inner: metric::WarpProfile,
}

#[pymethods]
impl PyWarpProfile {
    /// Plain samples; derivatives come from a not-a-knot spline.
    #[new]
    fn new(nodes: Vec<f64>, values: Vec<f64>, m: usize) -> PyResult<Self> {
        let inner = metric::WarpProfile::from_samples(nodes, values, m).map_err(err)?;
        Ok(Self { inner })
    }

    /// Samples with exact first and second derivatives.
    #[staticmethod]
    fn from_jets(nodes: Vec<f64>, value: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>, m: usize) -> PyResult<Self> {
        let jets = metric::spline::JetCurve::new(nodes, value, d1, d2).map_err(err)?;
        Ok(Self {
            inner: metric::WarpProfile::from_jets(jets, m).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match profile_from_json(text).map_err(err)? {
            Profile::Warp(inner) => Ok(Self { inner }),
            Profile::Doubly(_) => Err(ScalneckError::new_err("descriptor is doubly warped")),
        }
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes().to_vec()
    }

    fn scalar_curvature(&self) -> PyResult<Vec<f64>> {
        scalar_curvature_warped(&self.inner).map_err(err)
    }

    fn volume(&self) -> PyResult<f64> {
        metric::volume(&Profile::Warp(self.inner.clone())).map_err(err)
    }

    /// `(lower, upper)` bounds.
    fn diameter(&self) -> (f64, f64) {
        let d = metric::diameter(&Profile::Warp(self.inner.clone()));
        (d.lower, d.upper)
    }

    fn scaled(&self, c: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.scaled(c).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        profile_to_json(&Profile::Warp(self.inner.clone()))
    }

    fn __repr__(&self) -> String {
        format!(
            "WarpProfile(m={}, length={}, nodes={})",
            self.inner.m(),
            self.inner.length(),
            self.inner.nodes().len()
        )
    }
}

/// Scalar curvature of `ds² + a² g_{S^p} + b² g_{S^{q-1}}` from samples.
#[pyfunction]
fn doubly_scalar_curvature(nodes: Vec<f64>, a: Vec<f64>, b: Vec<f64>, p: usize, q: usize) -> PyResult<Vec<f64>> {
    let prof = DoublyWarpProfile::from_samples(nodes, a, b, p, q).map_err(err)?;
    scalar_curvature_doubly_warped(&prof).map_err(err)
}

/// Designs a neck curve; returns the report and the sampled curve.
#[pyfunction]
#[pyo3(signature = (kappa, delta, p=0, q=3, body="round", radius=1.0))]
fn design_bending_curve(
    py: Python<'_>,
    kappa: f64,
    delta: f64,
    p: usize,
    q: usize,
    body: &str,
    radius: f64,
) -> PyResult<Py<PyAny>> {
    let model = model_named(body, p, q, radius)?;
    let design = bending::design_bending_curve(&CurveDesignParams::new(model, kappa, delta)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("report", report(py, &design.report)?)?;
    out.set_item("curve", report(py, &design.curve)?)?;
    Ok(out.into_any().unbind())
}

#[pyfunction]
#[pyo3(signature = (delta, d, j, kappa=6.0, n=3))]
fn build_tunnel(py: Python<'_>, delta: f64, d: f64, j: f64, kappa: f64, n: usize) -> PyResult<Py<PyAny>> {
    let (_, rep) = assembly::build_tunnel(delta, d, j, kappa, n).map_err(err)?;
    report(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (p=1, q=3, delta=0.05, body="product"))]
fn perform_surgery(py: Python<'_>, p: usize, q: usize, delta: f64, body: &str) -> PyResult<Py<PyAny>> {
    let model = model_named(body, p, q, 1.0)?;
    let (_, rep) = assembly::perform_surgery(&model, delta, 1.0, &GridSpec::default()).map_err(err)?;
    report(py, &rep)
}

/// Runs a pipeline and returns its canonical certificate JSON.
///
/// `name` is one of `tunnel`, `surgery`, `main-a`, `cor-d`, `cor-t`,
/// `cor-v`, `main-b-budget`.
#[pyfunction]
#[pyo3(signature = (name, n=3, d=10.0, j=100.0, delta=0.1, p=1, q=2, v=None, epsilon=0.05, stand_in=true, density=None))]
#[allow(clippy::too_many_arguments)]
fn run_pipeline(
    name: &str,
    n: usize,
    d: f64,
    j: f64,
    delta: f64,
    p: usize,
    q: usize,
    v: Option<f64>,
    epsilon: f64,
    stand_in: bool,
    density: Option<f64>,
) -> PyResult<String> {
    let mut opts = PipelineOptions::default();
    if let Some(x) = density {
        opts.grid = GridSpec::with_density(x);
    }
    let run = match name {
        "tunnel" => {
            let kappa = (n * (n - 1)) as f64;
            let mut params = TunnelParams::symmetric(delta, d, j, kappa, n).map_err(err)?;
            params.grid = opts.grid;
            certify::tunnel_certificate(&params, &opts)
        }
        "surgery" => {
            let model = AmbientModel::product_of_rounds(p, q, 1.0, 1.0);
            certify::surgery_certificate(&model, delta, j, &opts)
        }
        "main-a" => certify::pipeline_main_a(&IngredientMetric::round_sphere(n, 0.5), None, d, n, j, delta, &opts),
        "cor-d" => certify::pipeline_cor_d(n, d, j, delta, &opts),
        "cor-t" => certify::pipeline_cor_t(p, q, j, delta, &opts),
        "cor-v" => {
            let v = v.unwrap_or(6.0 * std::f64::consts::PI.powi(2));
            certify::pipeline_cor_v(v, n, j, delta, &opts)
        }
        "main-b-budget" => {
            let h = stand_in.then(|| certify::main_b_stand_in(n, epsilon));
            certify::verify_main_b_budget(h.as_ref(), epsilon, d, n, None, j, &opts)
        }
        other => return Err(ScalneckError::new_err(format!("unknown pipeline `{other}`"))),
    }
    .map_err(err)?;
    Ok(run.certificate.to_canonical_json())
}

/// Rechecks a certificate; returns the report as a dict.
#[pyfunction]
fn recheck_certificate(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let rep = certify::recheck_certificate(text).map_err(err)?;
    let out = report(py, &rep)?;
    out.bind(py).set_item("passed", rep.passed())?;
    Ok(out)
}

#[pymodule]
pub fn scalneck_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ScalneckError", m.py().get_type::<ScalneckError>())?;
    m.add_class::<PyWarpProfile>()?;
    m.add_function(wrap_pyfunction!(doubly_scalar_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(design_bending_curve, m)?)?;
    m.add_function(wrap_pyfunction!(build_tunnel, m)?)?;
    m.add_function(wrap_pyfunction!(perform_surgery, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(recheck_certificate, m)?)?;
    Ok(())
}
