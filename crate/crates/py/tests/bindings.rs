use pyo3::prelude::*;
use pyo3::types::PyDict;
use scalneck_py::scalneck_py as pymod;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
    pyo3::append_to_inittab!(pymod);
    Python::attach(|py| {
        let m = py.import("scalneck_py").unwrap();
        f(py, &m);
    });
}

#[test]
fn bindings_cover_the_main_operations() {
    with_module(|py, m| {
        let globals = PyDict::new(py);
        globals.set_item("sn", m).unwrap();
        let code = c"
import math, json
s = [math.pi * i / 400 for i in range(401)]
p = sn.WarpProfile.from_jets(s, [math.sin(x) for x in s], [math.cos(x) for x in s], [-math.sin(x) for x in s], 2)
r = p.scalar_curvature()
assert max(abs(v - 6.0) for v in r) < 1e-9, max(r)
assert abs(p.volume() - 2 * math.pi ** 2) < 1e-8
rep = sn.build_tunnel(0.1, 2.0, 100.0)
assert rep['min_r'] > 5.99
cert = sn.run_pipeline('cor-d', d=4.0)
assert sn.recheck_certificate(cert)['passed']
bad = json.loads(cert); bad['floor'] = 0.0
assert not sn.recheck_certificate(json.dumps(bad))['passed']
try:
    sn.perform_surgery(2, 2)
    raise AssertionError('expected failure')
except sn.ScalneckError as e:
    assert 'q >= 3' in str(e)
";
        py.run(code, Some(&globals), None).unwrap();
    });
}
