//! Acceptance run: one line per criterion, nonzero exit if any is red.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scalneck::assembly::TunnelParams;
use scalneck::assembly::{build_tunnel, collar_metric, perform_surgery, CollarSpec, MetricPath, PathShape};
use scalneck::bending::curve::sigma_scalar_closed_form;
use scalneck::bending::{design_bending_curve, gauss_scalar_reconstruction, vertical_curve, CurveDesignParams};
use scalneck::certify::IngredientMetric;
use scalneck::certify::{pipeline_cor_d, pipeline_cor_v, recheck_certificate, tunnel_certificate, PipelineOptions};
use scalneck::metric::curvature::{min_scalar, scalar_curvature_warped};
use scalneck::metric::{
    finite_difference_scalar, geodesic_sphere_data, AmbientModel, CoordinateChartMetric, GridSpec, Profile, WarpProfile,
};

const SEED: u64 = 0x5ca1_ab1e;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Check = fn() -> Outcome;

fn calibration() -> Outcome {
    let grid = GridSpec::default();
    let mut worst: f64 = 0.0;
    for n in 3..=7 {
        let p = IngredientMetric::round_sphere(n, 1.0).profile(&grid).unwrap();
        let target = (n * (n - 1)) as f64;
        for r in scalar_curvature_warped(&p).unwrap() {
            worst = worst.max((r - target).abs());
        }
    }
    ok(
        worst <= 1e-9,
        format!("max |R - n(n-1)| over n = 3..7 is {worst:.3e} (tol 1e-9)"),
    )
}

/// `φ = c0 + Σ a_k sin(k w s + ph_k)` and its jets.
fn random_warp(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> (f64, f64, f64) + Clone + Send + Sync + 'static {
    let c0 = rng.random_range(0.8..1.5);
    let w = rng.random_range(0.3..1.2);
    let terms: Vec<(f64, f64, f64)> = (1..=3)
        .map(|k| {
            (
                rng.random_range(-0.15..0.15),
                k as f64 * w,
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    move |s| {
        let mut out = (c0, 0.0, 0.0);
        for &(a, f, ph) in &terms {
            let (sn, cs) = (f * s + ph).sin_cos();
            out.0 += a * sn;
            out.1 += a * f * cs;
            out.2 -= a * f * f * sn;
        }
        out
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let nodes: Vec<f64> = (0..201).map(|i| 2.0 * i as f64 / 200.0).collect();
    let mut worst: f64 = 0.0;
    for n in [3usize, 5] {
        for _ in 0..100 {
            let f = random_warp(&mut rng);
            let profile = WarpProfile::from_fn(nodes.clone(), n - 1, f.clone()).unwrap();
            let r = scalar_curvature_warped(&profile).unwrap();
            let i = rng.random_range(20..181);
            let g = f.clone();
            let chart = CoordinateChartMetric::warped(n - 1, (0.0, 2.0), move |s| g(s).0);
            let mut x = vec![nodes[i]];
            x.extend((0..n - 1).map(|_| rng.random_range(0.6..2.5)));
            let fd = finite_difference_scalar(&chart, &x, 1e-3).unwrap();
            worst = worst.max((fd - r[i]).abs() / r[i].abs().max(1.0));
        }
    }
    ok(
        worst <= 1e-4,
        format!("200 profiles, max relative gap {worst:.3e} at h = 1e-3 (tol 1e-4)"),
    )
}

fn principal_curvatures() -> Outcome {
    let model = AmbientModel::round_sphere(3, 1.0);
    let mut errs = Vec::new();
    let mut pass = true;
    for eps in [0.1, 0.05, 0.025] {
        let d = geodesic_sphere_data(&model, eps).unwrap();
        let e = d
            .principal_curvatures
            .iter()
            .map(|l| (l + 1.0 / eps).abs())
            .fold(0.0, f64::max);
        pass &= e <= eps / 2.0 && d.deviation_c0 <= eps * eps;
        errs.push(e);
    }
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    pass &= ratios.iter().all(|r| (1.5..=2.5).contains(r));
    ok(
        pass,
        format!(
            "|λ + 1/ε| = {:.3e}, {:.3e}, {:.3e}; halving ratios {:.3}, {:.3} (want [1.5, 2.5])",
            errs[0], errs[1], errs[2], ratios[0], ratios[1]
        ),
    )
}

fn gauss_equation() -> Outcome {
    let models = [
        (AmbientModel::round_sphere(3, 1.0), 0.1),
        (AmbientModel::round_sphere(4, 1.0), 0.05),
        (AmbientModel::product_of_rounds(1, 3, 1.0, 1.0), 0.05),
        (AmbientModel::great_sphere_tube(2, 3, 1.0), 0.05),
        (AmbientModel::euclidean(3), 0.1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let designs: Vec<_> = models
        .iter()
        .map(|(m, d)| {
            (
                m,
                design_bending_curve(&CurveDesignParams::new(*m, m.kappa(), *d))
                    .unwrap()
                    .curve,
            )
        })
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (m, c) = &designs[rng.random_range(0..designs.len())];
        let s = rng.random_range(0.0..c.length());
        let g = gauss_scalar_reconstruction(c, m, s).unwrap();
        let r = sigma_scalar_closed_form(m, &c.state_at(s).unwrap());
        worst = worst.max((g - r).abs() / r.abs().max(1.0));
    }
    let mut flat: f64 = 0.0;
    for (m, _) in &models {
        let c = vertical_curve(0.2, 0.05, 64).unwrap();
        for &s in &c.s {
            let g = gauss_scalar_reconstruction(&c, m, s).unwrap();
            flat = flat.max((g - m.kappa()).abs() / m.kappa().max(1.0));
        }
    }
    ok(
        worst <= 1e-6 && flat <= 1e-12,
        format!("50 samples, max relative gap {worst:.3e} (tol 1e-6); θ ≡ 0 gap {flat:.3e} (tol 1e-12)"),
    )
}

fn tunnel() -> Outcome {
    let (_, rep) = build_tunnel(0.1, 2.0, 100.0, 6.0, 3).unwrap();
    let mut per_delta = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for delta in [0.2, 0.1, 0.05] {
        let mut c_delta = 0.0f64;
        for d in [0.0, 1.0, 2.0] {
            let c = build_tunnel(delta, d, 100.0, 6.0, 3).unwrap().1.volume_constant;
            c_delta = c_delta.max(c);
            lo = lo.min(c);
            hi = hi.max(c);
        }
        per_delta.push(c_delta);
    }
    let c_max = per_delta.iter().cloned().fold(0.0, f64::max);
    let c_min = per_delta.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = c_max / c_min;
    let pass = rep.min_r > 6.0 - 0.01 && rep.diameter.lower > 2.0 && spread <= 3.0;
    ok(
        pass,
        format!(
            "min R {:.6}, diam lower {:.4}; C = {c_max:.3}, per-δ spread {spread:.3} (max 3); cell-wise spread {:.2}",
            rep.min_r,
            rep.diameter.lower,
            hi / lo
        ),
    )
}

fn surgery() -> Outcome {
    let model = AmbientModel::product_of_rounds(1, 3, 1.0, 1.0);
    let delta = 0.05;
    let (_, rep) = perform_surgery(&model, delta, 1.0, &GridSpec::default()).unwrap();
    let ratio = rep.volume_after / rep.volume_before;
    let pass = rep.min_r > rep.kappa - delta && (1.0 - delta..=1.0 + delta).contains(&ratio);
    ok(
        pass,
        format!(
            "min R {:.6} vs κ - δ = {:.6}; vol(N)/vol(M) = {ratio:.6}",
            rep.min_r,
            rep.kappa - delta
        ),
    )
}

fn cor_d() -> Outcome {
    let c = pipeline_cor_d(3, 10.0, 100.0, 0.1, &PipelineOptions::default())
        .unwrap()
        .certificate;
    let diam = c.claim_named("diameter").unwrap().lhs;
    ok(
        c.all_pass() && c.global_min_r > 6.0 && diam >= 10.0,
        format!(
            "all claims pass = {}, min R {:.6}, diameter lower {diam:.4}",
            c.all_pass(),
            c.global_min_r
        ),
    )
}

fn cor_v() -> Outcome {
    let v = 6.0 * PI * PI;
    let c = pipeline_cor_v(v, 3, 100.0, 0.1, &PipelineOptions::default())
        .unwrap()
        .certificate;
    let budget = c.claim_named("min_r").unwrap().rhs;
    ok(
        c.all_pass() && c.volume >= v && c.global_min_r > budget,
        format!(
            "volume {:.4} >= {v:.4}; min R {:.6} > {budget:.6}",
            c.volume, c.global_min_r
        ),
    )
}

fn collar_stretch() -> Outcome {
    let path = MetricPath::new(1, 3, (1.0, 0.2), (0.8, 0.1), PathShape::Linear).unwrap();
    let base = path.min_scalar();
    let cs = [1.0, 2.0, 4.0, 8.0];
    let pts: Vec<(f64, f64)> = cs
        .iter()
        .map(|&c| {
            let collar = collar_metric(&CollarSpec::new(path.clone(), c).unwrap()).unwrap();
            let deficit = base - min_scalar(&Profile::Doubly(collar)).unwrap();
            (c.ln(), deficit.ln())
        })
        .collect();
    let k = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / k,
        pts.iter().map(|p| p.1).sum::<f64>() / k,
    );
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let exponent = -slope;
    ok(
        (1.7..=2.3).contains(&exponent),
        format!("fitted decay exponent {exponent:.4} (want [1.7, 2.3])"),
    )
}

/// Paths to every scalar leaf of a JSON value.
fn leaves(v: &serde_json::Value, prefix: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                prefix.push(k.clone());
                leaves(x, prefix, out);
                prefix.pop();
            }
        }
        serde_json::Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                prefix.push(i.to_string());
                leaves(x, prefix, out);
                prefix.pop();
            }
        }
        _ => out.push(prefix.clone()),
    }
}

fn leaf_mut<'a>(v: &'a mut serde_json::Value, path: &[String]) -> &'a mut serde_json::Value {
    path.iter().fold(v, |acc, k| match acc {
        serde_json::Value::Array(a) => &mut a[k.parse::<usize>().unwrap()],
        other => &mut other[k.as_str()],
    })
}

fn tamper(leaf: &mut serde_json::Value, rng: &mut ChaCha8Rng) {
    use serde_json::Value;
    *leaf = match leaf.clone() {
        Value::Number(n) => {
            let x = n.as_f64().unwrap();
            let y = if x == 0.0 {
                1e-6
            } else {
                x * (1.0 + rng.random_range(1e-9..1e-3))
            };
            serde_json::json!(y)
        }
        Value::String(s) => Value::String(format!("{s}~")),
        Value::Bool(b) => Value::Bool(!b),
        Value::Null => serde_json::json!(0),
        other => other,
    };
}

fn integrity() -> Outcome {
    let opts = PipelineOptions::default();
    let text = pipeline_cor_d(3, 4.0, 100.0, 0.1, &opts)
        .unwrap()
        .certificate
        .to_canonical_json();
    let again = pipeline_cor_d(3, 4.0, 100.0, 0.1, &opts)
        .unwrap()
        .certificate
        .to_canonical_json();
    let params = TunnelParams::symmetric(0.1, 1.0, 100.0, 6.0, 3).unwrap();
    let t1 = tunnel_certificate(&params, &opts)
        .unwrap()
        .certificate
        .to_canonical_json();
    let t2 = tunnel_certificate(&params, &opts)
        .unwrap()
        .certificate
        .to_canonical_json();
    let identical = text == again && t1 == t2;

    let base: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut paths = Vec::new();
    leaves(&base, &mut Vec::new(), &mut paths);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut detected = 0;
    for _ in 0..100 {
        let mut v = base.clone();
        let path = &paths[rng.random_range(0..paths.len())];
        tamper(leaf_mut(&mut v, path), &mut rng);
        let caught = match recheck_certificate(&v.to_string()) {
            Ok(rep) => !rep.consistent(),
            Err(_) => true,
        };
        detected += usize::from(caught);
    }
    let clean = recheck_certificate(&text).unwrap().passed();
    ok(
        identical && clean && detected == 100,
        format!("{detected}/100 tampers detected; re-runs byte-identical = {identical}; clean recheck = {clean}"),
    )
}

fn main() {
    let checks: [(&str, Check, Duration); 10] = [
        ("curvature calibration", calibration, Duration::from_secs(1)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(30)),
        (
            "geodesic sphere principal curvatures",
            principal_curvatures,
            Duration::from_secs(5),
        ),
        ("Gauss equation reconstruction", gauss_equation, Duration::from_secs(10)),
        ("tunnel certificate", tunnel, Duration::from_secs(120)),
        ("surgery certificate", surgery, Duration::from_secs(120)),
        ("diameter pipeline", cor_d, Duration::from_secs(120)),
        ("volume pipeline", cor_v, Duration::from_secs(300)),
        ("collar stretch law", collar_stretch, Duration::from_secs(30)),
        ("certificate integrity", integrity, Duration::from_secs(10)),
    ];
    let mut red = 0;
    for (i, (name, check, budget)) in checks.iter().enumerate() {
        let t = Instant::now();
        let out = check();
        let dt = t.elapsed();
        let pass = out.pass && dt <= *budget;
        red += usize::from(!pass);
        println!(
            "ACCEPT {:>2} [{}] {name}: {} ({:.2}s of {}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {red} failed", checks.len() - red);
    if red > 0 {
        std::process::exit(1);
    }
}
