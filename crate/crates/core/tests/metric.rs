use std::f64::consts::PI;

use scalneck::metric::curvature::{scalar_curvature, scalar_curvature_doubly_warped, scalar_curvature_warped};
use scalneck::metric::io::{profile_from_csv, profile_from_json, profile_to_csv, profile_to_json};
use scalneck::metric::{
    diameter, finite_difference_scalar, geodesic_sphere_data, unit_sphere_volume, volume, AmbientModel,
    CoordinateChartMetric, DoublyWarpProfile, GridSpec, Profile, WarpProfile,
};
use scalneck::NeckError;

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn sine_profile(m: usize, a: f64, b: f64, n: usize) -> WarpProfile {
    WarpProfile::from_fn(grid(a, b, n), m, |s| (s.sin(), s.cos(), -s.sin())).unwrap()
}

#[test]
fn round_sphere_curvature_is_constant() {
    for n in 3..=7 {
        let p = sine_profile(n - 1, 0.0, PI, 401);
        let r = scalar_curvature_warped(&p).unwrap();
        let target = (n * (n - 1)) as f64;
        for v in r {
            assert!((v - target).abs() < 1e-9, "n = {n}: {v}");
        }
    }
}

#[test]
fn truncated_sine_has_r_six() {
    let p = sine_profile(2, 0.0, PI - 0.2, 301);
    for v in scalar_curvature_warped(&p).unwrap() {
        assert!((v - 6.0).abs() < 1e-9);
    }
}

#[test]
fn flat_cylinder_and_radius_scaling() {
    let nodes = grid(0.0, 1.0, 50);
    let beta = 0.3;
    let p = DoublyWarpProfile::from_fn(nodes, 1, 3, |_| (1.0, 0.0, 0.0), move |_| (beta, 0.0, 0.0)).unwrap();
    for v in scalar_curvature_doubly_warped(&p).unwrap() {
        assert!((v - 2.0 / (beta * beta)).abs() < 1e-9);
    }
}

#[test]
fn closed_form_matches_oracle_on_a_bump() {
    let f = |s: f64| 0.6 + 0.2 * (2.0 * s).sin();
    let p = WarpProfile::from_fn(grid(0.0, 2.0, 801), 3, |s| {
        (
            0.6 + 0.2 * (2.0 * s).sin(),
            0.4 * (2.0 * s).cos(),
            -0.8 * (2.0 * s).sin(),
        )
    })
    .unwrap();
    let chart = CoordinateChartMetric::warped(3, (0.0, 2.0), f);
    let r = scalar_curvature_warped(&p).unwrap();
    for (i, &s) in p.nodes().iter().enumerate().skip(100).step_by(150).take(4) {
        let fd = finite_difference_scalar(&chart, &[s, 1.1, 1.3, 0.4], 1e-3).unwrap();
        assert!(
            (fd - r[i]).abs() <= 1e-4 * r[i].abs().max(1.0),
            "s = {s}: {fd} vs {}",
            r[i]
        );
    }
}

#[test]
fn oracle_rejects_points_near_the_boundary() {
    let chart = CoordinateChartMetric::round_sphere(3, 1.0);
    let err = finite_difference_scalar(&chart, &[0.001, 1.0, 1.0], 1e-3).unwrap_err();
    assert!(matches!(err, NeckError::BoundaryProximity { .. }));
}

#[test]
fn nonpositive_warp_is_rejected() {
    let nodes = grid(0.0, 1.0, 21);
    let phi = nodes.iter().map(|s| (s - 0.5).abs() - 0.05).collect();
    let err = WarpProfile::from_samples(nodes, phi, 2).unwrap_err();
    assert!(matches!(err, NeckError::NonPositiveWarp { .. }));
}

#[test]
fn sphere_volume_and_diameter() {
    let p = Profile::Warp(sine_profile(2, 0.0, PI, 801));
    let v = volume(&p).unwrap();
    assert!((v - unit_sphere_volume(3)).abs() < 1e-8 * v);
    assert!((unit_sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-12);
    let d = diameter(&p);
    assert!(d.lower <= PI + 1e-12 && d.upper >= PI - 1e-12);
}

#[test]
fn geodesic_spheres_in_flat_space_are_exact() {
    let d = geodesic_sphere_data(&AmbientModel::euclidean(4), 0.2).unwrap();
    assert!(d.principal_curvatures.iter().all(|&l| (l + 5.0).abs() < 1e-14));
    assert_eq!(d.deviation_c0, 0.0);
    let err = geodesic_sphere_data(&AmbientModel::round_sphere(3, 1.0), 4.0).unwrap_err();
    assert!(matches!(err, NeckError::RadiusOutOfRange { .. }));
}

#[test]
fn json_and_csv_round_trip_bit_for_bit() {
    let p = Profile::Warp(sine_profile(3, 0.1, 2.0, 97));
    let back = profile_from_json(&profile_to_json(&p)).unwrap();
    assert_eq!(back, p);
    let back = profile_from_csv(&profile_to_csv(&p), 3).unwrap();
    assert_eq!(scalar_curvature(&back).unwrap(), scalar_curvature(&p).unwrap());
}

#[test]
fn constant_profile_is_a_cylinder() {
    let p = WarpProfile::constant(3.0, 0.5, 2, &GridSpec::default()).unwrap();
    for v in scalar_curvature_warped(&p).unwrap() {
        assert!((v - 8.0).abs() < 1e-9);
    }
}
