use scalneck::bending::{
    design_bending_curve, gauss_scalar_reconstruction, induce_sigma_metric, principal_curvatures_sigma, vertical_curve,
    CurveDesignParams,
};
use scalneck::metric::curvature::scalar_curvature;
use scalneck::metric::AmbientModel;
use scalneck::NeckError;

fn round3() -> AmbientModel {
    AmbientModel::round_sphere(3, 1.0)
}

#[test]
fn designed_neck_keeps_the_budget() {
    let d = design_bending_curve(&CurveDesignParams::new(round3(), 6.0, 0.1)).unwrap();
    let rep = &d.report;
    assert!(rep.min_r_closed_form > 5.9, "{}", rep.min_r_closed_form);
    assert!(rep.min_r_gauss > 5.9);
    assert!(rep.eta < rep.tube_radius);
    assert!(rep.achieved_c <= 4.0);
    assert!(d.curve.is_theta_monotone());
    assert!(d.curve.is_r_monotone());
    assert!(rep.unit_speed_defect < 1e-9);
}

#[test]
fn curve_starts_vertical_and_ends_horizontal() {
    let d = design_bending_curve(&CurveDesignParams::new(round3(), 6.0, 0.1)).unwrap();
    let c = &d.curve;
    assert_eq!(c.theta[0], 0.0);
    assert!((c.theta[c.len() - 1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!(c.vertical_prefix() > 0.0);
    assert!((c.r[0] - 1.98 * 0.1).abs() < 1e-12);
}

#[test]
fn induced_metric_agrees_with_gauss_equation() {
    let model = round3();
    let d = design_bending_curve(&CurveDesignParams::new(model, 6.0, 0.1)).unwrap();
    let sigma = induce_sigma_metric(&d.curve, &model).unwrap();
    let r = scalar_curvature(&sigma).unwrap();
    let c = &d.curve;
    for i in (1..c.len() - 1).step_by(c.len() / 40 + 1) {
        let g = gauss_scalar_reconstruction(c, &model, c.s[i]).unwrap();
        assert!(
            (g - r[i]).abs() <= 1e-6 * r[i].abs().max(1.0),
            "node {i}: {g} vs {}",
            r[i]
        );
    }
}

#[test]
fn first_principal_curvature_is_geodesic_curvature() {
    let model = round3();
    let d = design_bending_curve(&CurveDesignParams::new(model, 6.0, 0.1)).unwrap();
    let c = &d.curve;
    let i = c.len() / 2;
    let lam = principal_curvatures_sigma(c, &model, c.s[i]).unwrap();
    assert_eq!(lam.len(), 3);
    assert!((lam[0] - c.k[i]).abs() < 1e-12);
}

#[test]
fn vertical_segment_reproduces_the_ambient_curvature() {
    let model = AmbientModel::product_of_rounds(1, 3, 1.0, 1.0);
    let c = vertical_curve(0.2, 0.05, 64).unwrap();
    for &s in &c.s[..c.len() - 1] {
        let g = gauss_scalar_reconstruction(&c, &model, s).unwrap();
        assert!((g - model.kappa()).abs() <= 1e-12 * model.kappa());
    }
}

#[test]
fn codimension_two_is_refused() {
    let model = AmbientModel::product_of_rounds(2, 2, 1.0, 1.0);
    let err = design_bending_curve(&CurveDesignParams::new(model, model.kappa(), 0.1)).unwrap_err();
    assert_eq!(err, NeckError::CodimensionTooSmall { q: 2 });
}

#[test]
fn parameter_outside_the_curve_is_an_error() {
    let c = vertical_curve(0.2, 0.05, 16).unwrap();
    let err = gauss_scalar_reconstruction(&c, &round3(), 1.0).unwrap_err();
    assert!(matches!(err, NeckError::ParameterOutOfRange { .. }));
}

#[test]
fn floor_above_the_ambient_curvature_is_invalid() {
    let err = design_bending_curve(&CurveDesignParams::new(round3(), 7.0, 0.1)).unwrap_err();
    assert!(matches!(err, NeckError::InvalidParameter(_)));
}
