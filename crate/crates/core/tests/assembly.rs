use scalneck::assembly::{
    boundary_homotopy, build_tunnel, cap_piece, collar_metric, perform_surgery, stretch_search, Assembly, CollarSpec,
    MetricPath, PathShape, Piece, PortRef, Provenance, Role,
};
use scalneck::metric::curvature::min_scalar;
use scalneck::metric::{AmbientModel, GridSpec, Profile, WarpProfile};
use scalneck::NeckError;

#[test]
fn tunnel_keeps_the_floor_and_the_length() {
    let (asm, rep) = build_tunnel(0.1, 2.0, 100.0, 6.0, 3).unwrap();
    assert!(rep.min_r > 6.0 - 0.01, "{}", rep.min_r);
    assert!(rep.diameter.lower > 2.0);
    assert!(rep.max_jet_mismatch <= 1e-8);
    assert!(rep.end_isometry_error < 1e-9);
    assert_eq!(asm.min_r(), rep.min_r);
    let d = asm.diameter().unwrap();
    assert!(d.lower <= d.upper);
}

#[test]
fn tunnel_loss_shrinks_with_j() {
    let mins: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&j| build_tunnel(0.1, 1.0, j, 6.0, 3).unwrap().1.min_r)
        .collect();
    assert!(mins[0] < mins[1] && mins[1] < mins[2], "{mins:?}");
    assert!(mins[2] > 6.0 - 1e-3);
}

#[test]
fn flat_tunnel_loses_at_most_one_over_j() {
    let (_, rep) = build_tunnel(0.1, 0.5, 50.0, 0.0, 4).unwrap();
    assert!(rep.min_r > -1.0 / 50.0);
}

#[test]
fn surgery_on_a_product_stays_above_budget() {
    let model = AmbientModel::product_of_rounds(1, 3, 1.0, 1.0);
    let (asm, rep) = perform_surgery(&model, 0.05, 1.0, &GridSpec::default()).unwrap();
    assert!(rep.min_r > rep.kappa - 0.05);
    assert!(rep.relative_volume_change <= 0.05);
    assert!(rep.max_jet_mismatch <= 1e-8);
    assert!(asm.verify(rep.kappa - 0.05).is_ok());
}

#[test]
fn surgery_needs_codimension_three() {
    let model = AmbientModel::product_of_rounds(2, 2, 1.0, 1.0);
    let err = perform_surgery(&model, 0.05, 1.0, &GridSpec::default()).unwrap_err();
    assert_eq!(err, NeckError::CodimensionTooSmall { q: 2 });
}

#[test]
fn cap_is_smooth_and_positively_curved() {
    let (cap, iface) = cap_piece(1, 3, 0.3).unwrap();
    assert!(min_scalar(&Profile::Doubly(cap)).unwrap() > 0.0);
    assert!(!iface.jet.is_empty());
}

#[test]
fn collar_deficit_falls_with_stretch() {
    let path = MetricPath::new(1, 3, (1.0, 0.2), (1.0, 0.1), PathShape::Linear).unwrap();
    let base = path.min_scalar();
    let deficit = |c: f64| {
        let collar = collar_metric(&CollarSpec::new(path.clone(), c).unwrap()).unwrap();
        base - min_scalar(&Profile::Doubly(collar)).unwrap()
    };
    let (d1, d4) = (deficit(1.0), deficit(4.0));
    assert!(d1 > 0.0 && d4 < d1 / 8.0, "{d1} -> {d4}");
}

#[test]
fn stretch_search_meets_the_floor() {
    let path = MetricPath::new(1, 3, (1.0, 0.2), (1.0, 0.1), PathShape::Smooth).unwrap();
    let floor = path.min_scalar() - 0.5;
    let (c, collar) = stretch_search(&path, floor, 1.0).unwrap();
    assert!(c >= 1.0);
    assert!(min_scalar(&Profile::Doubly(collar)).unwrap() > floor);
}

#[test]
fn homotopy_from_a_cap_boundary() {
    let (_, iface) = cap_piece(1, 3, 0.3).unwrap();
    let kappa = 2.0 / (0.3f64 * 0.3);
    let path = boundary_homotopy(&iface, 0.15, kappa, 1.0).unwrap();
    assert!(path.min_scalar() > kappa - 1.0);
}

fn cyl(len: f64, r: f64) -> Piece {
    let w = WarpProfile::constant(len, r, 2, &GridSpec::default()).unwrap();
    Piece::from_profile(Role::Neck, "cyl", Profile::Warp(w)).unwrap()
}

#[test]
fn mismatched_ports_are_refused() {
    let mut asm = Assembly::new(Provenance::default());
    let a = asm.add(cyl(1.0, 0.5));
    let b = asm.add(cyl(1.0, 0.6));
    let err = asm.join(PortRef::end(a), PortRef::start(b)).unwrap_err();
    assert!(matches!(err, NeckError::InterfaceMismatch { .. }));
}

#[test]
fn chain_volume_adds_up() {
    let mut asm = Assembly::new(Provenance::default());
    asm.push_chain(cyl(1.0, 0.5)).unwrap();
    asm.push_chain(cyl(2.0, 0.5)).unwrap();
    let single = cyl(3.0, 0.5);
    let mut one = Assembly::new(Provenance::default());
    one.push_chain(single).unwrap();
    assert!((asm.volume() - one.volume()).abs() < 1e-9 * one.volume());
    let d = asm.diameter().unwrap();
    assert!((d.lower - 3.0).abs() < 1e-12);
}
