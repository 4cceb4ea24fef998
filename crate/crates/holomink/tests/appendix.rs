use holomink::forward::roundtrip;
use holomink::lorentz::TangentVector;
use holomink::reconstruct::{reconstruct, spin_reconstruct, Config};
use holomink::scalar::{Quadratic, Rational, Scalar, Tolerances};
use holomink::sectors::{classify_sector, DualVertexType, ModelLabel, VertexType};
use holomink::sl2r::{lift, project, spin_closure, SpinHolonomy};
use holomink::so12::{check_so12, closing_fourth, exp_axis, exp_parabolic, HolonomyClass, VectorHolonomy};
use holomink::{Error, GramData, Inertia, Sigma};
use nalgebra::{Matrix2, Matrix3};

fn q(s: &str) -> Quadratic {
    s.parse().unwrap()
}

fn gram(entries: [&str; 10]) -> GramData<Quadratic> {
    GramData::from_upper(entries.map(q), &Tolerances::default()).unwrap()
}

fn g_ell_fin() -> GramData<Quadratic> {
    gram(["-1", "-3/2", "-5/4", "-5/4", "-1", "-3/2", "-5/4", "-1", "-7/4", "-1"])
}
fn g_ell_hypid() -> GramData<Quadratic> {
    gram(["-1", "0", "-1/4", "1", "-1", "1", "-1/4", "-1", "1/2", "-1"])
}
fn g_ell_id() -> GramData<Quadratic> {
    gram(["-1", "7/4", "2", "-4", "-1", "-7/2+3/4*sqrt(11)", "2", "-1", "9/4", "-1"])
}
fn g_null_fin() -> GramData<Quadratic> {
    gram(["0", "-6", "18", "6", "0", "6", "18", "0", "-6", "0"])
}
fn g_null_hypid() -> GramData<Quadratic> {
    gram(["0", "-3", "-3", "-1/2", "0", "1/2", "1", "0", "1/2", "0"])
}
fn g_null_id() -> GramData<Quadratic> {
    gram(["0", "-1", "7/2", "0", "0", "0", "-2", "0", "7/4", "0"])
}
fn g_hyp_fin() -> GramData<Quadratic> {
    gram(["1", "-2", "-2", "-2", "1", "-3/4", "1/2", "1", "3/4", "1"])
}
fn g_hyp_hypid() -> GramData<Quadratic> {
    gram(["1", "-3/2", "3", "3/2", "1", "-3/2", "-3/2", "1", "3/2", "1"])
}
fn g_hyp_id() -> GramData<Quadratic> {
    gram(["1", "-1/2", "-1", "-2", "1", "0", "-1/2", "1", "2", "1"])
}

fn qs(v: [&str; 4]) -> [Quadratic; 4] {
    v.map(q)
}

#[test]
fn exact_determinants_and_minors() {
    let cases = [
        (g_ell_fin(), "9/256", qs(["-11/16", "-9/32", "-5/16", "-9/16"])),
        (g_ell_hypid(), "1/256", qs(["1/16", "1/16", "1/16", "1/16"])),
        (g_ell_id(), "", qs(["-5+3/2*sqrt(11)", "-191/16", "-95/16", "0"])),
        (g_null_fin(), "58320", qs(["-1296", "-1296", "-1296", "-1296"])),
        (g_null_hypid(), "1/16", qs(["1/2", "3/2", "3", "9"])),
        (g_null_id(), "441/16", qs(["0", "0", "0", "0"])),
        (g_hyp_fin(), "17/16", qs(["-15/16", "-25/16", "-13/4", "-217/16"])),
        (g_hyp_hypid(), "1", qs(["1", "1", "1", "1"])),
        (g_hyp_id(), "3/4", qs(["-13/4", "0", "-9/2", "-1/4"])),
    ];
    for (g, det, minors) in cases {
        if det.is_empty() {
            assert!((g.det.to_f64() - 0.161962).abs() < 5e-7, "{}", g.det);
        } else {
            assert_eq!(g.det, q(det));
        }
        assert_eq!(g.minors, minors);
        assert_eq!(g.inertia, Inertia::new(0, 2, 2));
    }
}

#[test]
fn minor_inertias_match_printed_sectors() {
    let fin = Inertia::new(0, 1, 2);
    let hyp = Inertia::new(0, 2, 1);
    let ideal = Inertia::new(1, 1, 1);
    assert_eq!(g_ell_fin().minor_inertias, [fin; 4]);
    assert_eq!(g_ell_hypid().minor_inertias, [hyp; 4]);
    assert_eq!(g_ell_id().minor_inertias, [fin, fin, fin, ideal]);
    assert_eq!(g_null_fin().minor_inertias, [fin; 4]);
    assert_eq!(g_null_hypid().minor_inertias, [hyp; 4]);
    assert_eq!(g_null_id().minor_inertias, [ideal; 4]);
    assert_eq!(g_hyp_fin().minor_inertias, [fin; 4]);
    assert_eq!(g_hyp_hypid().minor_inertias, [hyp; 4]);
    assert_eq!(g_hyp_id().minor_inertias, [fin, ideal, fin, fin]);
}

#[test]
fn sector_labels() {
    use VertexType::*;
    let tol = Tolerances::default();
    let labels = [
        (g_ell_fin(), [Finite; 4]),
        (g_ell_hypid(), [Hyperideal; 4]),
        (g_ell_id(), [Finite, Finite, Finite, Ideal]),
        (g_null_fin(), [Finite; 4]),
        (g_null_hypid(), [Hyperideal; 4]),
        (g_null_id(), [Ideal; 4]),
        (g_hyp_fin(), [Finite; 4]),
        (g_hyp_hypid(), [Hyperideal; 4]),
        (g_hyp_id(), [Finite, Ideal, Finite, Finite]),
    ];
    for (g, want) in labels {
        let r = classify_sector(&g, None, &tol);
        assert_eq!(r.model, ModelLabel::AntiDeSitter);
        assert_eq!(r.vertex_types, want);
    }
    let r = classify_sector(&g_null_id(), None, &tol);
    assert_eq!(r.dual_vertex_types, Some([DualVertexType::Ideal; 4]));
    let r = classify_sector(&g_hyp_fin(), None, &tol);
    assert_eq!(r.dual_vertex_types, Some([DualVertexType::Hyperideal; 4]));
    let r = classify_sector(&g_ell_fin(), None, &tol);
    assert_eq!(r.dual_vertex_types, Some([DualVertexType::Ordinary; 4]));
}

#[test]
fn roundtrips_reproduce_finite_grams() {
    let tol = Tolerances::default();
    for g in [g_ell_fin(), g_null_fin(), g_hyp_fin()] {
        let r = roundtrip(&g, Sigma::AntiDeSitter, &tol).unwrap();
        assert!(r.entry_deviation <= 1e-9, "entries {:e}", r.entry_deviation);
        assert!(r.closure_residual <= 1e-12, "closure {:e}", r.closure_residual);
        assert!(r.det_deviation <= 1e-9, "det {:e}", r.det_deviation);
        assert!(r.minor_deviation <= 1e-9, "minors {:e}", r.minor_deviation);
        assert!(r.spin_closure_residual <= 1e-12);
        assert!(r.tetrahedron.supports.iter().all(|&h| h < 0.0));
    }
}

#[test]
fn roundtrip_holonomy_classes_follow_face_types() {
    let tol = Tolerances::default();
    let cases = [
        (g_ell_fin(), HolonomyClass::Elliptic),
        (g_null_fin(), HolonomyClass::Parabolic),
        (g_hyp_fin(), HolonomyClass::Hyperbolic),
    ];
    for (g, class) in cases {
        let r = roundtrip(&g, Sigma::AntiDeSitter, &tol).unwrap();
        assert!(r.holonomies.iter().all(|o| o.class() == class));
    }
}

fn approx_lift(rows: [[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
}

/// Traces are conjugation invariant; the printed 5-digit lifts fix them to 1e-4.
#[test]
fn roundtrip_lift_traces_match_printed_tables() {
    let tol = Tolerances::default();
    let ell = [
        [[0.29835, 0.95446], [-0.95446, 0.29835]],
        [[-0.17273, 2.5787], [-0.37622, -0.17273]],
        [[0.12306, 1.4000], [-0.80762, -1.0617]],
        [[-0.052243, 0.50048], [-1.9735, -0.23556]],
    ];
    let hyp = [
        [[1.0004, 0.029217], [0.029217, 1.0004]],
        [[-1.0009, -0.011435], [-0.15927, -1.0009]],
        [[-0.87103, 0.045694], [-0.29189, -1.1328]],
        [[1.1514, 0.010531], [-0.50599, 0.86387]],
    ];
    for (g, table) in [(g_ell_fin(), ell), (g_hyp_fin(), hyp)] {
        let r = roundtrip(&g, Sigma::AntiDeSitter, &tol).unwrap();
        for i in 0..4 {
            let t = approx_lift(table[i]).trace();
            let ours = r.lifts[i].matrix().trace();
            assert!((t.abs() - ours.abs()).abs() < 1e-4, "face {i}: {t} vs {ours}");
        }
    }
}

#[test]
fn printed_lift_of_first_elliptic_face() {
    // H₁ lifts an elliptic element with trace 2·0.29835; our O₁ must have the same class invariant.
    let tol = Tolerances::default();
    let r = roundtrip(&g_ell_fin(), Sigma::AntiDeSitter, &tol).unwrap();
    let h1 = r.lifts[0].matrix();
    assert!((h1.trace().abs() - 2.0 * 0.29835).abs() < 1e-4);
}

fn int_spin(a: i64, b: i64, c: i64, d: i64) -> SpinHolonomy<Rational> {
    let m = Matrix2::new(Rational::from_i64(a), Rational::from_i64(b), Rational::from_i64(c), Rational::from_i64(d));
    SpinHolonomy::new(m, &Tolerances::default()).unwrap()
}

fn null_lifts() -> [SpinHolonomy<Rational>; 4] {
    [int_spin(1, -3, 0, 1), int_spin(-1, -4, 1, 3), int_spin(4, 3, -3, -2), int_spin(3, 4, -1, -1)]
}

#[test]
fn null_spin_lifts_close_exactly() {
    let (eps, res) = spin_closure(&null_lifts(), &Tolerances::default()).unwrap();
    assert_eq!(eps, 1);
    assert_eq!(res, Rational::from_i64(0));
}

#[test]
fn null_spin_lifts_reconstruct_null_fin() {
    let tol = Tolerances::default();
    let hs: [SpinHolonomy; 4] = null_lifts().map(|h| SpinHolonomy::new(h.matrix().map(|x| x.to_f64()), &tol).unwrap());
    let report = spin_reconstruct(&hs, &Config::default()).unwrap();
    assert_eq!(report.sigma, Sigma::AntiDeSitter);
    assert_eq!(report.classes, [HolonomyClass::Parabolic; 4]);
    let want = g_null_fin().to_f64();
    let dev = (report.gram.entries - want.entries).amax();
    assert!(dev < 1e-9, "{dev:e}\n{}", report.gram.entries);
    assert!((report.gram.det - 58320.0).abs() < 1e-6);
    assert!(report.diagnostics.max_match() < 1e-9);
}

#[test]
fn null_spin_lifts_project_to_exact_parabolics() {
    let tol = Tolerances::default();
    for h in null_lifts() {
        let o: VectorHolonomy<Rational> = project(&h, &tol).unwrap();
        assert_eq!(o.class(), HolonomyClass::Parabolic);
    }
}

fn elliptic_inputs() -> [VectorHolonomy; 4] {
    let tol = Tolerances::default();
    let (c, s) = (0.6f64.cosh(), 0.6f64.sinh());
    let r3 = 3f64.sqrt() / 2.0;
    let n1 = TangentVector::new(c, s, 0.0);
    let n2 = TangentVector::new(c, -s / 2.0, r3 * s);
    let n3 = TangentVector::new(c, -s / 2.0, -r3 * s);
    let o1 = exp_axis(&n1, 0.4, &tol).unwrap();
    let o2 = exp_axis(&n2, 0.5, &tol).unwrap();
    let o3 = exp_axis(&n3, 0.45, &tol).unwrap();
    let o4 = check_so12(&closing_fourth(o1.matrix(), o2.matrix(), o3.matrix()), &tol).unwrap();
    [o1, o2, o3, o4]
}

fn mixed_inputs() -> [VectorHolonomy; 4] {
    let tol = Tolerances::default();
    let (c, s) = (0.8f64.cosh(), 0.8f64.sinh());
    let k1 = TangentVector::new(-1.0, -1.0, 0.0);
    let n2 = TangentVector::new(c, -s, 0.0);
    let n3 = TangentVector::new(s, c / 2f64.sqrt(), c / 2f64.sqrt());
    let o1 = exp_parabolic(&k1, &tol).unwrap();
    let o2 = exp_axis(&n2, 1.0, &tol).unwrap();
    let o3 = exp_axis(&n3, 0.8, &tol).unwrap();
    let o4 = check_so12(&closing_fourth(o1.matrix(), o2.matrix(), o3.matrix()), &tol).unwrap();
    [o1, o2, o3, o4]
}

fn close(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
}

#[test]
fn elliptic_example() {
    let os = elliptic_inputs();
    let o4 = Matrix3::new(
        1.057665, -0.030790, -0.343083, -0.338017, -0.099004, 1.050930, 0.066325, -0.995563, -0.115121,
    );
    assert!((os[3].matrix() - o4).amax() < 1e-6);
    assert!((os[3].trace() - 0.843539).abs() < 1e-6);
    let r = reconstruct(&os, &Config::default()).unwrap();
    assert_eq!(r.sigma, Sigma::DeSitter);
    assert_eq!(r.branch_signs, [1, 1, 1, 1]);
    assert!((r.gram.det + 0.240260).abs() < 1e-6);
    assert!(close(&r.chi, &[0.586817, 0.660418, 0.622876, 1.248381], 1e-6));
    assert!(close(&r.gram.minors, &[-0.344354, -0.436151, -0.387974, -1.558455], 1e-6));
    assert!(close(&r.tetrahedron.supports, &[-0.835292, -0.742203, -0.786936, -0.392640], 1e-6));
    let n4 = r.normals[3].representative;
    assert!(close(n4.as_slice(), &[-1.026392, 0.138804, -0.184970], 1e-6));
    let g = r.gram.entries;
    assert!(close(
        &[g[(0, 1)], g[(0, 3)], g[(1, 3)], g[(2, 3)]],
        &[-1.607992, 1.305123, 1.245822, 1.274552],
        1e-6
    ));
    assert!(r.diagnostics.max_match() <= 1e-9);
    assert!(r.tetrahedron.validate(&Tolerances::default()).is_ok());
}

#[test]
fn mixed_example() {
    let os = mixed_inputs();
    let o1 = Matrix3::new(1.5, -0.5, 1.0, 0.5, 0.5, 1.0, 1.0, -1.0, 1.0);
    assert!((os[0].matrix() - o1).amax() < 1e-15);
    assert!((os[3].trace() - 2.301884).abs() < 1e-6);
    let r = reconstruct(&os, &Config::default()).unwrap();
    use HolonomyClass::*;
    assert_eq!(r.classes, [Parabolic, Elliptic, Hyperbolic, Elliptic]);
    assert_eq!(r.sigma, Sigma::AntiDeSitter);
    assert!((r.gram.det - 2.232581).abs() < 1e-6);
    assert!(close(&r.chi, &[2.060349, 1.567645, 1.574870, 2.104715], 1e-6));
    assert!(close(&r.gram.minors, &[-4.245038, -2.457511, -2.480216, -4.429824], 1e-6));
    assert!(close(&r.tetrahedron.supports, &[-0.725208, -0.953138, -0.948765, -0.709921], 1e-6));
    assert!(close(r.normals[3].representative.as_slice(), &[-1.448075, 0.271183, 1.011623], 1e-6));
    assert!(close(r.normals[0].representative.as_slice(), &[-1.0, -1.0, 0.0], 1e-12));
    let g = r.gram.entries;
    assert!(close(
        &[g[(0, 0)], g[(0, 1)], g[(0, 2)], g[(0, 3)], g[(1, 3)], g[(2, 3)]],
        &[0.0, 2.225541, -0.057603, -1.719258, 1.357598, 2.499205],
        1e-6
    ));
    assert!(r.diagnostics.max_match() <= 1e-9);
}

#[test]
fn spin_route_agrees_with_vector_route() {
    let tol = Tolerances::default();
    for os in [elliptic_inputs(), mixed_inputs()] {
        let hs = [lift(&os[0], &tol).unwrap(), lift(&os[1], &tol).unwrap(), lift(&os[2], &tol).unwrap(), lift(&os[3], &tol).unwrap()];
        let a = reconstruct(&os, &Config::default()).unwrap();
        let b = spin_reconstruct(&hs, &Config::default()).unwrap();
        assert!((a.gram.entries - b.gram.entries).amax() < 1e-9);
        assert!(close(&a.chi, &b.chi, 1e-9));
        assert_eq!(a.sigma, b.sigma);
    }
}

#[test]
fn hyperideal_gram_has_wrong_causal_vertex_line() {
    let tol = Tolerances::default();
    let g = g_ell_hypid();
    let n = holomink::lorentz::sylvester_factor(&g, Sigma::AntiDeSitter, &tol).unwrap();
    let r = holomink::reconstruct::vertices_from_normals(&n, Sigma::AntiDeSitter, &tol);
    assert!(matches!(r, Err(Error::WrongCausalVertexLine { .. })));
}

#[test]
fn central_input_is_rejected() {
    let mut os = elliptic_inputs();
    os[1] = check_so12(&Matrix3::identity(), &Tolerances::default()).unwrap();
    assert!(matches!(reconstruct(&os, &Config::default()), Err(Error::CentralHolonomy { index: Some(1) })));
}

#[test]
fn negative_identity_spin_input_is_rejected() {
    let tol = Tolerances::default();
    let os = elliptic_inputs();
    let mut hs = [lift(&os[0], &tol).unwrap(), lift(&os[1], &tol).unwrap(), lift(&os[2], &tol).unwrap(), lift(&os[3], &tol).unwrap()];
    hs[2] = SpinHolonomy::new(-Matrix2::identity(), &tol).unwrap();
    assert!(matches!(spin_reconstruct(&hs, &Config::default()), Err(Error::CentralHolonomy { index: Some(2) })));
}

#[test]
fn roundtrip_vertex_sign_classes() {
    let tol = Tolerances::default();
    assert_eq!(roundtrip(&g_ell_fin(), Sigma::AntiDeSitter, &tol).unwrap().signs, [1, 1, 1, 1]);
    assert_eq!(roundtrip(&g_null_fin(), Sigma::AntiDeSitter, &tol).unwrap().signs, [1, 1, 1, 1]);
    assert_eq!(roundtrip(&g_hyp_fin(), Sigma::AntiDeSitter, &tol).unwrap().signs, [1, -1, -1, 1]);
}
