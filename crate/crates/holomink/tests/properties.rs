use holomink::forward::{face_holonomies, roundtrip, transport_matrix};
use holomink::lorentz::{eta_sigma, inertia_congruence, inertia_eigen, AmbientVector, GramData, TangentVector};
use holomink::reconstruct::{reconstruct, spin_reconstruct, stabilizer_uniqueness_check, Config};
use holomink::sample::{random_admissible, random_closing, random_face, random_of_class};
use holomink::scalar::{Rational, Scalar, Tolerances};
use holomink::sl2r::{fix_central_signs, lift, project_matrix, spin_closure};
use holomink::so12::{exp_axis, exp_parabolic, parabolic_log, stabilizer_coordinate, HolonomyClass};
use holomink::{Error, Sigma};
use nalgebra::{DMatrix, Matrix3, Matrix4, Vector4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn minor_identity_on_random_quadruples() {
    let config = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (_, report) = random_admissible(&mut rng, &config);
        for i in 0..4 {
            let c2 = report.chi[i] * report.chi[i];
            let d = (report.gram.minors[i] + c2).abs() / c2.max(1.0);
            worst = worst.max(d);
        }
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn forward_reproduces_random_inputs() {
    let config = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..200 {
        let (_, report) = random_admissible(&mut rng, &config);
        assert!(report.diagnostics.max_match() <= 1e-9, "{:e}", report.diagnostics.max_match());
        assert!(report.chi.iter().all(|&c| c > 0.0));
        assert!(report.tetrahedron.supports.iter().all(|&h| h < 0.0));
        let s = report.sigma.sign() as f64;
        assert!(s * report.gram.det < 0.0);
    }
}

#[test]
fn reconstruction_is_gauge_covariant() {
    let config = Config::default();
    let tol = config.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..50 {
        let (os, report) = random_admissible(&mut rng, &config);
        let g = random_face(&mut rng, &tol);
        let gi = g.inverse();
        let conj = os.clone().map(|o| holomink::so12::check_so12(&(g.matrix() * o.matrix() * gi.matrix()), &tol).unwrap());
        let other = reconstruct(&conj, &config).unwrap();
        let scale = report.gram.entries.amax().max(1.0);
        assert!((other.gram.entries - report.gram.entries).amax() <= 1e-8 * scale);
        assert_eq!(other.sigma, report.sigma);
        for i in 0..4 {
            assert!((other.chi[i] - report.chi[i]).abs() <= 1e-8 * scale.powi(2));
            assert!((other.tetrahedron.supports[i] - report.tetrahedron.supports[i]).abs() <= 1e-7);
            assert!((other.normals[i].representative - g.matrix() * report.normals[i].representative).amax() <= 1e-7 * scale);
        }
    }
}

#[test]
fn spin_route_agrees_with_vector_route() {
    let config = Config::default();
    let tol = config.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..100 {
        let (os, report) = random_admissible(&mut rng, &config);
        let mut hs = os.clone().map(|o| lift(&o, &tol).unwrap());
        if rng.gen_bool(0.5) {
            hs[2] = hs[2].negated();
        }
        let spin = spin_reconstruct(&hs, &config).unwrap();
        let scale = report.gram.entries.amax().max(1.0);
        assert!((spin.gram.entries - report.gram.entries).amax() <= 1e-8 * scale);
        assert_eq!(spin.branch_signs, report.branch_signs);
        assert_eq!(spin.sigma, report.sigma);
    }
}

#[test]
fn cover_consistency_across_classes() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let classes = [HolonomyClass::Elliptic, HolonomyClass::Hyperbolic, HolonomyClass::Parabolic];
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let o = random_of_class(&mut rng, classes[k % 3], &tol);
        let h = lift(&o, &tol).unwrap();
        worst = worst.max((project_matrix(&h) - o.matrix()).amax() / o.matrix().amax());
    }
    assert!(worst <= 1e-12, "{worst:e}");
}

#[test]
fn lifted_closing_quadruples_close_after_sign_fixing() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut done = 0;
    while done < 300 {
        let Some(os) = random_closing(&mut rng, &tol) else { continue };
        if os.iter().any(|o| o.matrix().amax() > 40.0) {
            continue;
        }
        let hs = os.map(|o| lift(&o, &tol).unwrap());
        let (eps, _) = spin_closure(&hs, &tol).unwrap();
        let fixed = fix_central_signs(&hs, eps);
        let (eps2, r) = spin_closure(&fixed, &tol).unwrap();
        assert_eq!(eps2, 1);
        assert!(r <= 1e-12 * hs.iter().map(|h| h.matrix().amax().powi(4)).fold(1.0, f64::max), "{r:e}");
        done += 1;
    }
}

#[test]
fn exact_inertia_matches_eigenvalue_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for k in 0..1000 {
        let mut q = DMatrix::<Rational>::zeros(4, 4);
        let mut f = DMatrix::<f64>::zeros(4, 4);
        for i in 0..4 {
            for j in i..4 {
                // integers in [−5,5], with some rank-deficient matrices mixed in
                let v: i64 = rng.gen_range(-5..=5);
                q[(i, j)] = Rational::from_i64(v);
                q[(j, i)] = Rational::from_i64(v);
                f[(i, j)] = v as f64;
                f[(j, i)] = v as f64;
            }
        }
        if k % 5 == 0 {
            for j in 0..4 {
                let v = q[(0, j)].clone() + q[(1, j)].clone();
                q[(3, j)] = v.clone();
                q[(j, 3)] = v;
                f[(3, j)] = f[(0, j)] + f[(1, j)];
                f[(j, 3)] = f[(3, j)];
            }
            q[(3, 3)] = q[(0, 0)].clone() + q[(1, 1)].clone() + q[(0, 1)].clone() * Rational::from_i64(2);
            f[(3, 3)] = f[(0, 0)] + f[(1, 1)] + 2.0 * f[(0, 1)];
        }
        assert_eq!(inertia_congruence(&q, 0.0), inertia_eigen(&f, 1e-9), "{f}");
    }
}

#[test]
fn transport_is_an_isometry_between_tangent_spaces() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for sigma in [Sigma::DeSitter, Sigma::AntiDeSitter] {
        let eta = eta_sigma::<f64>(sigma);
        let s = sigma.sign() as f64;
        let mut n = 0;
        while n < 100 {
            let p = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let q = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let np = (p.transpose() * eta * p)[(0, 0)] * s;
            let nq = (q.transpose() * eta * q)[(0, 0)] * s;
            if np < 0.05 || nq < 0.05 {
                continue;
            }
            let p = AmbientVector::new(p / np.sqrt(), sigma);
            let q = AmbientVector::new(q / nq.sqrt(), sigma);
            let Ok(r) = transport_matrix(&p, &q, &tol) else { continue };
            assert!((r * p.coords - q.coords).amax() < 1e-9);
            let back = transport_matrix(&q, &p, &tol).unwrap();
            assert!((back * r - Matrix4::identity()).amax() < 1e-8 * r.amax().powi(2));
            assert!((r.transpose() * eta * r - eta).amax() < 1e-8 * r.amax().powi(2));
            n += 1;
        }
    }
}

#[test]
fn stabilizer_coordinates_are_unique() {
    let config = Config::default();
    let tol = config.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    for _ in 0..50 {
        let (os, report) = random_admissible(&mut rng, &config);
        if report.normals.iter().any(|n| n.nu == 0) {
            continue;
        }
        let s: [f64; 4] = std::array::from_fn(|i| stabilizer_coordinate(os[i].matrix(), &report.normals[i]));
        assert!(stabilizer_uniqueness_check(&report.normals, &s, &s, &tol).unwrap());
        let mut t = s;
        t[0] += 0.3;
        match stabilizer_uniqueness_check(&report.normals, &s, &t, &tol) {
            Err(Error::HypothesisViolated(_)) => {}
            other => panic!("perturbed coordinates accepted: {other:?}"),
        }
    }
}

#[test]
fn roundtrip_on_reconstructed_grams() {
    let config = Config::default();
    let tol = config.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut checked = 0;
    while checked < 50 {
        let (_, report) = random_admissible(&mut rng, &config);
        let g = GramData::new(report.gram.entries, &tol).unwrap();
        let Ok(rt) = roundtrip(&g, report.sigma, &tol) else { continue };
        let scale = g.entries.amax().max(1.0);
        assert!(rt.entry_deviation <= 1e-8 * scale, "{:e}", rt.entry_deviation);
        assert!(rt.closure_residual <= 1e-9 * scale.powi(4));
        checked += 1;
    }
}

#[test]
fn forward_face_holonomies_fix_their_normals() {
    let config = Config::default();
    let tol = config.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for _ in 0..50 {
        let (_, report) = random_admissible(&mut rng, &config);
        let fh = face_holonomies(&report.tetrahedron, &tol).unwrap();
        for i in 0..4 {
            let o = fh.holonomies[i].matrix();
            let n = fh.normals[i];
            assert!((o * n - n).amax() <= 1e-8 * o.amax() * n.amax().max(1.0));
        }
    }
}

proptest! {
    #[test]
    fn parabolic_log_inverts_exp(a in -3.0f64..3.0, b in -3.0f64..3.0, up in any::<bool>()) {
        let tol = Tolerances::default();
        let r = (a * a + b * b).sqrt();
        prop_assume!(r > 1e-3);
        let k = TangentVector::new(if up { r } else { -r }, a, b);
        let o = exp_parabolic(&k, &tol).unwrap();
        prop_assert!((parabolic_log(o.matrix()) - k).amax() < 1e-10 * r.max(1.0).powi(2));
    }

    #[test]
    fn exact_parabolic_exp_is_exact(p in -6i64..6, q in -6i64..6) {
        let tol = Tolerances::default();
        prop_assume!(p != 0 || q != 0);
        // (p²+q², 2pq, p²−q²) is null
        let (p, q) = (Rational::from_i64(p), Rational::from_i64(q));
        let k = TangentVector::new(p.clone() * p.clone() + q.clone() * q.clone(), Rational::from_i64(2) * p.clone() * q.clone(), p.clone() * p - q.clone() * q);
        let o = exp_parabolic(&k, &tol).unwrap();
        prop_assert_eq!(parabolic_log(o.matrix()), k);
    }

    #[test]
    fn lift_projects_back(a in -1.5f64..1.5, b in -1.5f64..1.5, t in 0.05f64..6.2) {
        let tol = Tolerances::default();
        let n = TangentVector::new((1.0 + a * a + b * b).sqrt(), a, b);
        let o = exp_axis(&n, t, &tol).unwrap();
        let h = lift(&o, &tol).unwrap();
        let d: Matrix3<f64> = project_matrix(&h) - o.matrix();
        prop_assert!(d.amax() < 1e-12 * o.matrix().amax());
    }
}
