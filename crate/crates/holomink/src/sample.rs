//! Random closing quadruples and holonomies for property checks.

use nalgebra::Matrix3;
use rand::Rng;

use crate::lorentz::{tangent_pair, TangentVector};
use crate::reconstruct::{reconstruct, Config, ReconstructionReport};
use crate::scalar::Tolerances;
use crate::so12::{check_so12, closing_fourth, exp_axis, exp_parabolic, HolonomyClass, VectorHolonomy};

/// A face generator: unit timelike axis with an angle, unit spacelike axis
/// with a rapidity, or a null vector, chosen with equal odds.
pub fn random_face<R: Rng + ?Sized>(rng: &mut R, tol: &Tolerances) -> VectorHolonomy {
    loop {
        let o = match rng.gen_range(0..3) {
            0 => {
                let (a, b) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                let n = TangentVector::new((1.0f64 + a * a + b * b).sqrt(), a, b);
                exp_axis(&n, rng.gen_range(0.1..3.0), tol)
            }
            1 => {
                let v = TangentVector::new(rng.gen_range(-0.75..0.75), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                let q = tangent_pair(&v, &v);
                if q < 0.05 {
                    continue;
                }
                exp_axis(&(v / q.sqrt()), rng.gen_range(-2.0..2.0), tol)
            }
            _ => {
                let (a, b) = (rng.gen_range(-1.5f64..1.5), rng.gen_range(-1.5f64..1.5));
                let r = (a * a + b * b).sqrt();
                if r < 0.1 {
                    continue;
                }
                let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                exp_parabolic(&TangentVector::new(s * r, a, b), tol)
            }
        };
        if let Ok(o) = o {
            return o;
        }
    }
}

/// Three random faces and the fourth from closure.
pub fn random_closing<R: Rng + ?Sized>(rng: &mut R, tol: &Tolerances) -> Option<[VectorHolonomy; 4]> {
    let a = random_face(rng, tol);
    let b = random_face(rng, tol);
    let c = random_face(rng, tol);
    let d: Matrix3<f64> = closing_fourth(a.matrix(), b.matrix(), c.matrix());
    if (d.trace() - 3.0).abs() < 1e-6 {
        return None;
    }
    let d = check_so12(&d, tol).ok()?;
    if d.class() == HolonomyClass::Central {
        return None;
    }
    Some([a, b, c, d])
}

/// A random closing quadruple that reconstructs with margins
/// min|χ| ≥ 0.05, |det G| ≥ 0.02 and entries at most 40.
pub fn random_admissible<R: Rng + ?Sized>(rng: &mut R, config: &Config) -> ([VectorHolonomy; 4], ReconstructionReport) {
    loop {
        let Some(os) = random_closing(rng, &config.tol) else { continue };
        if os.iter().any(|o| o.matrix().amax() > 40.0) {
            continue;
        }
        let Ok(report) = reconstruct(&os, config) else { continue };
        let min_chi = report.chi.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min);
        if min_chi < 0.05 || report.gram.det.abs() < 0.02 {
            continue;
        }
        return (os, report);
    }
}

/// A random holonomy of the requested class.
pub fn random_of_class<R: Rng + ?Sized>(rng: &mut R, class: HolonomyClass, tol: &Tolerances) -> VectorHolonomy {
    loop {
        let o = random_face(rng, tol);
        if o.class() == class {
            return o;
        }
    }
}
