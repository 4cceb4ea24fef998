//! Vector holonomies in SO⁺(1,2).

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::lorentz::{eta_t, j_inv, j_map, tangent_pair, TangentVector};
use crate::scalar::{within, Scalar, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HolonomyClass {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Central,
}

impl HolonomyClass {
    pub fn name(self) -> &'static str {
        match self {
            HolonomyClass::Elliptic => "elliptic",
            HolonomyClass::Hyperbolic => "hyperbolic",
            HolonomyClass::Parabolic => "parabolic",
            HolonomyClass::Central => "central",
        }
    }
}

/// A validated element of SO⁺(1,2) together with its conjugacy class.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorHolonomy<S: Scalar = f64> {
    matrix: Matrix3<S>,
    class: HolonomyClass,
}

impl<S: Scalar> VectorHolonomy<S> {
    pub fn matrix(&self) -> &Matrix3<S> {
        &self.matrix
    }

    pub fn class(&self) -> HolonomyClass {
        self.class
    }

    pub fn trace(&self) -> S {
        self.matrix.trace()
    }

    pub fn inverse(&self) -> VectorHolonomy<S> {
        VectorHolonomy { matrix: so12_inverse(&self.matrix), class: self.class }
    }

    pub fn into_matrix(self) -> Matrix3<S> {
        self.matrix
    }

    pub fn to_f64(&self) -> VectorHolonomy<f64> {
        VectorHolonomy { matrix: self.matrix.map(|x| x.to_f64()), class: self.class }
    }
}

/// O⁻¹ = η Oᵀ η for O in O(1,2).
pub fn so12_inverse<S: Scalar>(o: &Matrix3<S>) -> Matrix3<S> {
    let eta = eta_t::<S>();
    &eta * o.transpose() * &eta
}

fn max_abs3<S: Scalar>(m: &Matrix3<S>) -> S {
    m.iter().map(|x| x.magnitude()).fold(S::zero(), |a, x| if x > a { x } else { a })
}

/// Scale used for relative residual bounds on the floating backend.
fn scale<S: Scalar>(m: &Matrix3<S>) -> f64 {
    max_abs3(m).to_f64().max(1.0)
}

/// Trace rule with the identity detected first.
pub fn classify<S: Scalar>(m: &Matrix3<S>, tol: &Tolerances) -> HolonomyClass {
    let id_dev = max_abs3(&(m - Matrix3::<S>::identity()));
    if within(&id_dev, tol.class) {
        return HolonomyClass::Central;
    }
    let excess = m.trace() - S::from_i64(3);
    match excess.signum_tol(tol.class * scale(m)) {
        0 => HolonomyClass::Parabolic,
        s if s < 0 => HolonomyClass::Elliptic,
        _ => HolonomyClass::Hyperbolic,
    }
}

/// Validates OᵀηO = η, det O = 1 and O₀₀ > 0, then classifies.
pub fn check_so12<S: Scalar>(m: &Matrix3<S>, tol: &Tolerances) -> Result<VectorHolonomy<S>> {
    let eta = eta_t::<S>();
    let sc = scale(m);
    let metric = max_abs3(&(m.transpose() * &eta * m - &eta));
    if !within(&metric, tol.residual * sc * sc) {
        return Err(Error::MetricViolation { residual: metric.to_f64() });
    }
    let det = crate::lorentz::determinant(&crate::lorentz::to_dynamic(m));
    if !within(&(det.clone() - S::one()), tol.residual * sc * sc * sc) {
        return Err(Error::DetViolation { det: det.to_f64() });
    }
    if m[(0, 0)].signum_tol(0.0) <= 0 {
        return Err(Error::OrientationViolation { o00: m[(0, 0)].to_f64() });
    }
    Ok(VectorHolonomy { matrix: m.clone(), class: classify(m, tol) })
}

/// exp(θ J(n)) for a unit timelike (ν = −1) or unit spacelike (ν = +1) axis.
pub fn exp_axis(n: &TangentVector, theta: f64, tol: &Tolerances) -> Result<VectorHolonomy> {
    let nu = tangent_pair(n, n).signum_tol(tol.class);
    let j = j_map(n);
    let (r, q) = match nu {
        0 => return Err(Error::NullAxis),
        s if s < 0 => (theta.sin(), 1.0 - theta.cos()),
        _ => (theta.sinh(), theta.cosh() - 1.0),
    };
    let m = Matrix3::identity() + j * r + j * j * q;
    check_so12(&m, tol)
}

/// id + J(k) + ½J(k)² for a nonzero null generator; the series terminates.
pub fn exp_parabolic<S: Scalar>(k: &TangentVector<S>, tol: &Tolerances) -> Result<VectorHolonomy<S>> {
    let pairing = tangent_pair(k, k);
    let nonzero = k.iter().any(|x| !x.is_zero_tol(tol.class));
    if !pairing.is_zero_tol(tol.class) || !nonzero {
        return Err(Error::NonNullGenerator { pairing: pairing.to_f64() });
    }
    let j = j_map(k);
    let half = S::ratio(1, 2);
    let m = Matrix3::<S>::identity() + &j + &j * &j * half;
    check_so12(&m, tol)
}

/// Nilpotent logarithm N − N²/2 with N = O − id, read back through J⁻¹.
pub fn parabolic_log<S: Scalar>(o: &Matrix3<S>) -> TangentVector<S> {
    let n = o - Matrix3::<S>::identity();
    let half = S::ratio(1, 2);
    j_inv(&(&n - &n * &n * half))
}

/// Normal line of a non-central holonomy with its stabilizer coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalData {
    pub representative: TangentVector,
    /// Sign of ⟨n,n⟩: −1 timelike, +1 spacelike, 0 null.
    pub nu: i8,
    /// Angle in [0, 2π) when ν = −1, rapidity when ν = +1, absent when ν = 0.
    pub theta: Option<f64>,
}

impl NormalData {
    /// The other branch (−n with the matching coordinate). Not meaningful for
    /// null faces, whose representative is fixed by the logarithm.
    pub fn flipped(&self) -> NormalData {
        debug_assert!(self.nu != 0, "null representatives are never flipped");
        let theta = self.theta.map(|t| match self.nu {
            -1 => wrap_angle(-t),
            _ => -t,
        });
        NormalData { representative: -self.representative, nu: self.nu, theta }
    }

    /// The holonomy this data describes.
    pub fn holonomy(&self) -> Matrix3<f64> {
        match self.theta {
            Some(t) => stabilizer_exp(self, t),
            None => stabilizer_exp(self, 1.0),
        }
    }
}

/// Representative of an angle in [0, 2π).
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Distance on the circle ℝ/2πℤ.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(2.0 * PI - d)
}

/// Ω(s) = exp(J(s n)) in the one-parameter stabilizer of the normal.
pub fn stabilizer_exp(n: &NormalData, s: f64) -> Matrix3<f64> {
    let j = j_map(&n.representative);
    let (r, q) = match n.nu {
        -1 => (s.sin(), 1.0 - s.cos()),
        1 => (s.sinh(), s.cosh() - 1.0),
        _ => (s, 0.5 * s * s),
    };
    Matrix3::identity() + j * r + j * j * q
}

/// Coordinate s with O = Ω(s) along a given normal representative.
pub fn stabilizer_coordinate(o: &Matrix3<f64>, n: &NormalData) -> f64 {
    let a = j_inv(&((o - so12_inverse(o)) * 0.5));
    let rep = &n.representative;
    match n.nu {
        -1 => {
            let sin = -tangent_pair(&a, rep);
            wrap_angle(sin.atan2((o.trace() - 1.0) / 2.0))
        }
        1 => tangent_pair(&a, rep).asinh(),
        _ => {
            let k = parabolic_log(o);
            let i = rep.iamax();
            k[i] / rep[i]
        }
    }
}

/// Kernel direction of a rank-two 3×3 matrix via the largest row cross product.
fn kernel_direction(m: &Matrix3<f64>) -> Vector3<f64> {
    let rows: [Vector3<f64>; 3] = std::array::from_fn(|i| m.row(i).transpose());
    let cands = [rows[0].cross(&rows[1]), rows[0].cross(&rows[2]), rows[1].cross(&rows[2])];
    cands
        .into_iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("three candidates")
}

/// Extracts the fixed normal line and stabilizer coordinate of O.
///
/// Elliptic holonomies past a quarter turn take the axis from the kernel of
/// O − id, which stays accurate up to and including the half-turn where the
/// antisymmetric part vanishes.
pub fn fixed_line(o: &VectorHolonomy, tol: &Tolerances) -> Result<NormalData> {
    let m = o.matrix();
    match o.class() {
        HolonomyClass::Central => Err(Error::CentralHolonomy { index: None }),
        HolonomyClass::Parabolic => {
            Ok(NormalData { representative: parabolic_log(m), nu: 0, theta: None })
        }
        HolonomyClass::Hyperbolic => {
            let a = j_inv(&((m - so12_inverse(m)) * 0.5));
            let q = tangent_pair(&a, &a);
            if q <= 0.0 {
                return Err(Error::MetricViolation { residual: q });
            }
            let s = q.sqrt();
            Ok(NormalData { representative: a / s, nu: 1, theta: Some(s.asinh()) })
        }
        HolonomyClass::Elliptic => {
            let a = j_inv(&((m - so12_inverse(m)) * 0.5));
            let q = tangent_pair(&a, &a);
            let c = (m.trace() - 1.0) / 2.0;
            if c >= 0.0 && q < 0.0 {
                let s = (-q).sqrt();
                return Ok(NormalData {
                    representative: a / s,
                    nu: -1,
                    theta: Some(wrap_angle(s.atan2(c))),
                });
            }
            let mut k = kernel_direction(&(m - Matrix3::identity()));
            let kk = tangent_pair(&k, &k);
            if kk >= 0.0 {
                return Err(Error::MetricViolation { residual: kk });
            }
            k /= (-kk).sqrt();
            let ka = tangent_pair(&k, &a);
            let flip = if a.amax() > tol.residual { ka > 0.0 } else { k[0] < 0.0 };
            if flip {
                k = -k;
            }
            let sin = (-tangent_pair(&k, &a)).max(0.0);
            Ok(NormalData { representative: k, nu: -1, theta: Some(wrap_angle(sin.atan2(c))) })
        }
    }
}

/// max |O₄O₃O₂O₁ − id|.
pub fn closure_residual<S: Scalar>(os: &[Matrix3<S>; 4]) -> S {
    let p = &os[3] * &os[2] * &os[1] * &os[0] - Matrix3::<S>::identity();
    max_abs3(&p)
}

/// O₄ := (O₃O₂O₁)⁻¹.
pub fn closing_fourth<S: Scalar>(o1: &Matrix3<S>, o2: &Matrix3<S>, o3: &Matrix3<S>) -> Matrix3<S> {
    so12_inverse(&(o3 * o2 * o1))
}
