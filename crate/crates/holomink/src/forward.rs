//! Geodesic transport and the based face holonomies of a tetrahedron.

use nalgebra::{DMatrix, Matrix3, Matrix4, Matrix4x3, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::lorentz::{
    ambient_pair, eta_sigma, eta_t, factor_against, sylvester_factor, AmbientVector, GramData, Sigma,
    TangentVector,
};
use crate::reconstruct::{gram_from_representatives, vertices_from_normals, Tetrahedron};
use crate::scalar::{Scalar, Tolerances};
use crate::sl2r::{fix_central_signs, lift, spin_closure, SpinHolonomy};
use crate::so12::{check_so12, closure_residual, fixed_line, wrap_angle, NormalData, VectorHolonomy};

/// Parallel transport along the geodesic from `source` to `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTransport {
    pub source: AmbientVector,
    pub target: AmbientVector,
    pub matrix: Matrix4<f64>,
}

impl EdgeTransport {
    pub fn new(p: &AmbientVector, q: &AmbientVector, tol: &Tolerances) -> Result<Self> {
        Ok(EdgeTransport { source: p.clone(), target: q.clone(), matrix: transport_matrix(p, q, tol)? })
    }

    pub fn apply(&self, x: &AmbientVector) -> Result<AmbientVector> {
        if x.sigma != self.source.sigma {
            return Err(Error::ModelMismatch);
        }
        Ok(AmbientVector::new(self.matrix * x.coords, x.sigma))
    }

    pub fn reversed(&self, tol: &Tolerances) -> Result<Self> {
        EdgeTransport::new(&self.target, &self.source, tol)
    }
}

/// Transport p → q as a 4×4 matrix.
///
/// On T_p this is X ↦ X − ⟨X,q⟩/(σ + ⟨p,q⟩) (p + q). The matrix extends it to
/// the ambient isometry that also sends p to q, so the reverse transport is
/// its inverse on all of the ambient space and normal components of rounding
/// errors are not amplified.
pub fn transport_matrix(p: &AmbientVector, q: &AmbientVector, tol: &Tolerances) -> Result<Matrix4<f64>> {
    if p.sigma != q.sigma {
        return Err(Error::ModelMismatch);
    }
    let eta = eta_sigma::<f64>(p.sigma);
    let s = p.sigma.sign() as f64;
    let sum = p.coords + q.coords;
    // σ + ⟨p,q⟩ = ½⟨p+q,p+q⟩ on the model
    let denom = 0.5 * (sum.transpose() * eta * sum)[(0, 0)];
    if !(denom.abs() > tol.residual) {
        return Err(Error::DegeneratePair { denominator: denom });
    }
    let row_sum = (eta * sum).transpose();
    let row_p = (eta * p.coords).transpose();
    Ok(Matrix4::identity() - sum * row_sum / denom + q.coords * row_p * (2.0 * s))
}

pub fn transport(p: &AmbientVector, q: &AmbientVector, x: &AmbientVector, tol: &Tolerances) -> Result<AmbientVector> {
    EdgeTransport::new(p, q, tol)?.apply(x)
}

/// Ambient 4×4 products of the simple-path loops, based at V₄.
///
/// O₁ = o₄₃o₃₂o₂₄, O₂ = o₄₁o₁₃o₃₄, O₃ = o₄₂o₂₁o₁₄, O₄ = o₄₂o₂₃o₃₁o₁₂o₂₄,
/// where o_ab transports from V_b to V_a.
pub fn ambient_face_holonomies(vertices: &[AmbientVector; 4], tol: &Tolerances) -> Result<[Matrix4<f64>; 4]> {
    let o = |a: usize, b: usize| transport_matrix(&vertices[b - 1], &vertices[a - 1], tol);
    Ok([
        o(4, 3)? * o(3, 2)? * o(2, 4)?,
        o(4, 1)? * o(1, 3)? * o(3, 4)?,
        o(4, 2)? * o(2, 1)? * o(1, 4)?,
        o(4, 2)? * o(2, 3)? * o(3, 1)? * o(1, 2)? * o(2, 4)?,
    ])
}

/// Tangent-frame coordinates η_T Eᵀ η X of an ambient vector.
pub fn frame_coordinates(frame: &Matrix4x3<f64>, sigma: Sigma, x: &Vector4<f64>) -> TangentVector {
    eta_t::<f64>() * frame.transpose() * eta_sigma::<f64>(sigma) * x
}

/// η_T Eᵀ η Ô E: the restriction of an ambient map to the frame.
pub fn pull_back(amb: &Matrix4<f64>, frame: &Matrix4x3<f64>, sigma: Sigma) -> Matrix3<f64> {
    eta_t::<f64>() * frame.transpose() * eta_sigma::<f64>(sigma) * amb * frame
}

/// Pseudo-orthonormal frame at V₄ built from N₁, N₂, N₃.
///
/// Gram–Schmidt in order; a timelike residual fills e₀, spacelike residuals
/// fill e₁ then e₂. e₂ is negated if needed so that det[n₁ n₂ n₃] > 0. If a
/// residual is null the frame comes from a congruence of the 3×3 Gram block.
pub fn base_frame(normals: &[AmbientVector; 4], tol: &Tolerances) -> Result<Matrix4x3<f64>> {
    let sigma = normals[0].sigma;
    let eta = eta_sigma::<f64>(sigma);
    let ip = |x: &Vector4<f64>, y: &Vector4<f64>| (x.transpose() * eta * y)[(0, 0)];
    let a = Matrix4x3::from_columns(&[normals[0].coords, normals[1].coords, normals[2].coords]);
    let scale = a.amax().max(1.0);
    let mut slots: [Option<Vector4<f64>>; 3] = [None, None, None];
    let mut degenerate = false;
    for i in 0..3 {
        let mut x = normals[i].coords;
        for (k, e) in slots.iter().enumerate() {
            if let Some(e) = e {
                let s = if k == 0 { -1.0 } else { 1.0 };
                x -= e * (s * ip(&x, e));
            }
        }
        let q = ip(&x, &x);
        if q.abs() <= tol.class * scale * scale {
            degenerate = true;
            break;
        }
        let slot = if q < 0.0 { Some(0).filter(|_| slots[0].is_none()) } else { (1..3).find(|&k| slots[k].is_none()) };
        match slot {
            Some(k) => slots[k] = Some(x / q.abs().sqrt()),
            None => {
                degenerate = true;
                break;
            }
        }
    }
    let mut frame = if degenerate || slots.iter().any(Option::is_none) {
        congruence_frame(&a, sigma, tol)?
    } else {
        Matrix4x3::from_columns(&[slots[0].unwrap(), slots[1].unwrap(), slots[2].unwrap()])
    };
    let m = eta_t::<f64>() * frame.transpose() * eta * a;
    if m.determinant() < 0.0 {
        let c = -frame.column(2);
        frame.set_column(2, &c);
    }
    Ok(frame)
}

fn congruence_frame(a: &Matrix4x3<f64>, sigma: Sigma, tol: &Tolerances) -> Result<Matrix4x3<f64>> {
    let eta = eta_sigma::<f64>(sigma);
    let g3 = a.transpose() * eta * a;
    let gd = DMatrix::from_fn(3, 3, |i, j| g3[(i, j)]);
    let mt = factor_against(&gd, &[-1, 1, 1], tol.class)?;
    let m = Matrix3::from_fn(|i, j| mt[(i, j)]);
    let inv = m.try_inverse().ok_or(Error::DegenerateGram { det: g3.determinant() })?;
    Ok(a * inv)
}

/// Face holonomies expressed in a frame at V₄, with the based normals.
#[derive(Debug, Clone)]
pub struct FaceHolonomies {
    pub frame: Matrix4x3<f64>,
    pub holonomies: [VectorHolonomy; 4],
    /// n₁, n₂, n₃ at V₄ and n₄ carried from V₂ along the special edge.
    pub normals: [TangentVector; 4],
    pub closure_residual: f64,
}

/// Face holonomies in the deterministic frame of [`base_frame`].
pub fn face_holonomies(t: &Tetrahedron, tol: &Tolerances) -> Result<FaceHolonomies> {
    let frame = base_frame(&t.normals, tol)?;
    face_holonomies_in_frame(t, &frame, tol)
}

pub fn face_holonomies_in_frame(t: &Tetrahedron, frame: &Matrix4x3<f64>, tol: &Tolerances) -> Result<FaceHolonomies> {
    let amb = ambient_face_holonomies(&t.vertices, tol)?;
    let mats: [Matrix3<f64>; 4] = std::array::from_fn(|i| pull_back(&amb[i], frame, t.sigma));
    let holonomies = [
        check_so12(&mats[0], tol)?,
        check_so12(&mats[1], tol)?,
        check_so12(&mats[2], tol)?,
        check_so12(&mats[3], tol)?,
    ];
    let o42 = transport_matrix(&t.vertices[1], &t.vertices[3], tol)?;
    let normals = [
        frame_coordinates(frame, t.sigma, &t.normals[0].coords),
        frame_coordinates(frame, t.sigma, &t.normals[1].coords),
        frame_coordinates(frame, t.sigma, &t.normals[2].coords),
        frame_coordinates(frame, t.sigma, &(o42 * t.normals[3].coords)),
    ];
    Ok(FaceHolonomies { frame: *frame, closure_residual: closure_residual(&mats), holonomies, normals })
}

/// A tetrahedron realizing a Gram matrix up to the sign conjugation D G D.
#[derive(Debug, Clone)]
pub struct Realization {
    pub tetrahedron: Tetrahedron,
    /// D: the realized outward normals are dᵢ Nᵢ.
    pub signs: [i8; 4],
}

fn sign_classes() -> Vec<[i8; 4]> {
    let mut all: Vec<[i8; 4]> = (0..8u8)
        .map(|m| [1, 1 - 2 * ((m >> 2) & 1) as i8, 1 - 2 * ((m >> 1) & 1) as i8, 1 - 2 * (m & 1) as i8])
        .collect();
    all.sort_by_key(|d| d.iter().filter(|&&s| s < 0).count());
    all
}

fn edges_connected(t: &Tetrahedron) -> bool {
    let s = t.sigma.sign() as f64;
    (0..4).all(|a| {
        (a + 1..4).all(|b| {
            let p = ambient_pair(&t.vertices[a], &t.vertices[b]).unwrap_or(f64::NAN);
            1.0 + s * p > 0.0
        })
    })
}

/// Realizes G with all supports negative when its face holonomies are
/// orthochronous. Otherwise picks, among the sign classes D with orthochronous
/// holonomies, those whose vertices are pairwise joined by geodesics, and
/// among these the one with holonomies nearest the identity (least Σ|tr Oᵢ − 3|).
pub fn realize(g: &GramData<f64>, sigma: Sigma, tol: &Tolerances) -> Result<Realization> {
    let base = sylvester_factor(g, sigma, tol)?;
    let mut best: Option<(bool, f64, Realization)> = None;
    let mut last_err = Error::NoOrthochronousRealization;
    for signs in sign_classes() {
        let normals: [AmbientVector; 4] =
            std::array::from_fn(|i| AmbientVector::new(base[i].coords * signs[i] as f64, sigma));
        let (vertices, supports) = vertices_from_normals(&normals, sigma, tol)?;
        let t = Tetrahedron { sigma, normals, vertices, supports };
        match face_holonomies(&t, tol) {
            Ok(fh) => {
                if signs == [1, 1, 1, 1] {
                    return Ok(Realization { tetrahedron: t, signs });
                }
                let connected = edges_connected(&t);
                let spread: f64 = fh.holonomies.iter().map(|o| (o.trace() - 3.0).abs()).sum();
                let better = match &best {
                    None => true,
                    Some((c, s, _)) => (connected, -spread) > (*c, -*s),
                };
                if better {
                    best = Some((connected, spread, Realization { tetrahedron: t, signs }));
                }
            }
            Err(e) => last_err = e,
        }
    }
    best.map(|(_, _, r)| r).ok_or(match last_err {
        Error::OrientationViolation { .. } => Error::NoOrthochronousRealization,
        e => e,
    })
}

/// Gram → tetrahedron → holonomies → Gram.
#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub sigma: Sigma,
    pub signs: [i8; 4],
    pub tetrahedron: Tetrahedron,
    pub holonomies: [VectorHolonomy; 4],
    /// Pivot lifts with the first central sign fixed so that the product is +id.
    pub lifts: [SpinHolonomy; 4],
    pub normals: [NormalData; 4],
    /// G(H), with normal representatives aligned to the input normals.
    pub gram: GramData<f64>,
    pub closure_residual: f64,
    pub spin_closure_residual: f64,
    pub exceptional_residual: f64,
    pub entry_deviation: f64,
    pub det_deviation: f64,
    pub minor_deviation: f64,
}

pub fn roundtrip<S: Scalar>(input: &GramData<S>, sigma: Sigma, tol: &Tolerances) -> Result<RoundtripReport> {
    let g = input.to_f64();
    let real = realize(&g, sigma, tol)?;
    let t = &real.tetrahedron;
    let fh = face_holonomies(t, tol)?;
    let mut normals = Vec::with_capacity(4);
    for (i, o) in fh.holonomies.iter().enumerate() {
        let mut d = fixed_line(o, tol).map_err(|e| match e {
            Error::CentralHolonomy { .. } => Error::CentralHolonomy { index: Some(i) },
            e => e,
        })?;
        // align with the input normal dᵢ·(realized normal)
        let target = fh.normals[i] * real.signs[i] as f64;
        let agree = match d.nu {
            0 => d.representative.dot(&target),
            nu => nu as f64 * crate::lorentz::tangent_pair(&d.representative, &target),
        };
        if agree < 0.0 {
            d = if d.nu == 0 { NormalData { representative: -d.representative, ..d } } else { d.flipped() };
        }
        normals.push(d);
    }
    let normals: [NormalData; 4] = normals.try_into().expect("four normals");
    let reps: [TangentVector; 4] = std::array::from_fn(|i| normals[i].representative);
    let (gm, alt) = gram_from_representatives(&reps, fh.holonomies[0].matrix(), fh.holonomies[2].matrix());
    let exceptional_residual = (gm[(1, 3)] - alt).abs();
    let gram = GramData::new(gm, tol)?;
    let lifts0 = [
        lift(&fh.holonomies[0], tol)?,
        lift(&fh.holonomies[1], tol)?,
        lift(&fh.holonomies[2], tol)?,
        lift(&fh.holonomies[3], tol)?,
    ];
    let (eps, _) = spin_closure(&lifts0, tol)?;
    let lifts = fix_central_signs(&lifts0, eps);
    let (_, spin_res) = spin_closure(&lifts, tol)?;
    let entry_deviation = (gram.entries - g.entries).amax();
    let det_deviation = (gram.det - g.det).abs();
    let minor_deviation = (0..4).map(|i| (gram.minors[i] - g.minors[i]).abs()).fold(0.0, f64::max);
    Ok(RoundtripReport {
        sigma,
        signs: real.signs,
        tetrahedron: real.tetrahedron.clone(),
        holonomies: fh.holonomies,
        lifts,
        normals,
        gram,
        closure_residual: fh.closure_residual,
        spin_closure_residual: spin_res,
        exceptional_residual,
        entry_deviation,
        det_deviation,
        minor_deviation,
    })
}

/// Oriented area 𝔞 = ε σ Θ for a non-null face; elliptic values are taken mod 2π.
pub fn signed_area(theta: f64, nu: i8, sigma: Sigma, branch: i8) -> Result<f64> {
    let a = branch.signum() as f64 * sigma.sign() as f64 * theta;
    match nu {
        0 => Err(Error::NullFace),
        -1 => Ok(wrap_angle(a)),
        _ => Ok(a),
    }
}

/// Ambient point a·e₀-style helper: the unit vector along axis `i`.
pub fn axis(i: usize) -> Vector4<f64> {
    let mut v = Vector4::zeros();
    v[i] = 1.0;
    v
}

/// Tangent vectors at the base point from frame coordinates.
pub fn from_frame(frame: &Matrix4x3<f64>, x: &Vector3<f64>) -> Vector4<f64> {
    frame * x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ads(c: [f64; 4]) -> AmbientVector {
        AmbientVector::new(Vector4::from(c), Sigma::AntiDeSitter)
    }

    #[test]
    fn transport_to_same_point_is_identity_on_tangents() {
        let p = ads([1.0, 0.0, 0.0, 0.0]);
        let x = ads([0.0, 0.3, -1.0, 2.0]);
        let y = transport(&p, &p, &x, &Tolerances::default()).unwrap();
        assert!((y.coords - x.coords).amax() < 1e-15);
    }

    #[test]
    fn antipodal_pair_is_degenerate() {
        let p = ads([1.0, 0.0, 0.0, 0.0]);
        let q = ads([-1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(transport_matrix(&p, &q, &Tolerances::default()), Err(Error::DegeneratePair { .. })));
    }

    #[test]
    fn signed_area_inverts_coordinate() {
        assert_eq!(signed_area(0.0, 1, Sigma::DeSitter, 1).unwrap(), 0.0);
        assert!((signed_area(0.8, 1, Sigma::AntiDeSitter, 1).unwrap() + 0.8).abs() < 1e-15);
        assert!((signed_area(0.4, -1, Sigma::DeSitter, 1).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(signed_area(0.4, 0, Sigma::DeSitter, 1), Err(Error::NullFace));
    }

    #[test]
    fn sign_classes_start_with_identity() {
        let c = sign_classes();
        assert_eq!(c.len(), 8);
        assert_eq!(c[0], [1, 1, 1, 1]);
        assert!(c.iter().all(|d| d[0] == 1));
    }
}
