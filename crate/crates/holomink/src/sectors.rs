//! Vertex sectors, polar dual types, the flat limit and the compact real form.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Matrix3x4, Matrix4, Matrix4x3, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{face_holonomies_in_frame, transport_matrix};
use crate::lorentz::{ambient_pair, cross, eta_sigma, tangent_pair, AmbientVector, GramData, Inertia, Sigma, TangentVector};
use crate::reconstruct::Tetrahedron;
use crate::scalar::{Scalar, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelLabel {
    DeSitter,
    AntiDeSitter,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexType {
    Finite,
    Ideal,
    Hyperideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualVertexType {
    Ordinary,
    Ideal,
    Hyperideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceType {
    Spacelike,
    Timelike,
    Null,
}

macro_rules! names {
    ($t:ty { $($v:ident => $s:literal),* }) => {
        impl $t {
            pub fn name(self) -> &'static str {
                match self { $(Self::$v => $s),* }
            }
        }
    };
}
names!(ModelLabel { DeSitter => "dS", AntiDeSitter => "AdS", Indeterminate => "indeterminate" });
names!(VertexType { Finite => "finite", Ideal => "ideal", Hyperideal => "hyperideal" });
names!(DualVertexType { Ordinary => "ordinary", Ideal => "ideal", Hyperideal => "hyperideal" });
names!(FaceType { Spacelike => "spacelike", Timelike => "timelike", Null => "null" });

#[derive(Debug, Clone, PartialEq)]
pub struct SectorReport {
    pub model: ModelLabel,
    pub vertex_types: [VertexType; 4],
    /// Absent when the model is indeterminate and no hint was given.
    pub dual_vertex_types: Option<[DualVertexType; 4]>,
    pub face_causal_types: [FaceType; 4],
}

pub fn vertex_type(minor: &Inertia) -> VertexType {
    if minor.zeros > 0 {
        VertexType::Ideal
    } else if minor.negatives == 1 && minor.positives == 2 {
        VertexType::Finite
    } else {
        VertexType::Hyperideal
    }
}

/// Type of the polar dual vertex [Nᵢ], from the causal sign of Nᵢ and the model.
pub fn dual_vertex_type(nu: i8, sigma: Sigma) -> DualVertexType {
    match (nu.signum(), sigma) {
        (0, _) => DualVertexType::Ideal,
        (-1, Sigma::AntiDeSitter) | (1, Sigma::DeSitter) => DualVertexType::Ordinary,
        _ => DualVertexType::Hyperideal,
    }
}

/// A negative ⟨Nᵢ,Nᵢ⟩ cuts out a spacelike face in either model.
pub fn face_type(nu: i8) -> FaceType {
    match nu.signum() {
        -1 => FaceType::Spacelike,
        1 => FaceType::Timelike,
        _ => FaceType::Null,
    }
}

pub fn classify_sector<S: Scalar>(g: &GramData<S>, sigma_hint: Option<Sigma>, tol: &Tolerances) -> SectorReport {
    let scale = g.entries.iter().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
    let det_sign = g.det.signum_tol(tol.residual * scale.powi(4));
    let model = match det_sign {
        s if s < 0 => ModelLabel::DeSitter,
        s if s > 0 => ModelLabel::AntiDeSitter,
        _ => ModelLabel::Indeterminate,
    };
    let sigma = match model {
        ModelLabel::DeSitter => Some(Sigma::DeSitter),
        ModelLabel::AntiDeSitter => Some(Sigma::AntiDeSitter),
        ModelLabel::Indeterminate => sigma_hint,
    };
    let nus: [i8; 4] = std::array::from_fn(|i| g.entries[(i, i)].signum_tol(tol.class * scale));
    SectorReport {
        model,
        vertex_types: std::array::from_fn(|i| vertex_type(&g.minor_inertias[i])),
        dual_vertex_types: sigma.map(|s| nus.map(|nu| dual_vertex_type(nu, s))),
        face_causal_types: nus.map(face_type),
    }
}

/// A face of a flat tetrahedron in ℝ^{1,2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatFaceData {
    pub normal: TangentVector,
    pub area: f64,
    pub support: f64,
}

/// Σ Aᵢ nᵢ.
pub fn flat_closure_residual(faces: &[FlatFaceData]) -> TangentVector {
    faces.iter().fold(TangentVector::zeros(), |acc, f| acc + f.normal * f.area)
}

/// Faces of the flat tetrahedron with vertices xᵢ (face i opposite xᵢ),
/// with outward normals, areas and supports ⟨x,nᵢ⟩ on the face.
pub fn flat_faces(x: &[TangentVector; 4], tol: &Tolerances) -> Result<[FlatFaceData; 4]> {
    let mut out = [FlatFaceData { normal: TangentVector::zeros(), area: 0.0, support: 0.0 }; 4];
    for i in 0..4 {
        let o: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let (a, b, c) = (x[o[0]], x[o[1]], x[o[2]]);
        let mut m = cross(&(b - a), &(c - a)) * 0.5;
        let q = tangent_pair(&m, &m);
        if q.abs() <= tol.class * m.norm_squared().max(tol.residual) {
            return Err(Error::NullFace);
        }
        let side = tangent_pair(&(x[i] - a), &m);
        if side.abs() <= tol.residual {
            return Err(Error::FlatOrDegenerate { det: side });
        }
        if side > 0.0 {
            m = -m;
        }
        let area = q.abs().sqrt();
        let normal = m / area;
        out[i] = FlatFaceData { normal, area, support: tangent_pair(&a, &normal) };
    }
    Ok(out)
}

/// The unit radial vector e with ⟨e,e⟩ = σ and an isometric embedding of
/// ℝ^{1,2} onto e⊥.
pub fn radial_split(sigma: Sigma) -> (Vector4<f64>, Matrix4x3<f64>) {
    match sigma {
        Sigma::DeSitter => (
            Vector4::new(0.0, 0.0, 0.0, 1.0),
            Matrix4x3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
        ),
        Sigma::AntiDeSitter => (
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Matrix4x3::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0),
        ),
    }
}

/// n − (σh/R) e.
pub fn flat_limit_normal(n: &TangentVector, h: f64, r: f64, sigma: Sigma) -> AmbientVector {
    let (e, b) = radial_split(sigma);
    AmbientVector::new(b * n - e * (sigma.sign() as f64 * h / r), sigma)
}

/// The point αe + x on the radius-R model over the tangent point x.
pub fn embed_point(x: &TangentVector, r: f64, sigma: Sigma) -> Result<Vector4<f64>> {
    let (e, b) = radial_split(sigma);
    let s = sigma.sign() as f64;
    let rad = 1.0 - s * tangent_pair(x, x) / (r * r);
    if rad <= 0.0 {
        return Err(Error::HypothesisViolated(format!("point outside the chart at R = {r}")));
    }
    Ok(e * (r * rad.sqrt()) + b * x)
}

/// The curved tetrahedron over flat vertices xᵢ at curvature radius R,
/// rescaled to the unit model.
///
/// Normals are unit (or null with the flat scale) and ⟂ to the three
/// embedded vertices of each face, with the sign that agrees with the flat
/// outward normal.
pub fn curved_family_member(x: &[TangentVector; 4], r: f64, sigma: Sigma, tol: &Tolerances) -> Result<Tetrahedron> {
    let (_, b) = radial_split(sigma);
    let eta = eta_sigma::<f64>(sigma);
    let pts: Vec<Vector4<f64>> = x.iter().map(|p| embed_point(p, r, sigma)).collect::<Result<_>>()?;
    let flat = flat_faces(x, tol)?;
    let mut normals = Vec::with_capacity(4);
    for i in 0..4 {
        let rows: Vec<Vector4<f64>> = (0..4).filter(|&k| k != i).map(|k| eta * pts[k]).collect();
        let m = Matrix3x4::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
        let mut k = kernel_4(&m);
        let q = (k.transpose() * eta * k)[(0, 0)];
        k /= q.abs().sqrt();
        let flat_n = b * flat[i].normal;
        let agree = (k.transpose() * eta * flat_n)[(0, 0)];
        let nu = tangent_pair(&flat[i].normal, &flat[i].normal).signum();
        if agree * nu < 0.0 {
            k = -k;
        }
        normals.push(AmbientVector::new(k, sigma));
    }
    let normals: [AmbientVector; 4] = normals.try_into().expect("four normals");
    let vertices: [AmbientVector; 4] = std::array::from_fn(|i| AmbientVector::new(pts[i] / r, sigma));
    let mut supports = [0.0; 4];
    for i in 0..4 {
        supports[i] = ambient_pair(&vertices[i], &normals[i])?;
    }
    Ok(Tetrahedron { sigma, normals, vertices, supports })
}

/// Kernel vector of a rank-three 3×4 matrix by signed 3×3 cofactors.
fn kernel_4(m: &Matrix3x4<f64>) -> Vector4<f64> {
    Vector4::from_fn(|c, _| {
        let cols: Vec<usize> = (0..4).filter(|&k| k != c).collect();
        let sub = Matrix3::from_fn(|i, j| m[(i, cols[j])]);
        let s = if c % 2 == 0 { 1.0 } else { -1.0 };
        s * sub.determinant()
    })
}

/// Gram matrix of the curved family member, and its flat limit ⟨nᵢ,nⱼ⟩.
pub fn flat_gram_deviation(x: &[TangentVector; 4], r: f64, sigma: Sigma, tol: &Tolerances) -> Result<f64> {
    let t = curved_family_member(x, r, sigma, tol)?;
    let flat = flat_faces(x, tol)?;
    let mut dev = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let g = ambient_pair(&t.normals[i], &t.normals[j])?;
            dev = dev.max((g - tangent_pair(&flat[i].normal, &flat[j].normal)).abs());
        }
    }
    Ok(dev)
}

/// Leading holonomy data of the curved family at radius R.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatHolonomyCheck {
    /// J⁻¹ of R²(Oᵢ − Oᵢ⁻¹)/2 per face, in the frame carried from e to V₄.
    pub generators: [TangentVector; 4],
    /// |Σᵢ generatorsᵢ|, the leading closure defect.
    pub closure_defect: f64,
    /// max |R²(O₄O₃O₂O₁ − id)|.
    pub product_defect: f64,
    /// max_i |generatorᵢ − c Aᵢnᵢ| over the better of c = ±1.
    pub area_normal_mismatch: f64,
}

pub fn flat_holonomy_check(x: &[TangentVector; 4], r: f64, sigma: Sigma, tol: &Tolerances) -> Result<FlatHolonomyCheck> {
    let t = curved_family_member(x, r, sigma, tol)?;
    let flat = flat_faces(x, tol)?;
    let (e, b) = radial_split(sigma);
    let base = AmbientVector::new(e, sigma);
    let to_v4 = transport_matrix(&base, &t.vertices[3], tol)?;
    let frame = to_v4 * b;
    let fh = face_holonomies_in_frame(&t, &frame, tol)?;
    let r2 = r * r;
    let generators: [TangentVector; 4] = std::array::from_fn(|i| {
        let m = fh.holonomies[i].matrix();
        crate::lorentz::j_inv(&((m - crate::so12::so12_inverse(m)) * (0.5 * r2)))
    });
    let sum = generators.iter().fold(TangentVector::zeros(), |a, g| a + g);
    let mats: [Matrix3<f64>; 4] = std::array::from_fn(|i| *fh.holonomies[i].matrix());
    let product_defect = crate::so12::closure_residual(&mats) * r2;
    let mismatch = |c: f64| {
        (0..4).map(|i| (generators[i] - flat[i].normal * (c * flat[i].area)).amax()).fold(0.0, f64::max)
    };
    Ok(FlatHolonomyCheck {
        generators,
        closure_defect: sum.amax(),
        product_defect,
        area_normal_mismatch: mismatch(1.0).min(mismatch(-1.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EuclidLabel {
    Spherical,
    Hyperbolic,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuclidReport {
    pub closure_residual: f64,
    pub gram: Matrix4<f64>,
    pub exceptional_residual: f64,
    pub triples: [f64; 4],
    pub triple_signs: [i8; 4],
    pub label: EuclidLabel,
}

/// J_E(u) v = u × v.
pub fn j_euclid(u: &Vector3<f64>) -> Matrix3<f64> {
    u.cross_matrix()
}

pub fn rotation_exp(n: &Vector3<f64>, theta: f64) -> Matrix3<f64> {
    let j = j_euclid(n);
    Matrix3::identity() + j * theta.sin() + j * j * (1.0 - theta.cos())
}

fn check_rotation(r: &Matrix3<f64>, tol: &Tolerances) -> Result<()> {
    let res = (r.transpose() * r - Matrix3::identity()).amax().max((r.determinant() - 1.0).abs());
    if res > tol.residual * 1e3 {
        return Err(Error::NotRotation { residual: res });
    }
    Ok(())
}

/// Closure, Euclidean Gram with the transported (2,4) entry, and triple signs.
pub fn euclid_tests(rots: &[Matrix3<f64>; 4], normals: &[Vector3<f64>; 4], tol: &Tolerances) -> Result<EuclidReport> {
    for r in rots {
        check_rotation(r, tol)?;
    }
    let closure_residual = (rots[3] * rots[2] * rots[1] * rots[0] - Matrix3::identity()).amax();
    let n = normals;
    let mut gram = Matrix4::from_fn(|i, j| n[i].dot(&n[j]));
    let via_r1 = n[1].dot(&(rots[0] * n[3]));
    let via_r3 = n[1].dot(&(rots[2].transpose() * n[3]));
    gram[(1, 3)] = via_r1;
    gram[(3, 1)] = via_r1;
    let triples = [
        n[2].cross(&n[1]).dot(&(rots[2].transpose() * n[3])),
        n[0].cross(&n[2]).dot(&n[3]),
        n[1].cross(&n[0]).dot(&(rots[0] * n[3])),
        n[0].cross(&n[1]).dot(&n[2]),
    ];
    let det = gram.determinant();
    let label = if det.abs() <= tol.residual {
        EuclidLabel::Degenerate
    } else if det > 0.0 {
        EuclidLabel::Spherical
    } else {
        EuclidLabel::Hyperbolic
    };
    Ok(EuclidReport {
        closure_residual,
        gram,
        exceptional_residual: (via_r1 - via_r3).abs(),
        triple_signs: triples.map(|t| if t > tol.residual { 1 } else if t < -tol.residual { -1 } else { 0 }),
        triples,
        label,
    })
}

pub type Su2 = Matrix2<Complex64>;

/// cos(θ/2) id − i sin(θ/2) n·σ.
pub fn su2_exp(n: &Vector3<f64>, theta: f64) -> Su2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let i = Complex64::i();
    Matrix2::new(
        Complex64::new(c, 0.0) - i * s * n[2],
        -i * s * n[0] - s * n[1],
        -i * s * n[0] + s * n[1],
        Complex64::new(c, 0.0) + i * s * n[2],
    )
}

fn pauli(a: usize) -> Su2 {
    let (z, o, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::i());
    match a {
        0 => Matrix2::new(z, o, o, z),
        1 => Matrix2::new(z, -i, i, z),
        _ => Matrix2::new(o, z, z, -o),
    }
}

/// Rᵃ_b = ½ tr(σₐ U σ_b U†).
pub fn su2_project(u: &Su2) -> Matrix3<f64> {
    let ud = u.adjoint();
    Matrix3::from_fn(|a, b| 0.5 * (pauli(a) * u * pauli(b) * ud).trace().re)
}

fn check_unitary(u: &Su2, tol: &Tolerances) -> Result<()> {
    let res = (u * u.adjoint() - Su2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let det = (u.determinant() - Complex64::new(1.0, 0.0)).norm();
    let r = res.max(det);
    if r > tol.residual * 1e3 {
        return Err(Error::NotUnitary { residual: r });
    }
    Ok(())
}

/// Nearest central element to U₄U₃U₂U₁ and the distance to it.
pub fn su2_lift_closure(us: &[Su2; 4], tol: &Tolerances) -> Result<(i8, f64)> {
    for u in us {
        check_unitary(u, tol)?;
    }
    let p = us[3] * us[2] * us[1] * us[0];
    let dist = |s: f64| (p - Su2::identity() * Complex64::new(s, 0.0)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (plus, minus) = (dist(1.0), dist(-1.0));
    let (sign, res) = if plus <= minus { (1, plus) } else { (-1, minus) };
    if res > tol.residual * 1e3 {
        return Err(Error::NotClosing { plus, minus });
    }
    Ok((sign, res))
}

/// Negates U₁ when the product closes to −id.
pub fn fix_su2_signs(us: &[Su2; 4], sign: i8) -> [Su2; 4] {
    let mut out = *us;
    if sign < 0 {
        out[0] = -out[0];
    }
    out
}

/// Holonomy area 3π − (α+β+γ) of a two-sheeted triangle with internal angles α, β, γ.
pub fn two_sheeted_angle(alpha: f64, beta: f64, gamma: f64) -> f64 {
    3.0 * PI - (alpha + beta + gamma)
}
