//! Holonomies → normals → Gram → branch → model → tetrahedron.

use nalgebra::{Matrix3, Matrix4, Matrix4x3};

use crate::error::{Error, Result};
use crate::forward::{ambient_face_holonomies, face_holonomies, pull_back, transport_matrix};
use crate::lorentz::{
    ambient_pair, cross, eta_sigma, sylvester_factor, tangent_pair, AmbientVector, GramData, Sigma, TangentVector,
};
use crate::scalar::{Scalar, Tolerances};
use crate::sl2r::{fix_central_signs, project, spin_closure, SpinHolonomy};
use crate::so12::{
    angle_distance, closure_residual, fixed_line, so12_inverse, stabilizer_exp, HolonomyClass, NormalData,
    VectorHolonomy,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub tol: Tolerances,
    /// Relative bound on |O₄O₃O₂O₁ − id|.
    pub closure_tol: f64,
    /// Relative bound on |⟨n₂,O₁n₄⟩ − ⟨n₂,O₃⁻¹n₄⟩|.
    pub exceptional_tol: f64,
    /// Reporting threshold for the forward holonomy comparison.
    pub match_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config { tol: Tolerances::default(), closure_tol: 1e-9, exceptional_tol: 1e-7, match_tol: 1e-9 }
    }
}

/// A convex tetrahedron in dS³ or AdS³.
#[derive(Debug, Clone, PartialEq)]
pub struct Tetrahedron {
    pub sigma: Sigma,
    pub normals: [AmbientVector; 4],
    /// Vᵢ is opposite face Fᵢ.
    pub vertices: [AmbientVector; 4],
    pub supports: [f64; 4],
}

impl Tetrahedron {
    /// Largest violation of ⟨Vᵢ,Vᵢ⟩ = σ, ⟨Vⱼ,Nᵢ⟩ = 0 (j ≠ i) and hᵢ = ⟨Vᵢ,Nᵢ⟩.
    pub fn residual(&self) -> f64 {
        let s = self.sigma.sign() as f64;
        let mut r = 0.0f64;
        for i in 0..4 {
            let vv = ambient_pair(&self.vertices[i], &self.vertices[i]).unwrap_or(f64::NAN);
            r = r.max((vv - s).abs());
            for j in 0..4 {
                let p = ambient_pair(&self.vertices[j], &self.normals[i]).unwrap_or(f64::NAN);
                let want = if i == j { self.supports[i] } else { 0.0 };
                r = r.max((p - want).abs());
            }
        }
        r
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let all = self.normals.iter().chain(self.vertices.iter());
        if all.into_iter().any(|v| v.sigma != self.sigma) {
            return Err(Error::ModelMismatch);
        }
        let r = self.residual();
        if !(r <= tol.residual * 1e3) {
            return Err(Error::MetricViolation { residual: r });
        }
        if let Some(i) = self.supports.iter().position(|&h| h >= 0.0) {
            return Err(Error::WrongCausalVertexLine { index: i, pairing: self.supports[i] });
        }
        Ok(())
    }
}

/// Residuals reported alongside a reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub closure: f64,
    pub exceptional: f64,
    /// max |Ôᵢ(T) − Oᵢ| per face, with Ôᵢ(T) read in the frame that carries nᵢ to Nᵢ.
    pub holonomy_match: [f64; 4],
    /// det Gî + χᵢ².
    pub minor_identity: [f64; 4],
}

impl Diagnostics {
    pub fn max_match(&self) -> f64 {
        self.holonomy_match.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub normals: [NormalData; 4],
    pub classes: [HolonomyClass; 4],
    pub gram: GramData<f64>,
    pub chi: [f64; 4],
    pub branch_signs: [i8; 4],
    pub sigma: Sigma,
    pub tetrahedron: Tetrahedron,
    /// Central signs applied to spin inputs, all +1 for vector inputs.
    pub central_signs: [i8; 4],
    pub diagnostics: Diagnostics,
}

/// Gᵢⱼ = ⟨nᵢ,nⱼ⟩ except G₂₄ = ⟨n₂,O₁n₄⟩. Also returns ⟨n₂,O₃⁻¹n₄⟩.
pub fn gram_from_representatives<S: Scalar>(
    n: &[TangentVector<S>; 4],
    o1: &Matrix3<S>,
    o3: &Matrix3<S>,
) -> (Matrix4<S>, S) {
    let mut g = Matrix4::<S>::zeros();
    for i in 0..4 {
        for j in i..4 {
            let v = tangent_pair(&n[i], &n[j]);
            g[(i, j)] = v.clone();
            g[(j, i)] = v;
        }
    }
    let via_o1 = tangent_pair(&n[1], &(o1 * &n[3]));
    let via_o3 = tangent_pair(&n[1], &(so12_inverse(o3) * &n[3]));
    g[(1, 3)] = via_o1.clone();
    g[(3, 1)] = via_o1;
    (g, via_o3)
}

/// Reconstructed Gram matrix with the exceptional entry cross-checked.
pub fn reconstructed_gram(
    normals: &[NormalData; 4],
    o1: &VectorHolonomy,
    o3: &VectorHolonomy,
    config: &Config,
) -> Result<(GramData<f64>, f64)> {
    let reps: [TangentVector; 4] = std::array::from_fn(|i| normals[i].representative);
    let (g, alt) = gram_from_representatives(&reps, o1.matrix(), o3.matrix());
    let dev = (g[(1, 3)] - alt).abs();
    let scale = o1.matrix().amax().max(o3.matrix().amax()).max(1.0);
    if dev > config.exceptional_tol * scale {
        return Err(Error::ExceptionalEntryMismatch { deviation: dev });
    }
    Ok((GramData::new(g, &config.tol)?, dev))
}

/// χ₁ = ⟨n₃×n₂,O₃⁻¹n₄⟩, χ₂ = ⟨n₁×n₃,n₄⟩, χ₃ = ⟨n₂×n₁,O₁n₄⟩, χ₄ = ⟨n₁×n₂,n₃⟩.
pub fn triple_products<S: Scalar>(n: &[TangentVector<S>; 4], o1: &Matrix3<S>, o3: &Matrix3<S>) -> [S; 4] {
    let n4_from_o3 = so12_inverse(o3) * &n[3];
    let n4_from_o1 = o1 * &n[3];
    [
        tangent_pair(&cross(&n[2], &n[1]), &n4_from_o3),
        tangent_pair(&cross(&n[0], &n[2]), &n[3]),
        tangent_pair(&cross(&n[1], &n[0]), &n4_from_o1),
        tangent_pair(&cross(&n[0], &n[1]), &n[2]),
    ]
}

/// χᵢ after flipping normal p by δₚ: (Π_{p≠i} δₚ) χᵢ.
pub fn apply_branch(chi: &[f64; 4], delta: &[i8; 4]) -> [f64; 4] {
    std::array::from_fn(|i| {
        let s: i8 = (0..4).filter(|&p| p != i).map(|p| delta[p]).product();
        s as f64 * chi[i]
    })
}

fn check_nonzero(chi: &[f64; 4], tol: f64) -> Result<()> {
    match chi.iter().position(|c| !(c.abs() > tol)) {
        Some(i) => Err(Error::ZeroTriple { index: i, value: chi[i] }),
        None => Ok(()),
    }
}

/// δᵢ = S·sign(χᵢ) with S = Π sign(χₚ); returns δ and the corrected χ.
pub fn select_branch(chi: &[f64; 4], tol: &Tolerances) -> Result<([i8; 4], [f64; 4])> {
    check_nonzero(chi, tol.residual)?;
    let s: [i8; 4] = std::array::from_fn(|i| if chi[i] > 0.0 { 1 } else { -1 });
    let total: i8 = s.iter().product();
    let delta = s.map(|x| total * x);
    Ok((delta, apply_branch(chi, &delta)))
}

/// Branch selection with the listed faces frozen at δ = +1.
pub fn select_branch_frozen(chi: &[f64; 4], frozen: &[bool; 4], tol: &Tolerances) -> Result<([i8; 4], [f64; 4])> {
    check_nonzero(chi, tol.residual)?;
    for m in 0..16u8 {
        let delta: [i8; 4] = std::array::from_fn(|i| if m >> i & 1 == 1 { -1 } else { 1 });
        if (0..4).any(|i| frozen[i] && delta[i] < 0) {
            continue;
        }
        let c = apply_branch(chi, &delta);
        if c.iter().all(|&x| x > 0.0) {
            return Ok((delta, c));
        }
    }
    Err(Error::InadmissibleParabolicBranch)
}

/// σ = −sign(det G), with the inertia of G required to match η_σ.
pub fn model_sign<S: Scalar>(g: &GramData<S>, tol: &Tolerances) -> Result<Sigma> {
    let scale = g.entries.iter().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
    let s = g.det.signum_tol(tol.residual * scale.powi(4));
    if s == 0 {
        return Err(Error::FlatOrDegenerate { det: g.det.to_f64() });
    }
    let sigma = if s < 0 { Sigma::DeSitter } else { Sigma::AntiDeSitter };
    if g.inertia != sigma.inertia() {
        return Err(Error::InertiaMismatch { expected: sigma.inertia(), found: g.inertia });
    }
    Ok(sigma)
}

/// Vᵢ ⟂ {Nⱼ : j ≠ i} with ⟨Vᵢ,Vᵢ⟩ = σ and ⟨Vᵢ,Nᵢ⟩ < 0.
pub fn vertices_from_normals(
    normals: &[AmbientVector; 4],
    sigma: Sigma,
    tol: &Tolerances,
) -> Result<([AmbientVector; 4], [f64; 4])> {
    if normals.iter().any(|n| n.sigma != sigma) {
        return Err(Error::ModelMismatch);
    }
    let eta = eta_sigma::<f64>(sigma);
    let nmat = Matrix4::from_columns(&[normals[0].coords, normals[1].coords, normals[2].coords, normals[3].coords]);
    let g = nmat.transpose() * eta * nmat;
    let ginv = g.try_inverse().ok_or(Error::DegenerateGram { det: g.determinant() })?;
    let w = nmat * ginv;
    let s = sigma.sign() as f64;
    let scale = ginv.amax().max(1.0);
    let mut verts = Vec::with_capacity(4);
    let mut supports = [0.0; 4];
    for i in 0..4 {
        let p = s * ginv[(i, i)];
        if p <= tol.class * scale {
            return Err(Error::WrongCausalVertexLine { index: i, pairing: ginv[(i, i)] });
        }
        let v = AmbientVector::new(-w.column(i) / p.sqrt(), sigma);
        supports[i] = ambient_pair(&v, &normals[i])?;
        verts.push(v);
    }
    Ok((verts.try_into().expect("four vertices"), supports))
}

fn central_index(os: &[VectorHolonomy; 4]) -> Option<usize> {
    os.iter().position(|o| o.class() == HolonomyClass::Central)
}

/// Relative closure bound: each factor may carry rounding proportional to its size.
fn closure_scale(os: &[Matrix3<f64>; 4]) -> f64 {
    os.iter().map(|m| m.amax().max(1.0)).product()
}

/// The full reconstruction from four based face holonomies.
pub fn reconstruct(os: &[VectorHolonomy; 4], config: &Config) -> Result<ReconstructionReport> {
    let tol = &config.tol;
    if let Some(i) = central_index(os) {
        return Err(Error::CentralHolonomy { index: Some(i) });
    }
    let mats: [Matrix3<f64>; 4] = std::array::from_fn(|i| *os[i].matrix());
    let closure = closure_residual(&mats);
    if closure > config.closure_tol * closure_scale(&mats) {
        return Err(Error::ClosureViolation { residual: closure });
    }
    let mut normals = Vec::with_capacity(4);
    for (i, o) in os.iter().enumerate() {
        normals.push(fixed_line(o, tol).map_err(|e| match e {
            Error::CentralHolonomy { .. } => Error::CentralHolonomy { index: Some(i) },
            e => e,
        })?);
    }
    let mut normals: [NormalData; 4] = normals.try_into().expect("four normals");

    let reps: [TangentVector; 4] = std::array::from_fn(|i| normals[i].representative);
    let chi0 = triple_products(&reps, os[0].matrix(), os[2].matrix());
    let frozen: [bool; 4] = std::array::from_fn(|i| normals[i].nu == 0);
    let (delta, _) = if frozen.iter().any(|&f| f) {
        select_branch_frozen(&chi0, &frozen, tol)?
    } else {
        select_branch(&chi0, tol)?
    };
    for i in 0..4 {
        if delta[i] < 0 {
            normals[i] = normals[i].flipped();
        }
    }
    let reps: [TangentVector; 4] = std::array::from_fn(|i| normals[i].representative);
    let chi = triple_products(&reps, os[0].matrix(), os[2].matrix());
    let (gram, exceptional) = reconstructed_gram(&normals, &os[0], &os[2], config)?;
    let sigma = model_sign(&gram, tol)?;

    let ambient = sylvester_factor(&gram, sigma, tol)?;
    let (vertices, supports) = vertices_from_normals(&ambient, sigma, tol)?;
    let tetrahedron = Tetrahedron { sigma, normals: ambient, vertices, supports };

    let holonomy_match = match_holonomies(&tetrahedron, &reps, os, tol)?;
    let minor_identity = std::array::from_fn(|i| gram.minors[i] + chi[i] * chi[i]);
    Ok(ReconstructionReport {
        classes: std::array::from_fn(|i| os[i].class()),
        normals,
        gram,
        chi,
        branch_signs: delta,
        sigma,
        tetrahedron,
        central_signs: [1; 4],
        diagnostics: Diagnostics { closure, exceptional, holonomy_match, minor_identity },
    })
}

/// Compares the forward holonomies of `t` with the inputs.
///
/// The frame map L = [N₁ N₂ N₃][n₁ n₂ n₃]⁻¹ identifies the input tangent
/// space with T_{V₄}; L is an isometry because the Gram blocks agree.
pub fn match_holonomies(
    t: &Tetrahedron,
    reps: &[TangentVector; 4],
    os: &[VectorHolonomy; 4],
    tol: &Tolerances,
) -> Result<[f64; 4]> {
    let a = Matrix4x3::from_columns(&[t.normals[0].coords, t.normals[1].coords, t.normals[2].coords]);
    let m = Matrix3::from_columns(&[reps[0], reps[1], reps[2]]);
    let minv = m.try_inverse().ok_or(Error::DegenerateGram { det: m.determinant() })?;
    let frame = a * minv;
    let amb = ambient_face_holonomies(&t.vertices, tol)?;
    Ok(std::array::from_fn(|i| (pull_back(&amb[i], &frame, t.sigma) - os[i].matrix()).amax()))
}

/// Reconstruction from spin holonomies after fixing the central sign.
pub fn spin_reconstruct(hs: &[SpinHolonomy; 4], config: &Config) -> Result<ReconstructionReport> {
    let tol = &config.tol;
    if let Some(i) = hs.iter().position(|h| h.is_central(tol.class)) {
        return Err(Error::CentralHolonomy { index: Some(i) });
    }
    let (eps, _) = spin_closure(hs, tol)?;
    let fixed = fix_central_signs(hs, eps);
    let os = [project(&fixed[0], tol)?, project(&fixed[1], tol)?, project(&fixed[2], tol)?, project(&fixed[3], tol)?];
    let mut report = reconstruct(&os, config)?;
    report.central_signs = [eps, 1, 1, 1];
    Ok(report)
}

fn check_hypotheses(normals: &[NormalData; 4], u: &[f64; 4], label: &str, tol: &Tolerances) -> Result<[Matrix3<f64>; 4]> {
    let om: [Matrix3<f64>; 4] = std::array::from_fn(|i| stabilizer_exp(&normals[i], u[i]));
    let res = closure_residual(&om);
    if res > tol.residual * closure_scale(&om) {
        return Err(Error::HypothesisViolated(format!("closure fails for {label}: residual {res:e}")));
    }
    let n: [TangentVector; 4] = std::array::from_fn(|i| normals[i].representative);
    let t1 = tangent_pair(&cross(&n[1], &n[0]), &(om[0] * n[3]));
    let t2 = tangent_pair(&cross(&n[2], &n[1]), &(so12_inverse(&om[2]) * n[3]));
    if !(t1 > tol.residual && t2 > tol.residual) {
        return Err(Error::HypothesisViolated(format!("endpoint triple products for {label}: {t1:e}, {t2:e}")));
    }
    Ok(om)
}

/// Verifies that two admissible stabilizer-coordinate tuples coincide.
pub fn stabilizer_uniqueness_check(normals: &[NormalData; 4], s: &[f64; 4], t: &[f64; 4], tol: &Tolerances) -> Result<bool> {
    let os = check_hypotheses(normals, s, "s", tol)?;
    let ot = check_hypotheses(normals, t, "t", tol)?;
    let n2 = normals[1].representative;
    let n4 = normals[3].representative;
    let es = tangent_pair(&n2, &(os[0] * n4));
    let et = tangent_pair(&n2, &(ot[0] * n4));
    if (es - et).abs() > tol.residual * es.abs().max(1.0) {
        return Err(Error::HypothesisViolated(format!("exceptional scalars differ: {es} vs {et}")));
    }
    Ok((0..4).all(|i| {
        let d = match normals[i].nu {
            -1 => angle_distance(s[i], t[i]),
            _ => (s[i] - t[i]).abs(),
        };
        d <= tol.class * s[i].abs().max(1.0)
    }))
}

/// Transports N₄ from V₂ to V₄ along the special edge, in the given frame.
pub fn special_edge_normal(t: &Tetrahedron, tol: &Tolerances) -> Result<AmbientVector> {
    let o42 = transport_matrix(&t.vertices[1], &t.vertices[3], tol)?;
    Ok(AmbientVector::new(o42 * t.normals[3].coords, t.sigma))
}

/// Holonomies of a reconstructed tetrahedron in its default frame.
pub fn forward_of(report: &ReconstructionReport, tol: &Tolerances) -> Result<[VectorHolonomy; 4]> {
    Ok(face_holonomies(&report.tetrahedron, tol)?.holonomies)
}
