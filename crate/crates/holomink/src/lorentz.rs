//! Tangent and ambient Lorentzian linear algebra.
//!
//! The tangent model is ℝ^{1,2} with η_T = diag(−1,1,1). The ambient spaces
//! are ℝ^{1,3} (de Sitter, σ = +1) and ℝ^{2,2} (anti-de Sitter, σ = −1).

use std::fmt;

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances};

pub type TangentVector<S = f64> = Vector3<S>;

/// Which constant-curvature model a computation lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sigma {
    /// dS³, ambient metric diag(−1,1,1,1).
    DeSitter,
    /// AdS³, ambient metric diag(−1,−1,1,1).
    AntiDeSitter,
}

impl Sigma {
    pub fn sign(self) -> i8 {
        match self {
            Sigma::DeSitter => 1,
            Sigma::AntiDeSitter => -1,
        }
    }

    pub fn from_sign(s: i8) -> Option<Sigma> {
        match s {
            1 => Some(Sigma::DeSitter),
            -1 => Some(Sigma::AntiDeSitter),
            _ => None,
        }
    }

    pub fn value<S: Scalar>(self) -> S {
        S::from_i64(self.sign() as i64)
    }

    /// Inertia of the ambient metric.
    pub fn inertia(self) -> Inertia {
        match self {
            Sigma::DeSitter => Inertia { zeros: 0, negatives: 1, positives: 3 },
            Sigma::AntiDeSitter => Inertia { zeros: 0, negatives: 2, positives: 2 },
        }
    }

    pub fn diagonal(self) -> [i8; 4] {
        match self {
            Sigma::DeSitter => [-1, 1, 1, 1],
            Sigma::AntiDeSitter => [-1, -1, 1, 1],
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::DeSitter => write!(f, "dS3"),
            Sigma::AntiDeSitter => write!(f, "AdS3"),
        }
    }
}

/// A vector of the ambient space of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVector<S: Scalar = f64> {
    pub coords: Vector4<S>,
    pub sigma: Sigma,
}

impl<S: Scalar> AmbientVector<S> {
    pub fn new(coords: Vector4<S>, sigma: Sigma) -> Self {
        AmbientVector { coords, sigma }
    }

    pub fn self_pair(&self) -> S {
        pair4(&self.coords, &self.coords, self.sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalClass {
    Timelike,
    Null,
    Spacelike,
}

impl CausalClass {
    pub fn from_sign(s: i8) -> CausalClass {
        match s {
            s if s < 0 => CausalClass::Timelike,
            0 => CausalClass::Null,
            _ => CausalClass::Spacelike,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            CausalClass::Timelike => -1,
            CausalClass::Null => 0,
            CausalClass::Spacelike => 1,
        }
    }
}

pub fn eta_t<S: Scalar>() -> Matrix3<S> {
    Matrix3::from_diagonal(&Vector3::new(-S::one(), S::one(), S::one()))
}

pub fn eta_sigma<S: Scalar>(sigma: Sigma) -> Matrix4<S> {
    let d = sigma.diagonal();
    Matrix4::from_diagonal(&Vector4::new(
        S::from_i64(d[0] as i64),
        S::from_i64(d[1] as i64),
        S::from_i64(d[2] as i64),
        S::from_i64(d[3] as i64),
    ))
}

pub fn tangent_pair<S: Scalar>(u: &TangentVector<S>, w: &TangentVector<S>) -> S {
    u[1].clone() * w[1].clone() + u[2].clone() * w[2].clone() - u[0].clone() * w[0].clone()
}

pub fn causal_class<S: Scalar>(u: &TangentVector<S>, tol: f64) -> CausalClass {
    CausalClass::from_sign(tangent_pair(u, u).signum_tol(tol))
}

/// Lorentzian cross product (u×w)^μ = η^{μλ} ε_{λνρ} u^ν w^ρ, ε₀₁₂ = +1.
pub fn cross<S: Scalar>(u: &TangentVector<S>, w: &TangentVector<S>) -> TangentVector<S> {
    let c = |i: usize, j: usize| u[i].clone() * w[j].clone() - u[j].clone() * w[i].clone();
    Vector3::new(-c(1, 2), c(2, 0), c(0, 1))
}

/// ⟨u×w, z⟩, which equals det(u, w, z).
pub fn triple<S: Scalar>(u: &TangentVector<S>, w: &TangentVector<S>, z: &TangentVector<S>) -> S {
    tangent_pair(&cross(u, w), z)
}

/// J(u) with J(u)w = u×w.
pub fn j_map<S: Scalar>(u: &TangentVector<S>) -> Matrix3<S> {
    let z = S::zero;
    let (u0, u1, u2) = (u[0].clone(), u[1].clone(), u[2].clone());
    Matrix3::new(
        z(),
        u2.clone(),
        -u1.clone(),
        u2,
        z(),
        -u0.clone(),
        -u1,
        u0,
        z(),
    )
}

/// Inverse of [`j_map`] on the image of J; reads the generator off three entries.
pub fn j_inv<S: Scalar>(a: &Matrix3<S>) -> TangentVector<S> {
    Vector3::new(-a[(1, 2)].clone(), -a[(0, 2)].clone(), a[(0, 1)].clone())
}

fn pair4<S: Scalar>(x: &Vector4<S>, y: &Vector4<S>, sigma: Sigma) -> S {
    let d = sigma.diagonal();
    let mut acc = S::zero();
    for i in 0..4 {
        let t = x[i].clone() * y[i].clone();
        if d[i] < 0 {
            acc -= t;
        } else {
            acc += t;
        }
    }
    acc
}

pub fn ambient_pair<S: Scalar>(x: &AmbientVector<S>, y: &AmbientVector<S>) -> Result<S> {
    if x.sigma != y.sigma {
        return Err(Error::ModelMismatch);
    }
    Ok(pair4(&x.coords, &y.coords, x.sigma))
}

/// Counts of zero, negative and positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Inertia {
    pub zeros: usize,
    pub negatives: usize,
    pub positives: usize,
}

impl Inertia {
    pub fn new(zeros: usize, negatives: usize, positives: usize) -> Self {
        Inertia { zeros, negatives, positives }
    }

    pub fn dimension(&self) -> usize {
        self.zeros + self.negatives + self.positives
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.zeros == 0
    }

    fn count(signs: impl IntoIterator<Item = i8>) -> Inertia {
        let mut out = Inertia::default();
        for s in signs {
            match s {
                0 => out.zeros += 1,
                s if s < 0 => out.negatives += 1,
                _ => out.positives += 1,
            }
        }
        out
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zeros == 0 {
            write!(f, "({},{})", self.negatives, self.positives)
        } else {
            write!(f, "({},{},{})", self.zeros, self.negatives, self.positives)
        }
    }
}

fn max_abs<S: Scalar>(m: &DMatrix<S>) -> f64 {
    m.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

fn asymmetry<S: Scalar>(m: &DMatrix<S>) -> S {
    let mut worst = S::zero();
    for i in 0..m.nrows() {
        for j in 0..i {
            let d = (m[(i, j)].clone() - m[(j, i)].clone()).magnitude();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Result of a symmetric congruence reduction: `q * m * qᵀ = diag(d)`.
#[derive(Debug, Clone)]
pub struct Congruence<S: Scalar> {
    pub q: DMatrix<S>,
    pub diagonal: Vec<S>,
}

fn swap_sym<S: Scalar>(a: &mut DMatrix<S>, q: &mut DMatrix<S>, i: usize, j: usize) {
    if i != j {
        a.swap_rows(i, j);
        a.swap_columns(i, j);
        q.swap_rows(i, j);
    }
}

/// `row/col i += s · row/col j`, applied as a congruence.
fn combine_sym<S: Scalar>(a: &mut DMatrix<S>, q: &mut DMatrix<S>, i: usize, j: usize, s: &S) {
    let n = a.nrows();
    for c in 0..n {
        let v = a[(j, c)].clone() * s.clone();
        a[(i, c)] += v;
        let v = q[(j, c)].clone() * s.clone();
        q[(i, c)] += v;
    }
    for r in 0..n {
        let v = a[(r, j)].clone() * s.clone();
        a[(r, i)] += v;
    }
}

/// Symmetric congruence elimination with largest-diagonal pivoting.
///
/// When every remaining diagonal entry vanishes but an off-diagonal one does
/// not, a row/column combination creates a nonzero pivot. On the floating
/// backend the combination is also used when the diagonal is small compared
/// with the off-diagonal block, which keeps the multipliers bounded.
pub fn congruence_diagonalize<S: Scalar>(m: &DMatrix<S>, tol: f64) -> Congruence<S> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut q = DMatrix::<S>::identity(n, n);
    let zero_tol = tol * max_abs(m).max(1.0);
    let mut k = 0;
    while k < n {
        let mut best_d: Option<(usize, S)> = None;
        for r in k..n {
            let v = a[(r, r)].magnitude();
            if best_d.as_ref().is_none_or(|(_, b)| v > *b) {
                best_d = Some((r, v));
            }
        }
        let mut best_off: Option<(usize, usize, S)> = None;
        for r in k..n {
            for c in r + 1..n {
                let v = a[(r, c)].magnitude();
                if best_off.as_ref().is_none_or(|(_, _, b)| v > *b) {
                    best_off = Some((r, c, v));
                }
            }
        }
        let (p, dmag) = best_d.expect("nonempty block");
        let diag_zero = dmag.is_zero_tol(zero_tol);
        let off = best_off.filter(|(_, _, v)| !v.is_zero_tol(zero_tol));
        let small_diag = !S::EXACT
            && off
                .as_ref()
                .is_some_and(|(_, _, v)| dmag.to_f64() < 0.5 * v.to_f64());
        if diag_zero || small_diag {
            let Some((i, j, _)) = off else {
                // the remaining block is zero
                break;
            };
            let s = if S::EXACT {
                S::one()
            } else {
                let plus = a[(i, i)].to_f64() + a[(j, j)].to_f64() + 2.0 * a[(i, j)].to_f64();
                let minus = a[(i, i)].to_f64() + a[(j, j)].to_f64() - 2.0 * a[(i, j)].to_f64();
                if plus.abs() >= minus.abs() {
                    S::one()
                } else {
                    -S::one()
                }
            };
            combine_sym(&mut a, &mut q, i, j, &s);
            continue;
        }
        swap_sym(&mut a, &mut q, k, p);
        let pivot = a[(k, k)].clone();
        for i in k + 1..n {
            let f = a[(i, k)].clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = a[(k, c)].clone() * f.clone();
                a[(i, c)] -= v;
                let v = q[(k, c)].clone() * f.clone();
                q[(i, c)] -= v;
            }
            for r in 0..n {
                let v = a[(r, k)].clone() * f.clone();
                a[(r, i)] -= v;
            }
        }
        k += 1;
    }
    let diagonal = (0..n).map(|i| a[(i, i)].clone()).collect();
    Congruence { q, diagonal }
}

/// Inertia by congruence elimination; no eigenvalues involved.
pub fn inertia_congruence<S: Scalar>(m: &DMatrix<S>, tol: f64) -> Inertia {
    let c = congruence_diagonalize(m, tol);
    let zero_tol = tol * max_abs(m).max(1.0);
    Inertia::count(c.diagonal.iter().map(|d| d.signum_tol(zero_tol)))
}

/// Inertia by counting eigenvalues; |λ| ≤ tol·max(1, max|λ|) counts as zero.
pub fn inertia_eigen(m: &DMatrix<f64>, tol: f64) -> Inertia {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    Inertia::count(eig.eigenvalues.iter().map(|x| x.signum_tol(tol * scale)))
}

/// Inertia of a symmetric matrix: exact backends use congruence, the floating
/// backend counts eigenvalues with `tol.class`.
pub fn inertia_of<S: Scalar>(m: &DMatrix<S>, tol: &Tolerances) -> Result<Inertia> {
    let asym = asymmetry(m);
    let bound = tol.residual * max_abs(m).max(1.0);
    if !crate::scalar::within(&asym, bound) {
        return Err(Error::NotSymmetric { asymmetry: asym.to_f64() });
    }
    if S::EXACT {
        Ok(inertia_congruence(m, 0.0))
    } else {
        Ok(inertia_eigen(&m.map(|x| x.to_f64()), tol.class))
    }
}

/// Determinant by Gaussian elimination with largest-magnitude pivoting.
pub fn determinant<S: Scalar>(m: &DMatrix<S>) -> S {
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = S::one();
    for k in 0..n {
        let mut p = k;
        for r in k + 1..n {
            if a[(r, k)].magnitude() > a[(p, k)].magnitude() {
                p = r;
            }
        }
        if a[(p, k)].is_zero() {
            return S::zero();
        }
        if p != k {
            a.swap_rows(p, k);
            det = -det;
        }
        let pivot = a[(k, k)].clone();
        det *= pivot.clone();
        for r in k + 1..n {
            let f = a[(r, k)].clone() / pivot.clone();
            for c in k..n {
                let v = a[(k, c)].clone() * f.clone();
                a[(r, c)] -= v;
            }
        }
    }
    det
}

pub fn to_dynamic<S: Scalar, const N: usize>(m: &nalgebra::SMatrix<S, N, N>) -> DMatrix<S> {
    DMatrix::from_fn(N, N, |i, j| m[(i, j)].clone())
}

/// Deletes row and column `i` of a 4×4 matrix.
pub fn principal_submatrix<S: Scalar>(g: &Matrix4<S>, i: usize) -> Matrix3<S> {
    let keep: Vec<usize> = (0..4).filter(|&k| k != i).collect();
    Matrix3::from_fn(|r, c| g[(keep[r], keep[c])].clone())
}

/// det Gî and In(Gî) for i = 1..4.
pub fn principal_minors<S: Scalar>(g: &Matrix4<S>, tol: &Tolerances) -> Result<([S; 4], [Inertia; 4])> {
    let mut dets = Vec::with_capacity(4);
    let mut inertias = [Inertia::default(); 4];
    for (i, slot) in inertias.iter_mut().enumerate() {
        let sub = to_dynamic(&principal_submatrix(g, i));
        dets.push(determinant(&sub));
        *slot = inertia_of(&sub, tol)?;
    }
    let dets: [S; 4] = dets.try_into().map_err(|_| Error::Parse("minors".into()))?;
    Ok((dets, inertias))
}

/// A symmetric 4×4 Gram matrix with its determinant, minors and inertias.
#[derive(Debug, Clone, PartialEq)]
pub struct GramData<S: Scalar = f64> {
    pub entries: Matrix4<S>,
    pub det: S,
    pub minors: [S; 4],
    pub inertia: Inertia,
    pub minor_inertias: [Inertia; 4],
}

impl<S: Scalar> GramData<S> {
    pub fn new(entries: Matrix4<S>, tol: &Tolerances) -> Result<Self> {
        let dynm = to_dynamic(&entries);
        let inertia = inertia_of(&dynm, tol)?;
        let det = determinant(&dynm);
        let (minors, minor_inertias) = principal_minors(&entries, tol)?;
        Ok(GramData { entries, det, minors, inertia, minor_inertias })
    }

    /// Builds the symmetric matrix from the ten upper-triangular entries, row by row.
    pub fn from_upper(upper: [S; 10], tol: &Tolerances) -> Result<Self> {
        let mut m = Matrix4::<S>::zeros();
        let mut it = upper.into_iter();
        for i in 0..4 {
            for j in i..4 {
                let v = it.next().expect("ten entries");
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        GramData::new(m, tol)
    }

    pub fn to_f64(&self) -> GramData<f64> {
        GramData {
            entries: self.entries.map(|x| x.to_f64()),
            det: self.det.to_f64(),
            minors: std::array::from_fn(|i| self.minors[i].to_f64()),
            inertia: self.inertia,
            minor_inertias: self.minor_inertias,
        }
    }
}

/// Finds `N` with `Nᵀ diag(target) N = g` by congruence, placing diagonal
/// entries into the slots of `target` with matching sign, in order.
pub fn factor_against(g: &DMatrix<f64>, target: &[i8], tol: f64) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let c = congruence_diagonalize(g, tol);
    let zero_tol = tol * max_abs(g).max(1.0);
    let signs: Vec<i8> = c.diagonal.iter().map(|d| d.signum_tol(zero_tol)).collect();
    let found = Inertia::count(signs.iter().copied());
    let expected = Inertia::count(target.iter().copied());
    if found != expected {
        if found.zeros > 0 {
            return Err(Error::DegenerateGram { det: determinant(g) });
        }
        return Err(Error::InertiaMismatch { expected, found });
    }
    let q_inv_t = c
        .q
        .clone()
        .try_inverse()
        .ok_or(Error::DegenerateGram { det: determinant(g) })?
        .transpose();
    let mut used = vec![false; n];
    let mut out = DMatrix::<f64>::zeros(n, n);
    for (k, s) in signs.iter().enumerate() {
        let slot = (0..n)
            .find(|&j| !used[j] && target[j] == *s)
            .expect("inertia already matched");
        used[slot] = true;
        let scale = c.diagonal[k].abs().sqrt();
        for col in 0..n {
            out[(slot, col)] = scale * q_inv_t[(k, col)];
        }
    }
    Ok(out)
}

/// One representative `N₁..N₄` with `Nᵢᵀ η_σ Nⱼ = Gᵢⱼ`.
pub fn sylvester_factor<S: Scalar>(
    g: &GramData<S>,
    sigma: Sigma,
    tol: &Tolerances,
) -> Result<[AmbientVector<f64>; 4]> {
    if !g.inertia.is_nondegenerate() {
        return Err(Error::DegenerateGram { det: g.det.to_f64() });
    }
    if g.inertia != sigma.inertia() {
        return Err(Error::InertiaMismatch { expected: sigma.inertia(), found: g.inertia });
    }
    let gf = to_dynamic(&g.entries.map(|x| x.to_f64()));
    let n = factor_against(&gf, &sigma.diagonal(), tol.class)?;
    Ok(std::array::from_fn(|i| {
        AmbientVector::new(Vector4::new(n[(0, i)], n[(1, i)], n[(2, i)], n[(3, i)]), sigma)
    }))
}

/// Columns of a 4×4 matrix as ambient vectors.
pub fn columns(m: &Matrix4<f64>, sigma: Sigma) -> [AmbientVector<f64>; 4] {
    std::array::from_fn(|i| AmbientVector::new(m.column(i).into_owned(), sigma))
}

/// Stacks ambient vectors as columns.
pub fn stack(v: &[AmbientVector<f64>; 4]) -> Matrix4<f64> {
    Matrix4::from_columns(&[v[0].coords, v[1].coords, v[2].coords, v[3].coords])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(p: i64, q: i64) -> Rational {
        <Rational as Scalar>::ratio(p, q)
    }

    #[test]
    fn metric_signs() {
        let e0 = Vector3::new(1.0, 0.0, 0.0);
        assert_eq!(tangent_pair(&e0, &e0), -1.0);
        let x = AmbientVector::new(Vector4::new(1.0, 0.0, 0.0, 0.0), Sigma::DeSitter);
        assert_eq!(ambient_pair(&x, &x).unwrap(), -1.0);
        let y = AmbientVector::new(Vector4::new(1.0, 0.0, 0.0, 0.0), Sigma::AntiDeSitter);
        assert_eq!(ambient_pair(&x, &y), Err(Error::ModelMismatch));
    }

    #[test]
    fn cross_of_spatial_basis_vectors() {
        // (e1×e2)^0 = η^{00} ε_{012} = −1
        let e1 = Vector3::new(0.0, 1.0, 0.0);
        let e2 = Vector3::new(0.0, 0.0, 1.0);
        assert_eq!(cross(&e1, &e2), Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn j_map_matches_cross_and_inverts() {
        let u = Vector3::new(r(1, 2), r(-3, 1), r(2, 5));
        let w = Vector3::new(r(4, 1), r(1, 3), r(-1, 1));
        assert_eq!(j_map(&u) * w.clone(), cross(&u, &w));
        assert_eq!(j_inv(&j_map(&u)), u);
    }

    #[test]
    fn inertia_of_ambient_metrics() {
        let tol = Tolerances::default();
        let e = to_dynamic(&eta_sigma::<Rational>(Sigma::DeSitter));
        assert_eq!(inertia_of(&e, &tol).unwrap(), Inertia::new(0, 1, 3));
        let e = to_dynamic(&eta_sigma::<f64>(Sigma::AntiDeSitter));
        assert_eq!(inertia_of(&e, &tol).unwrap(), Inertia::new(0, 2, 2));
    }

    #[test]
    fn congruence_handles_zero_diagonal() {
        // [[0,1],[1,0]] has inertia (1,1)
        let m = DMatrix::from_row_slice(2, 2, &[r(0, 1), r(1, 1), r(1, 1), r(0, 1)]);
        assert_eq!(inertia_congruence(&m, 0.0), Inertia::new(0, 1, 1));
        let c = congruence_diagonalize(&m, 0.0);
        let d = &c.q * &m * c.q.transpose();
        assert_eq!(d[(0, 1)], r(0, 1));
        assert_eq!(d[(0, 0)], c.diagonal[0]);
    }

    #[test]
    fn non_symmetric_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1.0]);
        assert!(matches!(
            inertia_of(&m, &Tolerances::default()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn sylvester_of_eta_is_standard_basis() {
        for sigma in [Sigma::DeSitter, Sigma::AntiDeSitter] {
            let g = GramData::new(eta_sigma::<f64>(sigma), &Tolerances::default()).unwrap();
            let n = sylvester_factor(&g, sigma, &Tolerances::default()).unwrap();
            assert_eq!(stack(&n), Matrix4::identity());
        }
    }

    #[test]
    fn sylvester_rejects_wrong_model() {
        let g = GramData::new(eta_sigma::<f64>(Sigma::DeSitter), &Tolerances::default()).unwrap();
        assert!(matches!(
            sylvester_factor(&g, Sigma::AntiDeSitter, &Tolerances::default()),
            Err(Error::InertiaMismatch { .. })
        ));
    }
}
