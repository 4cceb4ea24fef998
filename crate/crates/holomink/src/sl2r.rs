//! Spin holonomies in SL(2,ℝ) and the double cover onto SO⁺(1,2).

use nalgebra::{Matrix2, Matrix3, SMatrix, Vector3};

use crate::error::{Error, Result};
use crate::lorentz::{tangent_pair, TangentVector};
use crate::scalar::{within, Scalar, Tolerances};
use crate::so12::{check_so12, VectorHolonomy};

/// A unimodular 2×2 matrix with the central sign chosen for it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinHolonomy<S: Scalar = f64> {
    matrix: Matrix2<S>,
    /// +1 unless the lift was negated relative to its reference.
    pub central_sign: i8,
}

impl<S: Scalar> SpinHolonomy<S> {
    pub fn new(matrix: Matrix2<S>, tol: &Tolerances) -> Result<Self> {
        let det = det2(&matrix);
        let sc = max_abs2(&matrix).to_f64().max(1.0);
        if !within(&(det.clone() - S::one()), tol.residual * sc * sc) {
            return Err(Error::NotUnimodular { det: det.to_f64() });
        }
        Ok(SpinHolonomy { matrix, central_sign: 1 })
    }

    pub fn matrix(&self) -> &Matrix2<S> {
        &self.matrix
    }

    pub fn negated(&self) -> SpinHolonomy<S> {
        SpinHolonomy { matrix: -self.matrix.clone(), central_sign: -self.central_sign }
    }

    /// True for ±id.
    pub fn is_central(&self, tol: f64) -> bool {
        let id = Matrix2::<S>::identity();
        within(&max_abs2(&(&self.matrix - &id)), tol) || within(&max_abs2(&(&self.matrix + &id)), tol)
    }

    pub fn inverse(&self) -> SpinHolonomy<S> {
        SpinHolonomy { matrix: adjugate(&self.matrix), central_sign: self.central_sign }
    }
}

fn det2<S: Scalar>(m: &Matrix2<S>) -> S {
    m[(0, 0)].clone() * m[(1, 1)].clone() - m[(0, 1)].clone() * m[(1, 0)].clone()
}

fn adjugate<S: Scalar>(m: &Matrix2<S>) -> Matrix2<S> {
    Matrix2::new(m[(1, 1)].clone(), -m[(0, 1)].clone(), -m[(1, 0)].clone(), m[(0, 0)].clone())
}

fn max_abs2<S: Scalar>(m: &Matrix2<S>) -> S {
    m.iter().map(|x| x.magnitude()).fold(S::zero(), |a, x| if x > a { x } else { a })
}

/// τ₀ = ½[[0,1],[−1,0]], τ₁ = ½[[0,1],[1,0]], τ₂ = ½[[1,0],[0,−1]].
pub fn tau<S: Scalar>(mu: usize) -> Matrix2<S> {
    let h = S::ratio(1, 2);
    let z = S::zero;
    match mu {
        0 => Matrix2::new(z(), h.clone(), -h, z()),
        1 => Matrix2::new(z(), h.clone(), h, z()),
        2 => Matrix2::new(h.clone(), z(), z(), -h),
        _ => panic!("tau index {mu} out of range"),
    }
}

/// 𝒯(x) = x^μ τ_μ.
pub fn t_map<S: Scalar>(x: &TangentVector<S>) -> Matrix2<S> {
    let h = S::ratio(1, 2);
    Matrix2::new(
        x[2].clone() * h.clone(),
        (x[0].clone() + x[1].clone()) * h.clone(),
        (x[1].clone() - x[0].clone()) * h.clone(),
        -x[2].clone() * h,
    )
}

/// Inverse of [`t_map`] on traceless matrices.
pub fn t_inv<S: Scalar>(b: &Matrix2<S>) -> TangentVector<S> {
    let s = b[(0, 1)].clone() + b[(0, 1)].clone();
    let d = b[(1, 0)].clone() + b[(1, 0)].clone();
    let h = S::ratio(1, 2);
    Vector3::new(
        (s.clone() - d.clone()) * h.clone(),
        (s + d) * h,
        b[(0, 0)].clone() - b[(1, 1)].clone(),
    )
}

/// ε(c id + s 𝒯(n)) for unit non-null n, or ε(id + 𝒯(k)) for null k.
pub fn spin_exp(n: &TangentVector, theta: f64, eps: i8, tol: &Tolerances) -> Result<SpinHolonomy> {
    if n.amax() <= tol.class {
        return Err(Error::ZeroGenerator);
    }
    let e = if eps < 0 { -1.0 } else { 1.0 };
    let nu = tangent_pair(n, n).signum_tol(tol.class);
    let m = match nu {
        0 => Matrix2::identity() + t_map(n),
        s if s < 0 => Matrix2::identity() * (theta / 2.0).cos() + t_map(n) * (2.0 * (theta / 2.0).sin()),
        _ => Matrix2::identity() * (theta / 2.0).cosh() + t_map(n) * (2.0 * (theta / 2.0).sinh()),
    };
    let mut h = SpinHolonomy::new(m * e, tol)?;
    h.central_sign = if eps < 0 { -1 } else { 1 };
    Ok(h)
}

/// Adjoint action: O x = 𝒯⁻¹(H 𝒯(x) H⁻¹).
pub fn project_matrix<S: Scalar>(h: &SpinHolonomy<S>) -> Matrix3<S> {
    let hm = h.matrix();
    let hi = adjugate(hm) / det2(hm);
    let cols: Vec<Vector3<S>> = (0..3).map(|mu| t_inv(&(hm * tau::<S>(mu) * &hi))).collect();
    Matrix3::from_columns(&cols)
}

/// The vector holonomy covered by H; the central sign drops out.
pub fn project<S: Scalar>(h: &SpinHolonomy<S>, tol: &Tolerances) -> Result<VectorHolonomy<S>> {
    check_so12(&project_matrix(h), tol)
}

/// Quadratic monomials of the lift entries, each linear in O.
/// Order: aa, ab, ac, ad, bb, bc, bd, cc, cd, dd.
fn lift_products(o: &Matrix3<f64>) -> [f64; 10] {
    let e = |i: usize, j: usize| o[(i, j)];
    [
        (e(0, 0) + e(0, 1) + e(1, 0) + e(1, 1)) / 2.0,
        -(e(0, 2) + e(1, 2)) / 2.0,
        -(e(2, 0) + e(2, 1)) / 2.0,
        (e(2, 2) + 1.0) / 2.0,
        (e(0, 0) - e(0, 1) + e(1, 0) - e(1, 1)) / 2.0,
        (e(2, 2) - 1.0) / 2.0,
        (-e(2, 0) + e(2, 1)) / 2.0,
        (e(0, 0) + e(0, 1) - e(1, 0) - e(1, 1)) / 2.0,
        (-e(0, 2) + e(1, 2)) / 2.0,
        (e(0, 0) - e(0, 1) - e(1, 0) + e(1, 1)) / 2.0,
    ]
}

/// Index into [`lift_products`] of the monomial x_i x_j (entries a, b, c, d).
fn product_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    const ROW_START: [usize; 4] = [0, 4, 7, 9];
    ROW_START[i] + (j - i)
}

/// Solves H 𝒯(e_μ) = 𝒯(O e_μ) H for H up to scale by SVD.
fn lift_by_linear_system(o: &Matrix3<f64>) -> Option<Matrix2<f64>> {
    let mut sys = SMatrix::<f64, 12, 4>::zeros();
    for mu in 0..3 {
        let lhs_t = tau::<f64>(mu);
        let rhs_t = t_map(&o.column(mu).into_owned());
        for k in 0..4 {
            let mut unit = Matrix2::<f64>::zeros();
            unit[(k / 2, k % 2)] = 1.0;
            let r = unit * lhs_t - rhs_t * unit;
            for e in 0..4 {
                sys[(4 * mu + e, k)] = r[(e / 2, e % 2)];
            }
        }
    }
    let svd = sys.svd(false, true);
    let vt = svd.v_t?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let v = vt.row(idx);
    let h = Matrix2::new(v[0], v[1], v[2], v[3]);
    let det = h.determinant();
    if det <= 0.0 {
        return None;
    }
    Some(h / det.sqrt())
}

/// Spin lift with the pivot cascade a, b, c, d and a linear-system fallback.
///
/// The first entry of H whose square exceeds `tol.class` is taken positive.
/// Magnitudes are computed from the largest diagonal product, which gives the
/// same matrix without dividing by a small pivot.
pub fn lift(o: &VectorHolonomy, tol: &Tolerances) -> Result<SpinHolonomy> {
    let p = lift_products(o.matrix());
    let sq = |k: usize| p[product_index(k, k)];
    if let Some(pivot) = (0..4).find(|&k| sq(k) > tol.class) {
        let best = (0..4).max_by(|&i, &j| sq(i).total_cmp(&sq(j))).unwrap_or(pivot);
        let x = sq(best).sqrt();
        let mut entries: [f64; 4] = std::array::from_fn(|j| if j == best { x } else { p[product_index(best, j)] / x });
        if entries[pivot] < 0.0 {
            entries = entries.map(|e| -e);
        }
        let m = Matrix2::new(entries[0], entries[1], entries[2], entries[3]);
        return SpinHolonomy::new(m, tol);
    }
    let m = lift_by_linear_system(o.matrix()).ok_or(Error::LiftFailure)?;
    SpinHolonomy::new(m, tol)
}

/// B = H − ½tr(H) id.
pub fn traceless<S: Scalar>(h: &SpinHolonomy<S>) -> Matrix2<S> {
    let m = h.matrix();
    let half_tr = m.trace() * S::ratio(1, 2);
    m - Matrix2::<S>::identity() * half_tr
}

/// b = 𝒯⁻¹(B), the generator read from the traceless part.
pub fn traceless_vector<S: Scalar>(h: &SpinHolonomy<S>) -> TangentVector<S> {
    t_inv(&traceless(h))
}

/// ½ tr(Bᵢ Bⱼ) = ¼⟨bᵢ, bⱼ⟩.
pub fn connected_trace2<S: Scalar>(hi: &SpinHolonomy<S>, hj: &SpinHolonomy<S>) -> S {
    (traceless(hi) * traceless(hj)).trace() * S::ratio(1, 2)
}

/// ½ tr(Bᵢ Bⱼ Bₖ) = ⅛⟨bᵢ×bⱼ, bₖ⟩.
pub fn connected_trace3<S: Scalar>(
    hi: &SpinHolonomy<S>,
    hj: &SpinHolonomy<S>,
    hk: &SpinHolonomy<S>,
) -> S {
    (traceless(hi) * traceless(hj) * traceless(hk)).trace() * S::ratio(1, 2)
}

/// ρ = 2√(ν ⟨H²⟩_C) for a non-null face.
pub fn rho(h: &SpinHolonomy, nu: i8) -> Result<f64> {
    if nu == 0 {
        return Err(Error::NullFace);
    }
    let c = connected_trace2(h, h);
    Ok(2.0 * (nu as f64 * c).max(0.0).sqrt())
}

/// ⟨nᵢ,nⱼ⟩ from connected traces with the per-face branch signs ±.
pub fn normalized_pair(
    (hi, nui, pmi): (&SpinHolonomy, i8, i8),
    (hj, nuj, pmj): (&SpinHolonomy, i8, i8),
) -> Result<f64> {
    let denom = rho(hi, nui)? * rho(hj, nuj)?;
    Ok(4.0 * (pmi * pmj) as f64 * connected_trace2(hi, hj) / denom)
}

/// ⟨nᵢ×nⱼ,nₖ⟩ from connected traces with the per-face branch signs ±.
pub fn normalized_triple(
    (hi, nui, pmi): (&SpinHolonomy, i8, i8),
    (hj, nuj, pmj): (&SpinHolonomy, i8, i8),
    (hk, nuk, pmk): (&SpinHolonomy, i8, i8),
) -> Result<f64> {
    let denom = rho(hi, nui)? * rho(hj, nuj)? * rho(hk, nuk)?;
    Ok(8.0 * (pmi * pmj * pmk) as f64 * connected_trace3(hi, hj, hk) / denom)
}

/// Which central element H₄H₃H₂H₁ is nearest to, and the distance to it.
pub fn spin_closure<S: Scalar>(hs: &[SpinHolonomy<S>; 4], tol: &Tolerances) -> Result<(i8, S)> {
    let p = hs[3].matrix() * hs[2].matrix() * hs[1].matrix() * hs[0].matrix();
    let id = Matrix2::<S>::identity();
    let plus = max_abs2(&(&p - &id));
    let minus = max_abs2(&(&p + &id));
    let (eps, res) = if plus <= minus { (1, plus.clone()) } else { (-1, minus.clone()) };
    let sc = hs.iter().map(|h| max_abs2(h.matrix()).to_f64()).fold(1.0, f64::max);
    if !within(&res, tol.residual * sc.powi(4)) {
        return Err(Error::NotClosing { plus: plus.to_f64(), minus: minus.to_f64() });
    }
    Ok((eps, res))
}

/// Negates the first lift when the product closes to −id, so that it closes to +id.
pub fn fix_central_signs<S: Scalar>(hs: &[SpinHolonomy<S>; 4], eps: i8) -> [SpinHolonomy<S>; 4] {
    let mut out = hs.clone();
    if eps < 0 {
        out[0] = out[0].negated();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn int_spin(a: i64, b: i64, c: i64, d: i64) -> SpinHolonomy<Rational> {
        let m = Matrix2::new(
            Rational::from_i64(a),
            Rational::from_i64(b),
            Rational::from_i64(c),
            Rational::from_i64(d),
        );
        SpinHolonomy::new(m, &Tolerances::default()).unwrap()
    }

    #[test]
    fn tau_traces_give_half_eta() {
        for mu in 0..3 {
            for nu in 0..3 {
                let t: Rational = (tau::<Rational>(mu) * tau::<Rational>(nu)).trace();
                let expect = match (mu, nu) {
                    (0, 0) => <Rational as Scalar>::ratio(-1, 2),
                    (a, b) if a == b => <Rational as Scalar>::ratio(1, 2),
                    _ => Rational::from_i64(0),
                };
                assert_eq!(t, expect, "({mu},{nu})");
            }
        }
    }

    #[test]
    fn central_elements_project_to_identity() {
        let tol = Tolerances::default();
        let id = int_spin(1, 0, 0, 1);
        assert_eq!(project_matrix(&id), Matrix3::identity());
        assert_eq!(project_matrix(&id.negated()), Matrix3::identity());
        assert!(id.is_central(0.0));
        assert_eq!(spin_closure(&[id.clone(), id.clone(), id.clone(), id], &tol).unwrap().0, 1);
    }

    #[test]
    fn non_unimodular_is_rejected() {
        let m = Matrix2::new(2.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            SpinHolonomy::new(m, &Tolerances::default()),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn lift_of_identity_is_identity() {
        let o = check_so12(&Matrix3::identity(), &Tolerances::default()).unwrap();
        assert_eq!(*lift(&o, &Tolerances::default()).unwrap().matrix(), Matrix2::identity());
    }

    #[test]
    fn linear_system_fallback_recovers_lift() {
        let h = Matrix2::new(0.3, 1.7, -0.8, (1.0 + 1.7 * -0.8) / 0.3);
        let o = project_matrix(&SpinHolonomy::new(h, &Tolerances::default()).unwrap());
        let l = lift_by_linear_system(&o).unwrap();
        let close = (l - h).amax().min((l + h).amax());
        assert!(close < 1e-10, "{close}");
    }

    #[test]
    fn connected_trace_of_central_vanishes() {
        let id = int_spin(-1, 0, 0, -1);
        let h = int_spin(1, -3, 0, 1);
        assert_eq!(connected_trace2(&id, &h), Rational::from_i64(0));
    }

    #[test]
    fn null_exp_has_unit_trace_half() {
        let k = Vector3::new(-1.0, -1.0, 0.0);
        let h = spin_exp(&k, 0.0, 1, &Tolerances::default()).unwrap();
        assert_eq!(h.matrix().trace(), 2.0);
        assert_eq!(spin_exp(&Vector3::zeros(), 1.0, 1, &Tolerances::default()), Err(Error::ZeroGenerator));
    }
}
