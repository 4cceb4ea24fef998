//! The subcommands, each returning a JSON report.

use holomink::forward::{face_holonomies, realize, roundtrip as gram_roundtrip};
use holomink::lorentz::{ambient_pair, AmbientVector};
use holomink::reconstruct::{gram_from_representatives, model_sign, select_branch_frozen, triple_products};
use holomink::sectors::{classify_sector, flat_closure_residual, flat_faces, flat_gram_deviation, flat_holonomy_check};
use holomink::sl2r::{fix_central_signs, lift, project, spin_closure};
use holomink::so12::{check_so12, closing_fourth, closure_residual, parabolic_log, HolonomyClass};
use holomink::{
    reconstruct as reconstruct_vector, spin_reconstruct, Config, GramData, Quadratic, Scalar, Sigma, SpinHolonomy, TangentVector,
    Tetrahedron, Tolerances, VectorHolonomy,
};
use nalgebra::{Matrix2, Matrix3, Vector4};
use serde_json::{json, Value};

use crate::document::{Document, FlatDocument, GramDocument, HolonomyDocument, InputError, Kind, Literal, Options, TetrahedronDocument};
use crate::emit::float;
use crate::exit::Failure;
use crate::report;

/// Command-line overrides; unset fields fall back to the document, then to defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Settings {
    pub tolerance: Option<f64>,
    pub class_tolerance: Option<f64>,
    pub exact: bool,
    pub derive_fourth: bool,
}

impl Settings {
    /// `tolerance` bounds residuals and closure, `class_tolerance` bounds
    /// classification decisions and the exceptional-entry cross-check.
    pub fn config(&self, opts: &Options) -> Config {
        let mut c = Config::default();
        if let Some(t) = self.tolerance.or(opts.tolerance) {
            c.tol.residual = t;
            c.closure_tol = t;
        }
        if let Some(t) = self.class_tolerance.or(opts.class_tolerance) {
            c.tol.class = t;
            c.exceptional_tol = t;
        }
        c
    }

    pub fn tol(&self) -> Tolerances {
        self.config(&Options::default()).tol
    }
}

fn unsupported(cmd: &str, doc: &Document) -> Failure {
    Failure::Unsupported(format!("`{cmd}` does not accept a {} document", doc.kind_name()))
}

fn float_matrix<const N: usize>(rows: &[Vec<Literal>]) -> Result<nalgebra::SMatrix<f64, N, N>, InputError> {
    let mut m = nalgebra::SMatrix::<f64, N, N>::zeros();
    for i in 0..N {
        for j in 0..N {
            m[(i, j)] = rows[i][j].float()?;
        }
    }
    Ok(m)
}

fn exact_matrix<const N: usize>(rows: &[Vec<Literal>]) -> Result<nalgebra::SMatrix<Quadratic, N, N>, InputError> {
    let mut m = nalgebra::SMatrix::<Quadratic, N, N>::zeros();
    for i in 0..N {
        for j in 0..N {
            m[(i, j)] = rows[i][j].exact()?;
        }
    }
    Ok(m)
}

fn four<T: Clone>(v: Vec<T>) -> [T; 4] {
    v.try_into().unwrap_or_else(|_| unreachable!("four items"))
}

fn vector_inputs(doc: &HolonomyDocument, derive: bool, tol: &Tolerances) -> Result<[VectorHolonomy; 4], Failure> {
    let mut os = Vec::with_capacity(4);
    for m in doc.matrices.iter().take(if derive { 3 } else { 4 }) {
        os.push(check_so12(&float_matrix::<3>(m)?, tol)?);
    }
    if os.len() == 3 {
        let d = closing_fourth(os[0].matrix(), os[1].matrix(), os[2].matrix());
        os.push(check_so12(&d, tol)?);
    }
    Ok(four(os))
}

fn spin_inputs(doc: &HolonomyDocument, derive: bool, tol: &Tolerances) -> Result<[SpinHolonomy; 4], Failure> {
    let mut hs = Vec::with_capacity(4);
    for m in doc.matrices.iter().take(if derive { 3 } else { 4 }) {
        hs.push(SpinHolonomy::new(float_matrix::<2>(m)?, tol)?);
    }
    if hs.len() == 3 {
        let p: Matrix2<f64> = hs[2].matrix() * hs[1].matrix() * hs[0].matrix();
        hs.push(SpinHolonomy::new(p, tol)?.inverse());
    }
    Ok(four(hs))
}

/// Exact closure and, when every face is parabolic, the exact Gram matrix.
fn exact_section(doc: &HolonomyDocument, derive: bool, tol: &Tolerances) -> Result<Value, Failure> {
    let mut out = serde_json::Map::new();
    let os: [VectorHolonomy<Quadratic>; 4] = match doc.kind {
        Kind::So12 => {
            let mut ms = Vec::with_capacity(4);
            for m in doc.matrices.iter().take(if derive { 3 } else { 4 }) {
                ms.push(exact_matrix::<3>(m)?);
            }
            if ms.len() == 3 {
                ms.push(closing_fourth(&ms[0], &ms[1], &ms[2]));
            }
            let mut os = Vec::with_capacity(4);
            for m in &ms {
                os.push(check_so12(m, tol)?);
            }
            four(os)
        }
        Kind::Sl2r => {
            let mut hs = Vec::with_capacity(4);
            for m in doc.matrices.iter().take(if derive { 3 } else { 4 }) {
                hs.push(SpinHolonomy::new(exact_matrix::<2>(m)?, tol)?);
            }
            if hs.len() == 3 {
                let p = hs[2].matrix() * hs[1].matrix() * hs[0].matrix();
                hs.push(SpinHolonomy::new(p, tol)?.inverse());
            }
            let hs: [SpinHolonomy<Quadratic>; 4] = four(hs);
            let (eps, res) = spin_closure(&hs, tol)?;
            out.insert("spin_closure".into(), json!({"central_sign": eps, "residual": report::scalar(&res)}));
            let mut os = Vec::with_capacity(4);
            for h in &hs {
                os.push(project(h, tol)?);
            }
            four(os)
        }
    };
    let mats: [Matrix3<Quadratic>; 4] = std::array::from_fn(|i| os[i].matrix().clone());
    out.insert("closure_residual".into(), report::scalar(&closure_residual(&mats)));
    out.insert("projected".into(), Value::Array(mats.iter().map(report::scalar_matrix).collect()));
    out.insert("classes".into(), json!(os.iter().map(|o| o.class().name()).collect::<Vec<_>>()));
    if os.iter().all(|o| o.class() == HolonomyClass::Parabolic) {
        let reps: [TangentVector<Quadratic>; 4] = std::array::from_fn(|i| parabolic_log(os[i].matrix()));
        let (g, alt) = gram_from_representatives(&reps, os[0].matrix(), os[2].matrix());
        if g[(1, 3)] != alt {
            let deviation = (g[(1, 3)].clone() - alt).to_f64().abs();
            return Err(holomink::Error::ExceptionalEntryMismatch { deviation }.into());
        }
        let chi = triple_products(&reps, os[0].matrix(), os[2].matrix());
        let chi_f: [f64; 4] = std::array::from_fn(|i| chi[i].to_f64());
        // null representatives are fixed, so the only admissible branch is δ = +1
        select_branch_frozen(&chi_f, &[true; 4], tol)?;
        let gd = GramData::new(g, tol)?;
        let sigma = model_sign(&gd, tol)?;
        out.insert("gram".into(), report::gram(&gd));
        out.insert("chi".into(), Value::Array(chi.iter().map(report::scalar).collect()));
        out.insert("sigma".into(), json!(sigma.sign()));
    }
    Ok(Value::Object(out))
}

pub fn reconstruct(doc: &Document, s: &Settings) -> Result<Value, Failure> {
    let Document::Holonomy(h) = doc else { return Err(unsupported("reconstruct", doc)) };
    let derive = s.derive_fourth || h.options.derive_fourth;
    h.check_count(derive)?;
    let config = s.config(&h.options);
    let (report, inputs) = match h.kind {
        Kind::So12 => {
            let os = vector_inputs(h, derive, &config.tol)?;
            (reconstruct_vector(&os, &config)?, os)
        }
        Kind::Sl2r => {
            let hs = spin_inputs(h, derive, &config.tol)?;
            let r = spin_reconstruct(&hs, &config)?;
            let mut os = Vec::with_capacity(4);
            for x in &hs {
                os.push(project(x, &config.tol)?);
            }
            (r, four(os))
        }
    };
    let mut v = report::reconstruction(&report, &inputs);
    v["command"] = json!("reconstruct");
    v["input_kind"] = json!(h.kind.name());
    if s.exact || h.options.exact {
        v["exact"] = exact_section(h, derive, &config.tol)?;
    }
    Ok(v)
}

pub fn float_gram(g: &GramDocument, tol: &Tolerances) -> Result<GramData<f64>, Failure> {
    let mut upper = [0.0; 10];
    for (k, l) in g.entries.iter().enumerate() {
        upper[k] = l.float()?;
    }
    Ok(GramData::from_upper(upper, tol)?)
}

pub fn exact_gram(g: &GramDocument, tol: &Tolerances) -> Result<GramData<Quadratic>, Failure> {
    let mut upper: [Quadratic; 10] = std::array::from_fn(|_| Quadratic::from_i64(0));
    for (k, l) in g.entries.iter().enumerate() {
        upper[k] = l.exact()?;
    }
    Ok(GramData::from_upper(upper, tol)?)
}

fn lifted(os: &[VectorHolonomy; 4], tol: &Tolerances) -> Result<([SpinHolonomy; 4], f64), Failure> {
    let hs = [lift(&os[0], tol)?, lift(&os[1], tol)?, lift(&os[2], tol)?, lift(&os[3], tol)?];
    let (eps, _) = spin_closure(&hs, tol)?;
    let hs = fix_central_signs(&hs, eps);
    let (_, res) = spin_closure(&hs, tol)?;
    Ok((hs, res))
}

fn tetrahedron_of(t: &TetrahedronDocument, tol: &Tolerances) -> Result<Tetrahedron, Failure> {
    let amb = |x: &[f64; 4]| AmbientVector::new(Vector4::from_column_slice(x), t.sigma);
    let normals = t.normals.each_ref().map(amb);
    let vertices = t.vertices.each_ref().map(amb);
    let mut supports = [0.0; 4];
    for i in 0..4 {
        supports[i] = ambient_pair(&vertices[i], &normals[i])?;
    }
    let tet = Tetrahedron { sigma: t.sigma, normals, vertices, supports };
    tet.validate(tol)?;
    Ok(tet)
}

pub fn forward(doc: &Document, s: &Settings) -> Result<Value, Failure> {
    let tol = s.tol();
    let (tet, signs) = match doc {
        Document::Gram(g) => {
            let gd = float_gram(g, &tol)?;
            let sigma = match g.sigma {
                Some(sg) => sg,
                None => model_sign(&gd, &tol)?,
            };
            let r = realize(&gd, sigma, &tol)?;
            (r.tetrahedron, Some(r.signs))
        }
        Document::Tetrahedron(t) => (tetrahedron_of(t, &tol)?, None),
        other => return Err(unsupported("forward", other)),
    };
    let fh = face_holonomies(&tet, &tol)?;
    let (hs, spin_res) = lifted(&fh.holonomies, &tol)?;
    let mut v = report::face_holonomies(&fh, &hs, spin_res);
    v["command"] = json!("forward");
    v["sigma"] = json!(tet.sigma.sign());
    v["tetrahedron"] = report::tetrahedron(&tet);
    v["signs"] = signs.map(|d| json!(d)).unwrap_or(Value::Null);
    Ok(v)
}

pub fn classify(doc: &Document, s: &Settings) -> Result<Value, Failure> {
    let Document::Gram(g) = doc else { return Err(unsupported("classify", doc)) };
    let tol = s.tol();
    let (mut v, gram) = if s.exact {
        let gd = exact_gram(g, &tol)?;
        (report::sector(&classify_sector(&gd, g.sigma, &tol)), report::gram(&gd))
    } else {
        let gd = float_gram(g, &tol)?;
        (report::sector(&classify_sector(&gd, g.sigma, &tol)), report::gram(&gd))
    };
    v["command"] = json!("classify");
    v["exact"] = json!(s.exact);
    v["gram"] = gram;
    Ok(v)
}

pub fn roundtrip(doc: &Document, s: &Settings) -> Result<Value, Failure> {
    let Document::Gram(g) = doc else { return Err(unsupported("roundtrip", doc)) };
    let tol = s.tol();
    let r = if s.exact {
        let gd = exact_gram(g, &tol)?;
        let sigma = g.sigma.map_or_else(|| model_sign(&gd, &tol), Ok)?;
        gram_roundtrip(&gd, sigma, &tol)?
    } else {
        let gd = float_gram(g, &tol)?;
        let sigma = g.sigma.map_or_else(|| model_sign(&gd, &tol), Ok)?;
        gram_roundtrip(&gd, sigma, &tol)?
    };
    let mut v = report::roundtrip(&r);
    v["command"] = json!("roundtrip");
    Ok(v)
}

/// Vertices of the built-in flat configuration used when no document is given.
pub fn default_flat() -> FlatDocument {
    FlatDocument {
        vertices: [[0.0, 0.0, 0.0], [0.3, 1.0, 0.0], [-0.2, 0.1, 1.1], [0.1, 0.9, 0.8]],
        radius: None,
    }
}

pub const DEFAULT_RADIUS: f64 = 20.0;
pub const FLAT_RATIO_RANGE: (f64, f64) = (3.6, 4.4);

pub fn flatcheck(doc: Option<&Document>, radius: Option<f64>, s: &Settings) -> Result<Value, Failure> {
    let flat = match doc {
        None => default_flat(),
        Some(Document::Flat(f)) => f.clone(),
        Some(other) => return Err(unsupported("flatcheck", other)),
    };
    let tol = s.tol();
    let r = radius.or(flat.radius).unwrap_or(DEFAULT_RADIUS);
    let x: [TangentVector; 4] = flat.vertices.map(|v| TangentVector::new(v[0], v[1], v[2]));
    let faces = flat_faces(&x, &tol)?;
    let mut models = serde_json::Map::new();
    let mut passed = true;
    for sigma in [Sigma::DeSitter, Sigma::AntiDeSitter] {
        let near = flat_gram_deviation(&x, r, sigma, &tol)?;
        let far = flat_gram_deviation(&x, 2.0 * r, sigma, &tol)?;
        let ratio = near / far;
        let ok = (FLAT_RATIO_RANGE.0..=FLAT_RATIO_RANGE.1).contains(&ratio);
        passed &= ok;
        models.insert(
            report::model_name(sigma.sign()).into(),
            json!({
                "gram_deviation": floats2(near, far),
                "ratio": float(ratio),
                "ratio_in_range": ok,
                "holonomy": [report::flat_check(&flat_holonomy_check(&x, r, sigma, &tol)?), report::flat_check(&flat_holonomy_check(&x, 2.0 * r, sigma, &tol)?)],
            }),
        );
    }
    Ok(json!({
        "command": "flatcheck",
        "vertices": flat.vertices.iter().map(|v| report::floats(v)).collect::<Vec<_>>(),
        "radii": floats2(r, 2.0 * r),
        "faces": report::flat_faces(&faces),
        "flat_closure_residual": float(flat_closure_residual(&faces).amax()),
        "models": models,
        "ratio_range": floats2(FLAT_RATIO_RANGE.0, FLAT_RATIO_RANGE.1),
        "passed": passed,
    }))
}

fn floats2(a: f64, b: f64) -> Value {
    json!([float(a), float(b)])
}
