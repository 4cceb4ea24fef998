//! JSON views of library results.

use holomink::forward::{FaceHolonomies, RoundtripReport};
use holomink::sectors::{FlatFaceData, FlatHolonomyCheck, SectorReport};
use holomink::{GramData, Inertia, NormalData, ReconstructionReport, Scalar, SpinHolonomy, Tetrahedron, VectorHolonomy};
use nalgebra::{Dim, Matrix, RawStorage};
use serde_json::{json, Value};

use crate::emit::float;

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

pub fn matrix<R: Dim, C: Dim, St: RawStorage<f64, R, C>>(m: &Matrix<f64, R, C, St>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| float(m[(i, j)])).collect())).collect())
}

/// Exact scalars as strings ("p/q" or "r+c*sqrt(d)"); floats as numbers.
pub fn scalar<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        Value::String(x.to_string())
    } else {
        float(x.to_f64())
    }
}

pub fn scalar_matrix<S: Scalar, R: Dim, C: Dim, St: RawStorage<S, R, C>>(m: &Matrix<S, R, C, St>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| scalar(&m[(i, j)])).collect())).collect())
}

pub fn inertia(i: &Inertia) -> Value {
    json!([i.zeros, i.negatives, i.positives])
}

pub fn gram<S: Scalar>(g: &GramData<S>) -> Value {
    json!({
        "entries": scalar_matrix(&g.entries),
        "det": scalar(&g.det),
        "minors": g.minors.iter().map(scalar).collect::<Vec<_>>(),
        "inertia": inertia(&g.inertia),
        "minor_inertias": g.minor_inertias.iter().map(inertia).collect::<Vec<_>>(),
    })
}

pub fn causal_name(nu: i8) -> &'static str {
    match nu {
        -1 => "timelike",
        1 => "spacelike",
        _ => "null",
    }
}

pub fn normal(n: &NormalData) -> Value {
    json!({
        "representative": floats(n.representative.as_slice()),
        "nu": n.nu,
        "causal": causal_name(n.nu),
        "coordinate": n.theta.map(float).unwrap_or(Value::Null),
    })
}

pub fn tetrahedron(t: &Tetrahedron) -> Value {
    json!({
        "sigma": t.sigma.sign(),
        "normals": t.normals.iter().map(|n| floats(n.coords.as_slice())).collect::<Vec<_>>(),
        "vertices": t.vertices.iter().map(|v| floats(v.coords.as_slice())).collect::<Vec<_>>(),
        "supports": floats(&t.supports),
    })
}

pub fn model_name(sign: i8) -> &'static str {
    if sign > 0 {
        "dS"
    } else {
        "AdS"
    }
}

pub fn holonomies(os: &[VectorHolonomy]) -> Value {
    json!({
        "matrices": os.iter().map(|o| matrix(o.matrix())).collect::<Vec<_>>(),
        "classes": os.iter().map(|o| o.class().name()).collect::<Vec<_>>(),
        "traces": os.iter().map(|o| float(o.trace())).collect::<Vec<_>>(),
    })
}

pub fn lifts(hs: &[SpinHolonomy]) -> Value {
    json!({
        "matrices": hs.iter().map(|h| matrix(h.matrix())).collect::<Vec<_>>(),
        "traces": hs.iter().map(|h| float(h.matrix().trace())).collect::<Vec<_>>(),
    })
}

pub fn reconstruction(r: &ReconstructionReport, inputs: &[VectorHolonomy; 4]) -> Value {
    let d = &r.diagnostics;
    json!({
        "sigma": r.sigma.sign(),
        "model": model_name(r.sigma.sign()),
        "holonomies": holonomies(inputs),
        "normals": r.normals.iter().map(normal).collect::<Vec<_>>(),
        "branch_signs": r.branch_signs,
        "central_signs": r.central_signs,
        "chi": floats(&r.chi),
        "gram": gram(&r.gram),
        "tetrahedron": tetrahedron(&r.tetrahedron),
        "diagnostics": {
            "closure": float(d.closure),
            "exceptional": float(d.exceptional),
            "holonomy_match": floats(&d.holonomy_match),
            "max_holonomy_match": float(d.max_match()),
            "minor_identity": floats(&d.minor_identity),
        },
    })
}

pub fn face_holonomies(fh: &FaceHolonomies, lifted: &[SpinHolonomy; 4], spin_residual: f64) -> Value {
    json!({
        "frame": matrix(&fh.frame),
        "holonomies": holonomies(&fh.holonomies),
        "lifts": lifts(lifted),
        "normals": fh.normals.iter().map(|n| floats(n.as_slice())).collect::<Vec<_>>(),
        "closure_residual": float(fh.closure_residual),
        "spin_closure_residual": float(spin_residual),
    })
}

pub fn roundtrip(r: &RoundtripReport) -> Value {
    json!({
        "sigma": r.sigma.sign(),
        "signs": r.signs,
        "tetrahedron": tetrahedron(&r.tetrahedron),
        "holonomies": holonomies(&r.holonomies),
        "lifts": lifts(&r.lifts),
        "normals": r.normals.iter().map(normal).collect::<Vec<_>>(),
        "gram": gram(&r.gram),
        "closure_residual": float(r.closure_residual),
        "spin_closure_residual": float(r.spin_closure_residual),
        "exceptional_residual": float(r.exceptional_residual),
        "entry_deviation": float(r.entry_deviation),
        "det_deviation": float(r.det_deviation),
        "minor_deviation": float(r.minor_deviation),
    })
}

pub fn sector(s: &SectorReport) -> Value {
    json!({
        "model": s.model.name(),
        "vertex_types": s.vertex_types.iter().map(|v| v.name()).collect::<Vec<_>>(),
        "dual_vertex_types": s.dual_vertex_types.map(|d| d.iter().map(|v| v.name()).collect::<Vec<_>>()),
        "face_causal_types": s.face_causal_types.iter().map(|v| v.name()).collect::<Vec<_>>(),
    })
}

pub fn flat_faces(faces: &[FlatFaceData]) -> Value {
    Value::Array(
        faces
            .iter()
            .map(|f| json!({"normal": floats(f.normal.as_slice()), "area": float(f.area), "support": float(f.support)}))
            .collect(),
    )
}

pub fn flat_check(c: &FlatHolonomyCheck) -> Value {
    json!({
        "generators": c.generators.iter().map(|g| floats(g.as_slice())).collect::<Vec<_>>(),
        "closure_defect": float(c.closure_defect),
        "product_defect": float(c.product_defect),
        "area_normal_mismatch": float(c.area_normal_mismatch),
    })
}
