//! Input documents: holonomy quadruples, Gram matrices, tetrahedra and flat
//! configurations, all read from JSON.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use holomink::{Quadratic, Sigma};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum InputError {
    Io { path: String, message: String },
    Json { line: usize, column: usize, message: String },
    Field { path: String, message: String },
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io { path, message } => write!(f, "{path}: {message}"),
            InputError::Json { line, column, message } => write!(f, "invalid JSON at line {line}, column {column}: {message}"),
            InputError::Field { path, message } => write!(f, "field `{path}`: {message}"),
        }
    }
}

impl std::error::Error for InputError {}

fn field(path: &str, message: impl Into<String>) -> InputError {
    InputError::Field { path: path.to_string(), message: message.into() }
}

/// A scalar as written in the document: a JSON number or a string such as
/// "p/q" or "r+c*sqrt(d)". Kept as text so exact mode loses nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub text: String,
    pub path: String,
}

impl Literal {
    fn from_value(v: &Value, path: &str) -> Result<Literal, InputError> {
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return Err(field(path, "expected a number or a numeric string")),
        };
        Ok(Literal { text, path: path.to_string() })
    }

    pub fn exact(&self) -> Result<Quadratic, InputError> {
        Quadratic::from_str(&self.text).map_err(|_| field(&self.path, format!("cannot parse {:?} as an exact scalar", self.text)))
    }

    pub fn float(&self) -> Result<f64, InputError> {
        if let Ok(x) = self.text.parse::<f64>() {
            return Ok(x);
        }
        use holomink::Scalar;
        self.exact().map(|q| q.to_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    So12,
    Sl2r,
}

impl Kind {
    pub fn dimension(self) -> usize {
        match self {
            Kind::So12 => 3,
            Kind::Sl2r => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::So12 => "so12",
            Kind::Sl2r => "sl2r",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Options {
    pub tolerance: Option<f64>,
    pub class_tolerance: Option<f64>,
    pub exact: bool,
    pub derive_fourth: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyDocument {
    pub kind: Kind,
    /// Three or four square matrices of literals, row-major.
    pub matrices: Vec<Vec<Vec<Literal>>>,
    pub options: Options,
}

impl HolonomyDocument {
    /// Four matrices are required unless the fourth is derived from closure.
    pub fn check_count(&self, derive_fourth: bool) -> Result<(), InputError> {
        match (self.matrices.len(), derive_fourth) {
            (4, _) | (3, true) => Ok(()),
            (n, _) => Err(field("matrices", format!("expected 4 matrices, found {n} (derive_fourth builds the fourth by closure)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramDocument {
    pub entries: [Literal; 10],
    pub sigma: Option<Sigma>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TetrahedronDocument {
    pub sigma: Sigma,
    pub normals: [[f64; 4]; 4],
    pub vertices: [[f64; 4]; 4],
}

/// Vertices of a flat tetrahedron in ℝ^{1,2}.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatDocument {
    pub vertices: [[f64; 3]; 4],
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Holonomy(HolonomyDocument),
    Gram(GramDocument),
    Tetrahedron(TetrahedronDocument),
    Flat(FlatDocument),
}

impl Document {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Document::Holonomy(_) => "holonomy",
            Document::Gram(_) => "gram",
            Document::Tetrahedron(_) => "tetrahedron",
            Document::Flat(_) => "flat",
        }
    }
}

pub fn read_value(path: &Path) -> Result<Value, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_value(&text)
}

pub fn parse_value(text: &str) -> Result<Value, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Json { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn parse_document(text: &str) -> Result<Document, InputError> {
    document_from_value(&parse_value(text)?)
}

pub fn read_document(path: &Path) -> Result<Document, InputError> {
    document_from_value(&read_value(path)?)
}

pub fn document_from_value(v: &Value) -> Result<Document, InputError> {
    let obj = v.as_object().ok_or_else(|| field("$", "expected an object"))?;
    if obj.contains_key("kind") {
        return holonomy_document(obj).map(Document::Holonomy);
    }
    if obj.contains_key("entries") {
        return gram_document(obj).map(Document::Gram);
    }
    if obj.contains_key("normals") {
        return tetrahedron_document(obj).map(Document::Tetrahedron);
    }
    if obj.contains_key("vertices") {
        return flat_document(obj).map(Document::Flat);
    }
    Err(field("$", "expected one of the keys `kind`, `entries`, `normals` or `vertices`"))
}

fn array<'a>(v: &'a Value, path: &str, len: Option<usize>) -> Result<&'a Vec<Value>, InputError> {
    let a = v.as_array().ok_or_else(|| field(path, "expected an array"))?;
    if let Some(n) = len {
        if a.len() != n {
            return Err(field(path, format!("expected {n} elements, found {}", a.len())));
        }
    }
    Ok(a)
}

fn number(v: &Value, path: &str) -> Result<f64, InputError> {
    Literal::from_value(v, path)?.float()
}

fn sigma_of(v: &Value, path: &str) -> Result<Sigma, InputError> {
    v.as_i64()
        .and_then(|s| Sigma::from_sign(s as i8))
        .ok_or_else(|| field(path, "expected +1 (de Sitter) or -1 (anti-de Sitter)"))
}

fn options(obj: &Map<String, Value>) -> Result<Options, InputError> {
    let Some(v) = obj.get("options") else { return Ok(Options::default()) };
    let o = v.as_object().ok_or_else(|| field("options", "expected an object"))?;
    let mut out = Options::default();
    for (k, v) in o {
        let path = format!("options.{k}");
        match k.as_str() {
            "tolerance" => out.tolerance = Some(number(v, &path)?),
            "class_tolerance" => out.class_tolerance = Some(number(v, &path)?),
            "exact" => out.exact = v.as_bool().ok_or_else(|| field(&path, "expected a boolean"))?,
            "derive_fourth" => out.derive_fourth = v.as_bool().ok_or_else(|| field(&path, "expected a boolean"))?,
            _ => return Err(field(&path, "unknown option")),
        }
    }
    Ok(out)
}

fn holonomy_document(obj: &Map<String, Value>) -> Result<HolonomyDocument, InputError> {
    let kind = match obj["kind"].as_str() {
        Some("so12") => Kind::So12,
        Some("sl2r") => Kind::Sl2r,
        _ => return Err(field("kind", "expected \"so12\" or \"sl2r\"")),
    };
    let options = options(obj)?;
    let mats = array(obj.get("matrices").ok_or_else(|| field("matrices", "missing"))?, "matrices", None)?;
    if !(3..=4).contains(&mats.len()) {
        return Err(field("matrices", format!("expected 4 matrices (or 3 with derive_fourth), found {}", mats.len())));
    }
    let n = kind.dimension();
    let mut matrices = Vec::with_capacity(mats.len());
    for (m, mv) in mats.iter().enumerate() {
        let rows = array(mv, &format!("matrices[{m}]"), Some(n))?;
        let mut out = Vec::with_capacity(n);
        for (i, rv) in rows.iter().enumerate() {
            let row = array(rv, &format!("matrices[{m}][{i}]"), Some(n))?;
            let lits = row
                .iter()
                .enumerate()
                .map(|(j, x)| Literal::from_value(x, &format!("matrices[{m}][{i}][{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(lits);
        }
        matrices.push(out);
    }
    Ok(HolonomyDocument { kind, matrices, options })
}

fn gram_document(obj: &Map<String, Value>) -> Result<GramDocument, InputError> {
    let a = array(&obj["entries"], "entries", Some(10))?;
    let lits = a
        .iter()
        .enumerate()
        .map(|(i, x)| Literal::from_value(x, &format!("entries[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let entries: [Literal; 10] = lits.try_into().expect("length checked");
    let sigma = match obj.get("sigma") {
        None | Some(Value::Null) => None,
        Some(v) => Some(sigma_of(v, "sigma")?),
    };
    Ok(GramDocument { entries, sigma })
}

fn rows<const N: usize>(v: Option<&Value>, path: &str) -> Result<[[f64; N]; 4], InputError> {
    let a = array(v.ok_or_else(|| field(path, "missing"))?, path, Some(4))?;
    let mut out = [[0.0; N]; 4];
    for (i, rv) in a.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let r = array(rv, &p, Some(N))?;
        for (j, x) in r.iter().enumerate() {
            out[i][j] = number(x, &format!("{p}[{j}]"))?;
        }
    }
    Ok(out)
}

fn tetrahedron_document(obj: &Map<String, Value>) -> Result<TetrahedronDocument, InputError> {
    let sigma = sigma_of(obj.get("sigma").ok_or_else(|| field("sigma", "missing"))?, "sigma")?;
    Ok(TetrahedronDocument { sigma, normals: rows::<4>(obj.get("normals"), "normals")?, vertices: rows::<4>(obj.get("vertices"), "vertices")? })
}

fn flat_document(obj: &Map<String, Value>) -> Result<FlatDocument, InputError> {
    let radius = match obj.get("radius") {
        None => None,
        Some(v) => Some(number(v, "radius")?),
    };
    Ok(FlatDocument { vertices: rows::<3>(obj.get("vertices"), "vertices")?, radius })
}
