//! JSON reading and writing for meshes, chains, cochains, maps and fields.
//! Every schema error carries a JSON pointer to the offending value.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::chain::Chain;
use crate::complex::{build_complex, Complex};
use crate::error::{Error, Result};
use crate::forms::Cochain;
use crate::lipschitz::PAMap;
use crate::sharp::SharpField;

fn violation(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::SchemaViolation {
        pointer: pointer.into(),
        message: message.into(),
    }
}

pub fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| violation("", format!("invalid JSON: {e}")))
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| violation(at, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| violation(at, format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| violation(at, "expected an array"))
}

fn number(v: &Value, at: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| violation(at, "expected a finite number"))
}

fn index(v: &Value, at: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| violation(at, "expected a nonnegative integer"))
}

fn numbers(v: &Value, at: &str) -> Result<Vec<f64>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{at}/{i}")))
        .collect()
}

/// A mesh together with the identifier other files use to refer to it.
#[derive(Clone, Debug)]
pub struct MeshFile {
    pub id: Option<String>,
    pub complex: Arc<Complex>,
}

/// Parses `{"dim", "vertices", "simplices": {"k": [[i, ...]]}}` with an
/// optional `"id"`, and builds the complex.
pub fn parse_mesh(v: &Value) -> Result<MeshFile> {
    let obj = object(v, "")?;
    let dim = index(field(obj, "dim", "")?, "/dim")?;
    if !(1..=3).contains(&dim) {
        return Err(violation("/dim", format!("dimension {dim} is not 1, 2 or 3")));
    }
    let id = match obj.get("id") {
        None => None,
        Some(x) => Some(x.as_str().ok_or_else(|| violation("/id", "expected a string"))?.to_string()),
    };
    let verts = array(field(obj, "vertices", "")?, "/vertices")?;
    let mut vertices = Vec::with_capacity(verts.len());
    for (i, x) in verts.iter().enumerate() {
        let at = format!("/vertices/{i}");
        let p = numbers(x, &at)?;
        if p.len() != dim {
            return Err(violation(at, format!("expected {dim} coordinates, found {}", p.len())));
        }
        vertices.push(p);
    }
    let simp = object(field(obj, "simplices", "")?, "/simplices")?;
    let mut lists: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for (key, list) in simp {
        let at = format!("/simplices/{key}");
        let k: usize = key
            .parse()
            .ok()
            .filter(|&k| k <= dim)
            .ok_or_else(|| violation(&at, format!("\"{key}\" is not a degree between 0 and {dim}")))?;
        let mut out = Vec::new();
        for (i, s) in array(list, &at)?.iter().enumerate() {
            let at = format!("{at}/{i}");
            let tuple: Vec<usize> = array(s, &at)?
                .iter()
                .enumerate()
                .map(|(j, x)| index(x, &format!("{at}/{j}")))
                .collect::<Result<_>>()?;
            if tuple.len() != k + 1 {
                return Err(violation(at, format!("a {k}-simplex needs {} vertices", k + 1)));
            }
            out.push(tuple);
        }
        lists.insert(k, out);
    }
    let complex = build_complex(dim, &vertices, &lists).map_err(|e| locate_build_error(e, &lists))?;
    Ok(MeshFile { id, complex })
}

/// Points construction errors at the simplex list entry they concern.
fn locate_build_error(e: Error, lists: &BTreeMap<usize, Vec<Vec<usize>>>) -> Error {
    let listed = |k: usize, i: usize| lists.get(&k).is_some_and(|l| i < l.len());
    let at = |k: usize, i: usize| {
        if listed(k, i) {
            format!("/simplices/{k}/{i}")
        } else {
            "/simplices".to_string()
        }
    };
    let message = e.to_string();
    match e {
        Error::IndexOutOfRange { degree, simplex, .. } | Error::DegenerateSimplex { degree, simplex, .. } => {
            violation(at(degree, simplex), message)
        }
        Error::DuplicateSimplex { degree, second, .. } | Error::NonManifoldOverlap { degree, second, .. } => {
            violation(at(degree, second), message)
        }
        Error::UnsupportedDimension(_) => violation("/dim", message),
        other => violation("", other.to_string()),
    }
}

/// Writes every simplex of every degree in index order, so that reading the
/// file back reproduces indices and orientations.
pub fn mesh_to_json(c: &Complex, id: Option<&str>) -> Value {
    let n = c.dim();
    let vertices: Vec<Value> = (0..c.count(0)).map(|v| json!(c.vertex(v)[..n].to_vec())).collect();
    let mut simplices = Map::new();
    for k in 0..=n {
        let list: Vec<Value> = (0..c.count(k)).map(|i| json!(c.simplex(k, i).to_vec())).collect();
        simplices.insert(k.to_string(), Value::Array(list));
    }
    let mut obj = Map::new();
    if let Some(id) = id {
        obj.insert("id".into(), json!(id));
    }
    obj.insert("dim".into(), json!(n));
    obj.insert("vertices".into(), Value::Array(vertices));
    obj.insert("simplices".into(), Value::Object(simplices));
    Value::Object(obj)
}

/// Header shared by chain, cochain, map and field files.
#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub mesh: String,
    pub role: Option<String>,
}

fn header(obj: &Map<String, Value>) -> Result<Header> {
    let mesh = field(obj, "mesh", "")?
        .as_str()
        .ok_or_else(|| violation("/mesh", "expected a string"))?
        .to_string();
    let role = match obj.get("role") {
        None => None,
        Some(r) => Some(r.as_str().ok_or_else(|| violation("/role", "expected a string"))?.to_string()),
    };
    Ok(Header { mesh, role })
}

fn sparse(obj: &Map<String, Value>, count: usize) -> Result<Vec<(usize, f64)>> {
    let list = array(field(obj, "coefficients", "")?, "/coefficients")?;
    let mut out = Vec::with_capacity(list.len());
    for (i, pair) in list.iter().enumerate() {
        let at = format!("/coefficients/{i}");
        let p = array(pair, &at)?;
        if p.len() != 2 {
            return Err(violation(at, "expected [simplex_index, value]"));
        }
        let s = index(&p[0], &format!("{at}/0"))?;
        if s >= count {
            return Err(violation(format!("{at}/0"), format!("simplex {s} out of range ({count} simplices)")));
        }
        out.push((s, number(&p[1], &format!("{at}/1"))?));
    }
    Ok(out)
}

fn degree_of(obj: &Map<String, Value>, c: &Complex) -> Result<usize> {
    let k = index(field(obj, "degree", "")?, "/degree")?;
    if k > c.dim() {
        return Err(violation("/degree", format!("degree {k} exceeds the mesh dimension {}", c.dim())));
    }
    Ok(k)
}

/// `{"mesh", "degree", "coefficients": [[i, a]], "role"?}`; repeated indices add.
pub fn parse_chain(v: &Value, c: &Arc<Complex>) -> Result<(Chain, Header)> {
    let obj = object(v, "")?;
    let h = header(obj)?;
    let k = degree_of(obj, c)?;
    let coeffs = sparse(obj, c.count(k))?;
    Ok((Chain::new(c, k, coeffs)?, h))
}

pub fn chain_to_json(t: &Chain, mesh: &str, role: Option<&str>) -> Value {
    let mut obj = Map::new();
    obj.insert("mesh".into(), json!(mesh));
    if let Some(r) = role {
        obj.insert("role".into(), json!(r));
    }
    obj.insert("degree".into(), json!(t.degree()));
    let coeffs: Vec<Value> = t.iter().map(|(i, a)| json!([i, a])).collect();
    obj.insert("coefficients".into(), Value::Array(coeffs));
    Value::Object(obj)
}

/// Same layout as a chain; absent simplices have value zero.
pub fn parse_cochain(v: &Value, c: &Arc<Complex>) -> Result<(Cochain, Header)> {
    let obj = object(v, "")?;
    let h = header(obj)?;
    let k = degree_of(obj, c)?;
    let mut coeffs = vec![0.0; c.count(k)];
    for (i, a) in sparse(obj, c.count(k))? {
        coeffs[i] += a;
    }
    Ok((Cochain::new(c, k, coeffs)?, h))
}

pub fn cochain_to_json(x: &Cochain, mesh: &str) -> Value {
    let coeffs: Vec<Value> = x
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(i, a)| json!([i, a]))
        .collect();
    json!({"mesh": mesh, "degree": x.degree(), "coefficients": coeffs})
}

/// `{"mesh", "images": [[y, ...] per vertex]}`.
pub fn parse_pamap(v: &Value, c: &Arc<Complex>) -> Result<(PAMap, Header)> {
    let obj = object(v, "")?;
    let h = header(obj)?;
    let list = array(field(obj, "images", "")?, "/images")?;
    if list.len() != c.count(0) {
        return Err(violation(
            "/images",
            format!("expected {} images, found {}", c.count(0), list.len()),
        ));
    }
    let mut images = Vec::with_capacity(list.len());
    let mut m = None;
    for (i, y) in list.iter().enumerate() {
        let at = format!("/images/{i}");
        let p = numbers(y, &at)?;
        if p.is_empty() || p.len() > 3 || m.is_some_and(|m| m != p.len()) {
            return Err(violation(at, "images need a common dimension between 1 and 3"));
        }
        m = Some(p.len());
        images.push(p);
    }
    let map = PAMap::new(c, &images).map_err(|e| violation("/images", e.to_string()))?;
    Ok((map, h))
}

pub fn pamap_to_json(f: &PAMap, mesh: &str) -> Value {
    let images: Vec<Value> = (0..f.source().count(0)).map(|v| json!(f.image_of_vertex(v))).collect();
    json!({"mesh": mesh, "images": images})
}

/// `{"mesh", "values": [...]}` for one field or `[[...], ...]` for a
/// vector field, one array per component.
pub fn parse_fields(v: &Value, c: &Arc<Complex>) -> Result<(Vec<SharpField>, Header)> {
    let obj = object(v, "")?;
    let h = header(obj)?;
    let values = array(field(obj, "values", "")?, "/values")?;
    let rows: Vec<Vec<f64>> = if values.first().is_some_and(Value::is_array) {
        values
            .iter()
            .enumerate()
            .map(|(i, r)| numbers(r, &format!("/values/{i}")))
            .collect::<Result<_>>()?
    } else {
        vec![numbers(field(obj, "values", "")?, "/values")?]
    };
    let fields = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != c.count(0) {
                let at = if values.first().is_some_and(Value::is_array) {
                    format!("/values/{i}")
                } else {
                    "/values".to_string()
                };
                return Err(violation(at, format!("expected {} vertex values, found {}", c.count(0), r.len())));
            }
            SharpField::new(c, r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((fields, h))
}

pub fn fields_to_json(fields: &[SharpField], mesh: &str) -> Value {
    let values: Vec<Value> = fields.iter().map(|f| json!(f.values())).collect();
    if values.len() == 1 {
        json!({"mesh": mesh, "values": values[0]})
    } else {
        json!({"mesh": mesh, "values": values})
    }
}
