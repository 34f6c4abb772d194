//! Input loading, report emission and failure classification.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use roughbody::forms::Cochain;
use roughbody::io::{self, Header};
use roughbody::sharp::SharpField;
use roughbody::{Chain, Complex, Error, PAMap};
use serde_json::{json, Value};

use crate::{Campaign, Output};

#[derive(Debug)]
pub enum InputError {
    Io { path: PathBuf, source: std::io::Error },
    Invalid { path: PathBuf, source: Error },
    Env(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            InputError::Invalid { path, source } => write!(f, "{}: {source}", path.display()),
            InputError::Env(m) => f.write_str(m),
        }
    }
}

pub type Outcome = Result<bool, InputError>;

pub fn invalid(path: &Path, source: Error) -> InputError {
    InputError::Invalid {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    io::parse_text(&text).map_err(|e| invalid(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), InputError> {
    write(path, &(serde_json::to_string_pretty(v).expect("serializable") + "\n"))
}

/// A mesh and the names other files may use to refer to it.
pub struct Mesh {
    pub complex: Arc<Complex>,
    pub path: PathBuf,
    names: Vec<String>,
}

impl Mesh {
    /// Name written into derived files.
    pub fn reference(&self) -> String {
        self.names[0].clone()
    }
}

pub fn load_mesh(path: &Path) -> Result<Mesh, InputError> {
    let file = io::parse_mesh(&read_json(path)?).map_err(|e| invalid(path, e))?;
    let mut names = Vec::new();
    if let Some(id) = file.id {
        names.push(id);
    }
    if let Some(name) = path.file_name() {
        names.push(name.to_string_lossy().into_owned());
    }
    if let Some(stem) = path.file_stem() {
        names.push(stem.to_string_lossy().into_owned());
    }
    names.push(path.to_string_lossy().into_owned());
    Ok(Mesh {
        complex: file.complex,
        path: path.to_path_buf(),
        names,
    })
}

/// The `"mesh"` field must name the mesh by id, file name, stem or path.
pub fn check_reference(reference: &str, mesh: &Mesh, path: &Path) -> Result<(), InputError> {
    if mesh.names.iter().any(|n| n == reference) {
        return Ok(());
    }
    Err(invalid(
        path,
        Error::SchemaViolation {
            pointer: "/mesh".into(),
            message: format!("\"{reference}\" does not name the mesh {}", mesh.path.display()),
        },
    ))
}

fn check_ref(h: &Header, mesh: &Mesh, path: &Path) -> Result<(), InputError> {
    check_reference(&h.mesh, mesh, path)
}

pub fn load_chain(path: &Path, mesh: &Mesh) -> Result<(Chain, Header), InputError> {
    let (t, h) = io::parse_chain(&read_json(path)?, &mesh.complex).map_err(|e| invalid(path, e))?;
    check_ref(&h, mesh, path)?;
    Ok((t, h))
}

pub fn load_cochain(path: &Path, mesh: &Mesh) -> Result<Cochain, InputError> {
    let (x, h) = io::parse_cochain(&read_json(path)?, &mesh.complex).map_err(|e| invalid(path, e))?;
    check_ref(&h, mesh, path)?;
    Ok(x)
}

pub fn load_map(path: &Path, mesh: &Mesh) -> Result<PAMap, InputError> {
    let (f, h) = io::parse_pamap(&read_json(path)?, &mesh.complex).map_err(|e| invalid(path, e))?;
    check_ref(&h, mesh, path)?;
    Ok(f)
}

pub fn load_fields(path: &Path, mesh: &Mesh) -> Result<Vec<SharpField>, InputError> {
    let (f, h) = io::parse_fields(&read_json(path)?, &mesh.complex).map_err(|e| invalid(path, e))?;
    check_ref(&h, mesh, path)?;
    Ok(f)
}

pub fn seed(run: &Campaign) -> Result<u64, InputError> {
    match std::env::var("ROUGHBODY_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| InputError::Env(format!("ROUGHBODY_SEED={s} is not an unsigned integer"))),
        Err(_) => Ok(run.seed),
    }
}

/// Writes the JSON report and, when requested, the CSV table.
pub fn emit(out: &Output, report: &Value, header: &[&str], rows: &[Vec<String>]) -> Result<(), InputError> {
    match &out.json {
        Some(p) => write_json(p, report)?,
        None => println!("{}", serde_json::to_string_pretty(report).expect("serializable")),
    }
    if let Some(p) = &out.csv {
        let mut text = header.join(",");
        text.push('\n');
        for r in rows {
            text.push_str(&r.join(","));
            text.push('\n');
        }
        write(p, &text)?;
    }
    Ok(())
}

/// Errors that are verdicts on the input rather than malformed input,
/// rendered as a JSON witness.
pub fn witness(e: &Error) -> Option<Value> {
    let message = e.to_string();
    let w = match e {
        Error::NotAnEmbedding(_) => json!({"error": "NotAnEmbedding"}),
        Error::OrientationReversal { simplex, jacobian } => {
            json!({"error": "OrientationReversal", "simplex": simplex, "jacobian": jacobian})
        }
        Error::ExtensionDependence {
            component,
            facet,
            first,
            second,
        } => json!({
            "error": "ExtensionDependence", "component": component, "facet": facet,
            "first": first, "second": second,
        }),
        Error::DeclaredConstantViolated {
            name,
            declared,
            observed,
            sample,
        } => json!({
            "error": "DeclaredConstantViolated", "constant": name, "declared": declared,
            "observed": observed, "sample": sample,
        }),
        Error::GeneratorOverlap { facet } => json!({"error": "GeneratorOverlap", "facet": facet}),
        _ => return None,
    };
    let mut w = w;
    w["message"] = json!(message);
    Some(w)
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}
