use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ambient dimension {0} is not supported (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("vertex index {index} out of range in {degree}-simplex {simplex} ({count} vertices)")]
    IndexOutOfRange {
        degree: usize,
        simplex: usize,
        index: usize,
        count: usize,
    },
    #[error("simplex index {index} out of range for degree {degree}")]
    SimplexOutOfRange { degree: usize, index: usize },
    #[error("degenerate {degree}-simplex {simplex}: volume {volume:e}")]
    DegenerateSimplex {
        degree: usize,
        simplex: usize,
        volume: f64,
    },
    #[error("simplex listed twice: {degree}-simplices {first} and {second}")]
    DuplicateSimplex {
        degree: usize,
        first: usize,
        second: usize,
    },
    #[error("interiors of {degree}-simplices {first} and {second} intersect")]
    NonManifoldOverlap {
        degree: usize,
        first: usize,
        second: usize,
    },
    #[error("chains or cochains live on different complexes")]
    ComplexMismatch,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("operation undefined on degree-0 chains")]
    DegreeZero,
    #[error("coboundary undefined on top-degree cochains (degree {0})")]
    TopDegree(usize),
    #[error("wedge degree {0} exceeds the ambient dimension")]
    DegreeOverflow(usize),
    #[error("chain references a {degree}-simplex that is not in the ambient complex")]
    AmbientTooSmall { degree: usize },
    #[error("linear program failed: {0}")]
    LpNumericalFailure(String),
    #[error("region is empty")]
    EmptyRegion,
    #[error("image dimension {target} is incompatible with source dimension {source_dim}")]
    NonSimplexImage { source_dim: usize, target: usize },
    #[error("image of simplex {0} is degenerate")]
    DegenerateImage(usize),
    #[error("a body needs top-degree simplices, found degree {0}")]
    WrongDegree(usize),
    #[error("boundary facets {facet} of the body and the generator coincide")]
    GeneratorOverlap { facet: usize },
    #[error("overlay failed: {0}")]
    OverlayFailure(String),
    #[error("current has no exact density representation: {0}")]
    NotMaterializable(String),
    #[error("configuration reverses orientation on simplex {simplex} (J = {jacobian:e})")]
    OrientationReversal { simplex: usize, jacobian: f64 },
    #[error("configuration is not an embedding: {0}")]
    NotAnEmbedding(String),
    #[error(
        "flux value on facet {facet} (component {component}) depends on the extension: {first} vs {second}"
    )]
    ExtensionDependence {
        component: usize,
        facet: usize,
        first: f64,
        second: f64,
    },
    #[error(
        "declared constant {name} = {declared} violated: observed {observed} at sample {sample}"
    )]
    DeclaredConstantViolated {
        name: &'static str,
        declared: f64,
        observed: f64,
        sample: usize,
    },
    #[error("schema violation at {pointer}: {message}")]
    SchemaViolation { pointer: String, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
