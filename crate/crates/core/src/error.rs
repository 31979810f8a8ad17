use thiserror::Error;

use crate::mesh::BoundaryLabel;

#[derive(Debug, Error)]
pub enum Error {
    #[error("structured mesh needs at least one cell per side")]
    EmptyMesh,

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("triangle index {index} out of range ({count} triangles)")]
    TriangleOutOfRange { index: usize, count: usize },

    #[error("degenerate triangle {element}: |det J| = {det:e}")]
    DegenerateTriangle { element: usize, det: f64 },

    #[error("unsupported polynomial degree {0} (expected 1, 2 or 3)")]
    UnsupportedDegree(usize),

    #[error("unsupported quadrature request: {0}")]
    UnsupportedQuadrature(String),

    #[error("non-positive diffusion coefficient {value:e} in element {element} at ({x}, {y})")]
    NonPositiveKappa { element: usize, x: f64, y: f64, value: f64 },

    #[error("no boundary condition given for boundary part {0:?}")]
    MissingBoundaryCondition(BoundaryLabel),

    #[error("linear solver failed: relative residual {residual:e} after {iterations} iterations")]
    SolverFailed { residual: f64, iterations: usize },

    #[error("control volume geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("segment is not on the boundary of element {element}")]
    SegmentNotOnElementBoundary { element: usize },

    #[error("local DOF {local_dof} of element {element} has no element-boundary segments")]
    NoElementBoundarySegments { element: usize, local_dof: usize },

    #[error("element {element}: compatibility defect {defect:e} exceeds {tolerance:e}")]
    IncompatibleElementalSystem { element: usize, defect: f64, tolerance: f64 },

    #[error("element {element}: singular elemental system, residual {residual:e}")]
    SingularElementalSystem { element: usize, residual: f64 },

    #[error("unknown example {0} (expected 1, 2 or 3)")]
    UnknownExample(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
