//! Continuous Galerkin finite elements (P1–P3) on triangles with an
//! element-local post-processor that recovers fluxes which are locally
//! conservative on vertex-, edge- and element-centered control volumes.

pub mod basis;
pub mod cgfem;
pub mod dual;
pub mod element;
pub mod error;
pub mod field;
pub mod harness;
pub mod mesh;
pub mod parallel;
pub mod pipeline;
pub mod postprocess;
pub mod problems;
pub mod quadrature;
pub mod verification;

pub use basis::Degree;
pub use error::{Error, Result};
pub use mesh::{build_structured_mesh, TriMesh};
