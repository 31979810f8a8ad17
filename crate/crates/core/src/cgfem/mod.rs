//! Continuous Galerkin discretization of `−∇·(κ∇u) = f` with Lagrange
//! elements of degree 1–3.

mod assembly;
mod dofs;
mod field;
mod linsolve;
mod problem;

pub use assembly::{assemble, AssemblyOptions, ElementIntegrator, GlobalSystem, LocalMatrix, LocalVector};
pub use dofs::{build_dof_map, DofInfo, DofKind, DofMap};
pub use field::FemField;
pub use linsolve::{apply_dirichlet, dirichlet_values, solve_linear, ConstrainedSystem, LinearSolution, SolveMethod, SOLVER_TOL};
pub use problem::{BoundaryCondition, ExactSolution, ProblemSpec, ScalarFn, VectorFn};

use crate::error::Result;
use crate::mesh::TriMesh;

/// Solves a constrained system and wraps the result as a field.
pub fn solve<'a>(mesh: &'a TriMesh, dofs: &'a DofMap, system: &ConstrainedSystem) -> Result<FemField<'a>> {
    let solution = solve_linear(system)?;
    Ok(FemField::new(mesh, dofs, solution.values))
}

/// Assemble, constrain and solve in one call.
pub fn solve_problem<'a>(
    mesh: &'a TriMesh,
    dofs: &'a DofMap,
    problem: &ProblemSpec,
    options: &AssemblyOptions,
) -> Result<FemField<'a>> {
    let system = assemble(mesh, dofs, problem, options)?;
    let constrained = apply_dirichlet(mesh, &system, dofs, problem)?;
    solve(mesh, dofs, &constrained)
}
