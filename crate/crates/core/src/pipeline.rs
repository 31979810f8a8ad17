//! Mesh, DOFs and dual geometry bundled for one run, and the solve →
//! post-process sequence on top of it.

use crate::basis::Degree;
use crate::cgfem::{solve_problem, AssemblyOptions, DofMap, FemField, ProblemSpec};
use crate::dual::{build_all_partitions, build_cv_index, ControlVolumeIndex, SubcellPartition};
use crate::error::Result;
use crate::mesh::{build_structured_mesh, TriMesh};
use crate::parallel::Execution;
use crate::postprocess::{postprocess_all, PostprocessOptions, PostprocessedField};

/// Quadrature and execution settings shared by every stage.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub quad_exactness: Option<usize>,
    pub segment_points: Option<usize>,
    pub execution: Execution,
}

impl RunOptions {
    pub fn assembly(&self) -> AssemblyOptions {
        AssemblyOptions { quad_exactness: self.quad_exactness, execution: self.execution }
    }

    pub fn postprocess(&self) -> PostprocessOptions {
        PostprocessOptions { quad_exactness: self.quad_exactness, segment_points: self.segment_points, execution: self.execution }
    }
}

#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: TriMesh,
    pub dofs: DofMap,
    pub partitions: Vec<SubcellPartition>,
    pub cv: ControlVolumeIndex,
}

impl Discretization {
    pub fn new(mesh: TriMesh, degree: Degree) -> Result<Self> {
        let dofs = DofMap::new(&mesh, degree);
        let partitions = build_all_partitions(&mesh, degree)?;
        let cv = build_cv_index(&mesh, &dofs, &partitions)?;
        Ok(Discretization { mesh, dofs, partitions, cv })
    }

    /// Uniform `n × n` mesh of the unit square.
    pub fn structured(n: usize, degree: Degree) -> Result<Self> {
        Discretization::new(build_structured_mesh(n)?, degree)
    }

    pub fn degree(&self) -> Degree {
        self.dofs.degree()
    }

    pub fn solve(&self, problem: &ProblemSpec, options: &RunOptions) -> Result<FemField<'_>> {
        solve_problem(&self.mesh, &self.dofs, problem, &options.assembly())
    }

    pub fn postprocess(&self, u_h: &FemField, problem: &ProblemSpec, options: &RunOptions) -> Result<PostprocessedField<'_>> {
        postprocess_all(&self.mesh, &self.dofs, &self.partitions, u_h, problem, &options.postprocess())
    }

    /// CG solution and its post-processed counterpart.
    pub fn solve_and_postprocess(&self, problem: &ProblemSpec, options: &RunOptions) -> Result<(FemField<'_>, PostprocessedField<'_>)> {
        let u_h = self.solve(problem, options)?;
        let tilde = self.postprocess(&u_h, problem, options)?;
        Ok((u_h, tilde))
    }
}
