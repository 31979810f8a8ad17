use sprs::{CsMat, FillInReduction, TriMat};
use sprs_ldl::Ldl;

use super::assembly::{csr_apply, GlobalSystem};
use super::{DofMap, ProblemSpec};
use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Required relative residual `‖Ax − b‖ / ‖b‖`.
pub const SOLVER_TOL: f64 = 1e-10;

/// System with Dirichlet rows replaced by identity rows and the Dirichlet
/// columns moved to the right-hand side.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    pub matrix: CsMat<f64>,
    pub rhs: Vec<f64>,
    /// Prescribed value of each Dirichlet DOF.
    pub fixed: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    SparseLdl,
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub values: Vec<f64>,
    pub relative_residual: f64,
    pub method: SolveMethod,
}

/// Dirichlet DOF values implied by the problem's boundary conditions.
pub fn dirichlet_values(mesh: &TriMesh, dofs: &DofMap, problem: &ProblemSpec) -> Result<Vec<Option<f64>>> {
    for (_, edge) in mesh.boundary_edges() {
        let label = edge.boundary.expect("boundary edges carry labels");
        if problem.condition(label).is_none() {
            return Err(Error::MissingBoundaryCondition(label));
        }
    }
    Ok(dofs.dofs().iter().map(|d| problem.dirichlet_value(&d.boundary, d.position)).collect())
}

pub fn apply_dirichlet(mesh: &TriMesh, system: &GlobalSystem, dofs: &DofMap, problem: &ProblemSpec) -> Result<ConstrainedSystem> {
    let fixed = dirichlet_values(mesh, dofs, problem)?;
    let n = dofs.len();
    let mut rhs = system.rhs.clone();
    let mut triplets = TriMat::with_capacity((n, n), system.matrix.nnz());
    for (i, row) in system.matrix.outer_iterator().enumerate() {
        if let Some(g) = fixed[i] {
            triplets.add_triplet(i, i, 1.0);
            rhs[i] = g;
            continue;
        }
        for (j, &a) in row.iter() {
            match fixed[j] {
                Some(g) => rhs[i] -= a * g,
                None => triplets.add_triplet(i, j, a),
            }
        }
    }
    Ok(ConstrainedSystem { matrix: triplets.to_csr(), rhs, fixed })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(matrix: &CsMat<f64>, x: &[f64], b: &[f64]) -> f64 {
    let ax = csr_apply(matrix, x);
    let r: Vec<f64> = ax.iter().zip(b).map(|(a, b)| a - b).collect();
    let bn = norm(b);
    if bn == 0.0 {
        norm(&r)
    } else {
        norm(&r) / bn
    }
}

/// Jacobi-preconditioned conjugate gradients.
fn conjugate_gradient(matrix: &CsMat<f64>, b: &[f64], max_iter: usize) -> (Vec<f64>, usize) {
    let n = b.len();
    let diag: Vec<f64> = (0..n).map(|i| matrix.get(i, i).copied().unwrap_or(1.0)).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let target = 1e-2 * SOLVER_TOL * norm(b);
    for it in 0..max_iter {
        if norm(&r) <= target {
            return (x, it);
        }
        let ap = csr_apply(matrix, &p);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    (x, max_iter)
}

/// Sparse LDLᵀ with reverse Cuthill–McKee ordering; falls back to CG when the
/// factorization fails or misses the residual target.
pub fn solve_linear(system: &ConstrainedSystem) -> Result<LinearSolution> {
    let csc = system.matrix.to_csc();
    if let Ok(ldl) = Ldl::new().fill_in_reduction(FillInReduction::ReverseCuthillMcKee).numeric(csc.view()) {
        let values = ldl.solve(&system.rhs);
        let res = relative_residual(&system.matrix, &values, &system.rhs);
        if res <= SOLVER_TOL {
            return Ok(LinearSolution { values, relative_residual: res, method: SolveMethod::SparseLdl });
        }
    }
    let max_iter = 10 * system.rhs.len().max(10);
    let (values, iterations) = conjugate_gradient(&system.matrix, &system.rhs, max_iter);
    let res = relative_residual(&system.matrix, &values, &system.rhs);
    if res <= SOLVER_TOL {
        Ok(LinearSolution { values, relative_residual: res, method: SolveMethod::ConjugateGradient })
    } else {
        Err(Error::SolverFailed { residual: res, iterations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> CsMat<f64> {
        let mut t = TriMat::new((n, n));
        for i in 0..n {
            t.add_triplet(i, i, 2.0);
            if i + 1 < n {
                t.add_triplet(i, i + 1, -1.0);
                t.add_triplet(i + 1, i, -1.0);
            }
        }
        t.to_csr()
    }

    #[test]
    fn ldl_and_cg_agree() {
        let matrix = spd(50);
        let rhs: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let system = ConstrainedSystem { matrix: matrix.clone(), rhs: rhs.clone(), fixed: vec![None; 50] };
        let direct = solve_linear(&system).unwrap();
        assert_eq!(direct.method, SolveMethod::SparseLdl);
        let (cg, _) = conjugate_gradient(&matrix, &rhs, 500);
        for (a, b) in direct.values.iter().zip(&cg) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let mut t = TriMat::new((2, 2));
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            t.add_triplet(i, j, 1.0);
        }
        let system = ConstrainedSystem { matrix: t.to_csr(), rhs: vec![1.0, -1.0], fixed: vec![None; 2] };
        assert!(matches!(solve_linear(&system), Err(Error::SolverFailed { .. })));
    }
}
