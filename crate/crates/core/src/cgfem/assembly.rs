use nalgebra::Point2;
use sprs::{CsMat, TriMat};

use super::{DofMap, ProblemSpec};
use crate::basis::{BasisValues, Degree, ReferenceBasis, MAX_NODES};
use crate::dual::{ReferencePartition, SubcellRule};
use crate::element::ElementGeometry;
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::parallel::{map_indexed, Execution};
use crate::quadrature::{triangle_rule, TriangleRule};

pub type LocalMatrix = [[f64; MAX_NODES]; MAX_NODES];
pub type LocalVector = [f64; MAX_NODES];

#[derive(Debug, Clone, Copy, Default)]
pub struct AssemblyOptions {
    /// Triangle-rule exactness; defaults to `2k + 2`.
    pub quad_exactness: Option<usize>,
    pub execution: Execution,
}

/// Element integrals of the bilinear form and load.
///
/// The stiffness uses a plain triangle rule. Source integrals use the same
/// rule mapped onto every control-volume subcell, so `ℓ_τ(φ_ξ)` summed over
/// ξ reproduces `Σ_ξ ∫_{t_ξ} f` to rounding.
#[derive(Debug, Clone)]
pub struct ElementIntegrator {
    degree: Degree,
    basis: ReferenceBasis,
    rule: TriangleRule,
    tabulated: Vec<BasisValues>,
    subcell_rule: SubcellRule,
    subcell_tabulated: Vec<BasisValues>,
}

impl ElementIntegrator {
    pub fn new(degree: Degree, quad_exactness: Option<usize>) -> Result<Self> {
        let basis = ReferenceBasis::new(degree);
        let rule = triangle_rule(quad_exactness.unwrap_or(degree.default_exactness()))?;
        let tabulated = rule.points.iter().map(|&p| basis.eval(p)).collect();
        let subcell_rule = ReferencePartition::new(degree).composite_rule(&rule);
        let subcell_tabulated = subcell_rule.points.iter().map(|&p| basis.eval(p)).collect();
        Ok(ElementIntegrator { degree, basis, rule, tabulated, subcell_rule, subcell_tabulated })
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn rule(&self) -> &TriangleRule {
        &self.rule
    }

    fn kappa_at(&self, geometry: &ElementGeometry, problem: &ProblemSpec, x: Point2<f64>) -> Result<f64> {
        let kappa = problem.kappa(x);
        if kappa > 0.0 && kappa.is_finite() {
            Ok(kappa)
        } else {
            Err(Error::NonPositiveKappa { element: geometry.element, x: x.x, y: x.y, value: kappa })
        }
    }

    /// `a_τ(φ_j, φ_i) = ∫_τ κ ∇φ_j·∇φ_i`.
    pub fn stiffness(&self, geometry: &ElementGeometry, problem: &ProblemSpec) -> Result<LocalMatrix> {
        let n = self.degree.num_nodes();
        let mut k = [[0.0; MAX_NODES]; MAX_NODES];
        for ((q, w), tab) in self.rule.iter().zip(&self.tabulated) {
            let x = geometry.to_physical(q);
            let scale = w * geometry.abs_det() * self.kappa_at(geometry, problem, x)?;
            let grads: [_; MAX_NODES] = std::array::from_fn(|i| geometry.physical_gradient(tab.gradients[i]));
            for i in 0..n {
                for j in i..n {
                    let v = scale * grads[i].dot(&grads[j]);
                    k[i][j] += v;
                    if j != i {
                        k[j][i] += v;
                    }
                }
            }
        }
        Ok(k)
    }

    /// `ℓ_τ(φ_i) = ∫_τ f φ_i` by the subcell composite rule.
    pub fn load(&self, geometry: &ElementGeometry, problem: &ProblemSpec) -> LocalVector {
        let n = self.degree.num_nodes();
        let mut f = [0.0; MAX_NODES];
        for ((q, w), tab) in self.subcell_rule.points.iter().zip(&self.subcell_rule.weights).zip(&self.subcell_tabulated) {
            let scale = w * geometry.abs_det() * problem.source(geometry.to_physical(*q));
            for i in 0..n {
                f[i] += scale * tab.values[i];
            }
        }
        f
    }

    /// `∫_{t_ξ} f` for each local node ξ.
    pub fn subcell_source(&self, geometry: &ElementGeometry, problem: &ProblemSpec) -> LocalVector {
        let mut out = [0.0; MAX_NODES];
        for ((q, w), owner) in self.subcell_rule.points.iter().zip(&self.subcell_rule.weights).zip(&self.subcell_rule.owner) {
            out[*owner] += w * geometry.abs_det() * problem.source(geometry.to_physical(*q));
        }
        out
    }
}

/// Unconstrained global system `A_glob`, `b_glob`.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    /// CSR storage.
    pub matrix: CsMat<f64>,
    pub rhs: Vec<f64>,
}

impl GlobalSystem {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        csr_apply(&self.matrix, x)
    }
}

pub(crate) fn csr_apply(matrix: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    matrix.outer_iterator().map(|row| row.iter().map(|(j, a)| a * x[j]).sum()).collect()
}

pub fn assemble(mesh: &TriMesh, dofs: &DofMap, problem: &ProblemSpec, options: &AssemblyOptions) -> Result<GlobalSystem> {
    let integrator = ElementIntegrator::new(dofs.degree(), options.quad_exactness)?;
    let locals = map_indexed(mesh.num_triangles(), options.execution, |t| {
        let geometry = ElementGeometry::new(mesh, t)?;
        Ok::<_, Error>((integrator.stiffness(&geometry, problem)?, integrator.load(&geometry, problem)))
    })?;

    let n = dofs.len();
    let nk = dofs.degree().num_nodes();
    let mut triplets = TriMat::with_capacity((n, n), locals.len() * nk * nk);
    let mut rhs = vec![0.0; n];
    for (t, (k, f)) in locals.iter().enumerate() {
        let globals = dofs.element_dofs(t);
        for i in 0..nk {
            rhs[globals[i]] += f[i];
            for j in 0..nk {
                triplets.add_triplet(globals[i], globals[j], k[i][j]);
            }
        }
    }
    Ok(GlobalSystem { matrix: triplets.to_csr(), rhs })
}
