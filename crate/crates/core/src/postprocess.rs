//! Element-local post-processing of a CG solution into a flux that is
//! conservative on every interior control volume.
//!
//! On each element τ we look for ũ in the local Lagrange space with
//!
//! ```text
//! −∫_{∂t_ξ∖∂τ} κ∇ũ·n = ∫_{t_ξ} f − ℓ_τ(φ_ξ) + a_τ(u_h, φ_ξ) + e_τ(u_h, I_τφ_ξ) − e_τ(u_h, φ_ξ)
//! ```
//!
//! for every local node ξ, where `e_τ(v, w) = ∫_{∂τ} {κ∇v}·n w` uses the
//! facet average (one-sided on ∂Ω). The matrix of this system annihilates
//! constants from both sides, so it is solved with a bordered gauge row.
//!
//! The outflow of ũ's flux through `∂τ ∩ ∂t_ξ` is not `−κ∇ũ·n` but the datum
//! `ℓ_τ(φ_ξ) − a_τ(u_h, φ_ξ) + e_τ(u_h, φ_ξ) − e_τ(u_h, I_τφ_ξ)`, split over the
//! two boundary segments of `t_ξ` by [`segment_flux_split`].
//!
//! All facet and interface integrals run over the subcell segments with one
//! Gauss rule, and source integrals use the subcell composite rule of
//! [`ElementIntegrator`]; with the same quadrature as the global solve the
//! control-volume balance closes to rounding.

use std::io::Write;

use nalgebra::{DMatrix, DVector, Point2, Vector2};

use crate::basis::{Degree, ReferenceBasis, MAX_NODES};
use crate::cgfem::{DofMap, ElementIntegrator, ExactSolution, FemField, ProblemSpec};
use crate::dual::{Segment, SubcellPartition};
use crate::element::ElementGeometry;
use crate::error::{Error, Result};
use crate::field::{ElementEvaluator, ElementField};
use crate::mesh::TriMesh;
use crate::parallel::{map_indexed, Execution};
use crate::quadrature::{segment_rule, SegmentRule};

/// Relative bound on `|Σ_ξ β_ξ|`.
pub const COMPATIBILITY_TOL: f64 = 1e-10;
/// Relative bound on the second-smallest singular value of `A`.
pub const RANK_TOL: f64 = 1e-8;
/// Relative residual required of the elemental solve.
pub const ELEMENT_SOLVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default)]
pub struct PostprocessOptions {
    /// Triangle-rule exactness; must match the one used for the global solve.
    pub quad_exactness: Option<usize>,
    /// Gauss points per segment; defaults to `k + 2`.
    pub segment_points: Option<usize>,
    pub execution: Execution,
}

/// Integrates `g` over a straight segment with a unit-interval rule.
pub fn integrate_segment(segment: &Segment, rule: &SegmentRule, mut g: impl FnMut(Point2<f64>) -> f64) -> f64 {
    segment.length * rule.iter().map(|(s, w)| w * g(segment.point_at(s))).sum::<f64>()
}

/// Local edge of `element` containing `segment`, if any.
fn locate_local_edge(mesh: &TriMesh, element: usize, segment: &Segment) -> Option<usize> {
    let v = mesh.triangle_vertices(element);
    (0..3).find(|&e| {
        let (a, b) = (v[e], v[(e + 1) % 3]);
        let d = b - a;
        let len2 = d.norm_squared();
        [segment.start, segment.end].iter().all(|p| {
            let r = p - a;
            let t = r.dot(&d) / len2;
            d.perp(&r).abs() <= 1e-10 * len2 && (-1e-10..=1.0 + 1e-10).contains(&t)
        })
    })
}

/// `{κ∇u_h}·n` at the Gauss points of a segment on `∂τ`; `n` is the
/// segment's own normal.
pub fn edge_average_flux(
    u_h: &FemField,
    problem: &ProblemSpec,
    element: usize,
    segment: &Segment,
    rule: &SegmentRule,
) -> Result<Vec<f64>> {
    let mesh = ElementField::mesh(u_h);
    mesh.check_triangle(element)?;
    let local_edge = locate_local_edge(mesh, element, segment).ok_or(Error::SegmentNotOnElementBoundary { element })?;
    let basis = ReferenceBasis::new(u_h.degree());
    let own = ElementEvaluator::new(u_h, &basis, element);
    let neighbor = mesh.edge_neighbors(element)?[local_edge].map(|t| ElementEvaluator::new(u_h, &basis, t));
    Ok(rule
        .points
        .iter()
        .map(|&s| {
            let x = segment.point_at(s);
            average_gradient(&own, neighbor.as_ref(), x).dot(&segment.normal) * problem.kappa(x)
        })
        .collect())
}

fn average_gradient(own: &ElementEvaluator, neighbor: Option<&ElementEvaluator>, x: Point2<f64>) -> Vector2<f64> {
    let g = own.gradient_at(x);
    match neighbor {
        Some(other) => 0.5 * (g + other.gradient_at(x)),
        None => g,
    }
}

/// The piecewise-constant map `I_τ w`: value `w(ξ)` on `t_ξ`.
#[derive(Debug, Clone)]
pub struct PiecewiseConstant {
    pub element: usize,
    pub values: Vec<f64>,
    pieces: Vec<Vec<[Point2<f64>; 3]>>,
}

impl PiecewiseConstant {
    /// Value at a point of the element; `None` outside it.
    pub fn value_at(&self, p: Point2<f64>) -> Option<f64> {
        let inside = |[a, b, c]: &[Point2<f64>; 3]| {
            let tol = -1e-12 * (b - a).perp(&(c - a)).abs();
            (b - a).perp(&(p - a)) >= tol && (c - b).perp(&(p - b)) >= tol && (a - c).perp(&(p - c)) >= tol
        };
        self.pieces.iter().position(|cell| cell.iter().any(inside)).map(|i| self.values[i])
    }
}

pub fn interp_piecewise_constant<F: ElementField + ?Sized>(partition: &SubcellPartition, w: &F) -> PiecewiseConstant {
    let coefficients = w.local_coefficients(partition.element);
    PiecewiseConstant {
        element: partition.element,
        values: coefficients[..partition.len()].to_vec(),
        pieces: partition.cells.iter().map(|c| c.pieces.clone()).collect(),
    }
}

/// The singular system `A α = β` of one element together with the pieces
/// of β needed downstream.
#[derive(Debug, Clone)]
pub struct ElementalSystem {
    pub element: usize,
    /// `A_ξη = −∫_{∂t_ξ∖∂τ} κ∇φ_η·n`.
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// `∫_{t_ξ} f`.
    pub subcell_source: DVector<f64>,
    /// `ℓ_τ(φ_ξ) − a_τ(u_h, φ_ξ) + e_τ(u_h, φ_ξ)`.
    pub nodal_datum: DVector<f64>,
    /// `∫_Γ {κ∇u_h}·n` for each boundary segment of each `t_ξ`, in segment order.
    pub segment_average_flux: Vec<Vec<f64>>,
    /// Mean of u_h's nodal values on the element.
    pub gauge: f64,
    /// `|Σ_ξ β_ξ|`.
    pub defect: f64,
    /// Sum of the magnitudes of every term entering β.
    pub scale: f64,
}

impl ElementalSystem {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Prescribed outflow through `∂τ ∩ ∂t_ξ` for each local node.
    pub fn boundary_flux(&self) -> DVector<f64> {
        &self.subcell_source - &self.rhs
    }
}

/// Per-degree data shared by all elemental assemblies.
#[derive(Debug, Clone)]
pub struct ElementalAssembler {
    integrator: ElementIntegrator,
    segment: SegmentRule,
}

impl ElementalAssembler {
    pub fn new(degree: Degree, options: &PostprocessOptions) -> Result<Self> {
        Ok(ElementalAssembler {
            integrator: ElementIntegrator::new(degree, options.quad_exactness)?,
            segment: segment_rule(options.segment_points.unwrap_or(degree.default_segment_points()))?,
        })
    }

    pub fn degree(&self) -> Degree {
        self.integrator.degree()
    }

    pub fn integrator(&self) -> &ElementIntegrator {
        &self.integrator
    }

    pub fn segment_rule(&self) -> &SegmentRule {
        &self.segment
    }

    fn basis(&self) -> &ReferenceBasis {
        self.integrator.basis()
    }

    fn basis_gradients(&self, geometry: &ElementGeometry, x: Point2<f64>) -> [Vector2<f64>; MAX_NODES] {
        let v = self.basis().eval(geometry.to_reference(x));
        std::array::from_fn(|i| geometry.physical_gradient(v.gradients[i]))
    }

    /// `A_ξη = −∫_{∂t_ξ∖∂τ} κ∇φ_η·n`.
    pub fn interface_matrix(&self, geometry: &ElementGeometry, partition: &SubcellPartition, problem: &ProblemSpec) -> DMatrix<f64> {
        let n = partition.len();
        let mut a = DMatrix::zeros(n, n);
        for cell in &partition.cells {
            for seg in cell.cv_segments() {
                for (s, w) in self.segment.iter() {
                    let x = seg.point_at(s);
                    let scale = w * seg.length * problem.kappa(x);
                    let grads = self.basis_gradients(geometry, x);
                    for eta in 0..n {
                        a[(cell.local_dof, eta)] -= scale * grads[eta].dot(&seg.normal);
                    }
                }
            }
        }
        a
    }

    pub fn assemble(&self, partition: &SubcellPartition, u_h: &FemField, problem: &ProblemSpec) -> Result<ElementalSystem> {
        let mesh = ElementField::mesh(u_h);
        let element = partition.element;
        let geometry = ElementGeometry::new(mesh, element)?;
        let n = partition.len();

        let stiffness = self.integrator.stiffness(&geometry, problem)?;
        let load = self.integrator.load(&geometry, problem);
        let source = self.integrator.subcell_source(&geometry, problem);
        let u_loc = u_h.local_coefficients(element);
        let a_uh: Vec<f64> = (0..n).map(|i| (0..n).map(|j| stiffness[i][j] * u_loc[j]).sum()).collect();
        // Rounding in a_τ and e_τ scales with the individual products, not their sum.
        let a_size: Vec<f64> = (0..n).map(|i| (0..n).map(|j| (stiffness[i][j] * u_loc[j]).abs()).sum()).collect();

        let own = ElementEvaluator::new(u_h, self.basis(), element);
        let neighbors: Vec<Option<ElementEvaluator>> =
            mesh.edge_neighbors(element)?.iter().map(|t| t.map(|t| ElementEvaluator::new(u_h, self.basis(), t))).collect();

        // e_τ(u_h, I_τφ_ξ) per node and e_τ(u_h, φ_ζ) for all ζ.
        let mut e_nodal = vec![0.0; n];
        let mut e_weighted = vec![0.0; n];
        let mut segment_average_flux = Vec::with_capacity(n);
        for cell in &partition.cells {
            let mut per_segment = Vec::new();
            for seg in cell.boundary_segments() {
                let local_edge = locate_local_edge(mesh, element, seg).ok_or(Error::SegmentNotOnElementBoundary { element })?;
                let neighbor = neighbors[local_edge].as_ref();
                let mut total = 0.0;
                for (s, w) in self.segment.iter() {
                    let x = seg.point_at(s);
                    let flux = w * seg.length * problem.kappa(x) * average_gradient(&own, neighbor, x).dot(&seg.normal);
                    total += flux;
                    let phi = self.basis().eval(geometry.to_reference(x));
                    for (z, value) in e_weighted.iter_mut().enumerate() {
                        *value += flux * phi.values[z];
                    }
                }
                e_nodal[cell.local_dof] += total;
                per_segment.push(total);
            }
            segment_average_flux.push(per_segment);
        }

        let mut rhs = DVector::zeros(n);
        let mut nodal_datum = DVector::zeros(n);
        let mut scale = 0.0;
        for xi in 0..n {
            nodal_datum[xi] = load[xi] - a_uh[xi] + e_weighted[xi];
            rhs[xi] = source[xi] - nodal_datum[xi] + e_nodal[xi];
            scale += source[xi].abs() + load[xi].abs() + a_size[xi] + e_weighted[xi].abs() + e_nodal[xi].abs();
        }
        let defect = rhs.sum().abs();
        let tolerance = COMPATIBILITY_TOL * scale;
        if defect > tolerance {
            return Err(Error::IncompatibleElementalSystem { element, defect, tolerance });
        }
        Ok(ElementalSystem {
            element,
            matrix: self.interface_matrix(&geometry, partition, problem),
            rhs,
            subcell_source: DVector::from_column_slice(&source[..n]),
            nodal_datum,
            segment_average_flux,
            gauge: u_loc[..n].iter().sum::<f64>() / n as f64,
            defect,
            scale,
        })
    }

    /// Residual of the elemental equations with the exact solution in place
    /// of both ũ and u_h, one entry per local node. Vanishes up to
    /// quadrature error.
    pub fn true_solution_residual(
        &self,
        partition: &SubcellPartition,
        mesh: &TriMesh,
        exact: &ExactSolution,
        problem: &ProblemSpec,
    ) -> Result<Vec<f64>> {
        let geometry = ElementGeometry::new(mesh, partition.element)?;
        let n = partition.len();
        let flux = |seg: &Segment| integrate_segment(seg, &self.segment, |x| problem.kappa(x) * (exact.gradient)(x).dot(&seg.normal));

        let load = self.integrator.load(&geometry, problem);
        let source = self.integrator.subcell_source(&geometry, problem);
        let mut a_u = vec![0.0; n];
        for (q, w) in self.integrator.rule().iter() {
            let x = geometry.to_physical(q);
            let kg = problem.kappa(x) * (exact.gradient)(x) * (w * geometry.abs_det());
            let grads = self.basis_gradients(&geometry, x);
            for (i, value) in a_u.iter_mut().enumerate() {
                *value += kg.dot(&grads[i]);
            }
        }
        let mut e_weighted = vec![0.0; n];
        let mut residual = vec![0.0; n];
        for cell in &partition.cells {
            for seg in cell.boundary_segments() {
                residual[cell.local_dof] -= flux(seg);
                for (s, w) in self.segment.iter() {
                    let x = seg.point_at(s);
                    let g = w * seg.length * problem.kappa(x) * (exact.gradient)(x).dot(&seg.normal);
                    let phi = self.basis().eval(geometry.to_reference(x));
                    for (z, value) in e_weighted.iter_mut().enumerate() {
                        *value += g * phi.values[z];
                    }
                }
            }
            residual[cell.local_dof] -= cell.cv_segments().map(flux).sum::<f64>();
        }
        for xi in 0..n {
            // b_τ(u, φ_ξ) − e_τ(u, I_τφ_ξ) was accumulated above; subtract the rest of β.
            residual[xi] -= source[xi] - load[xi] + a_u[xi] - e_weighted[xi];
        }
        Ok(residual)
    }
}

pub fn assemble_elemental_system(partition: &SubcellPartition, u_h: &FemField, problem: &ProblemSpec) -> Result<ElementalSystem> {
    ElementalAssembler::new(u_h.degree(), &PostprocessOptions::default())?.assemble(partition, u_h, problem)
}

#[derive(Debug, Clone)]
pub struct ElementalSolution {
    pub alpha: DVector<f64>,
    /// `‖Aα − Pβ‖ / (‖β‖ + ‖A‖‖α‖)` with `P` the projection onto range(A).
    pub residual: f64,
    /// Multiplier of the gauge row; equals `mean(β)`.
    pub multiplier: f64,
    /// Second-smallest singular value of `A`.
    pub sigma_second: f64,
    /// Largest singular value of `A`.
    pub norm: f64,
}

/// Solves with `mean(α)` equal to the system's gauge.
pub fn solve_elemental(system: &ElementalSystem) -> Result<ElementalSolution> {
    solve_elemental_with_gauge(system, system.gauge)
}

pub fn solve_elemental_with_gauge(system: &ElementalSystem, gauge: f64) -> Result<ElementalSolution> {
    let n = system.len();
    let element = system.element;
    let mut sigma: Vec<f64> = system.matrix.clone().singular_values().iter().copied().collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let norm = sigma[0];
    let sigma_second = if n >= 2 { sigma[n - 2] } else { 0.0 };
    if !(sigma_second >= RANK_TOL * norm) || norm == 0.0 {
        return Err(Error::SingularElementalSystem { element, residual: sigma_second / norm });
    }

    let mut bordered = DMatrix::zeros(n + 1, n + 1);
    bordered.view_mut((0, 0), (n, n)).copy_from(&system.matrix);
    for i in 0..n {
        bordered[(i, n)] = 1.0;
        bordered[(n, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from(&system.rhs);
    rhs[n] = n as f64 * gauge;
    let solution = bordered.lu().solve(&rhs).ok_or(Error::SingularElementalSystem { element, residual: f64::INFINITY })?;

    let alpha = solution.rows(0, n).into_owned();
    let mean = system.rhs.mean();
    let projected = system.rhs.map(|b| b - mean);
    let denom = projected.norm() + norm * alpha.norm();
    let abs_residual = (&system.matrix * &alpha - &projected).norm();
    let residual = if denom > 0.0 { abs_residual / denom } else { abs_residual };
    if !(residual <= ELEMENT_SOLVE_TOL) {
        return Err(Error::SingularElementalSystem { element, residual });
    }
    Ok(ElementalSolution { alpha, residual, multiplier: solution[n], sigma_second, norm })
}

/// Flux of the post-processed field through each boundary segment of `t_ξ`.
///
/// The nodal datum `ℓ_τ(φ_ξ) − a_τ(u_h, φ_ξ) + e_τ(u_h, φ_ξ)` is halved
/// between the two segments every boundary polygonal has (any other count
/// falls back to shares proportional to length), and each segment then
/// loses its own averaged flux `∫_Γ {κ∇u_h}·n`.
pub fn segment_flux_split(system: &ElementalSystem, partition: &SubcellPartition, local_dof: usize) -> Result<Vec<f64>> {
    let cell = &partition.cells[local_dof];
    let lengths: Vec<f64> = cell.boundary_segments().map(|s| s.length).collect();
    if lengths.is_empty() {
        return Err(Error::NoElementBoundarySegments { element: system.element, local_dof });
    }
    let total: f64 = lengths.iter().sum();
    let datum = system.nodal_datum[local_dof];
    let share = |len: f64| if lengths.len() == 2 { 0.5 } else { len / total };
    Ok(lengths
        .iter()
        .zip(&system.segment_average_flux[local_dof])
        .map(|(&len, avg)| datum * share(len) - avg)
        .collect())
}

/// Solver diagnostics of one element.
#[derive(Debug, Clone, Copy)]
pub struct ElementDiagnostics {
    pub defect: f64,
    pub scale: f64,
    pub residual: f64,
    pub sigma_second: f64,
    pub norm: f64,
}

/// `ũ_h`: independent local fields, one per element, plus the prescribed
/// outflow of each polygonal through the element boundary.
#[derive(Debug, Clone)]
pub struct PostprocessedField<'a> {
    mesh: &'a TriMesh,
    degree: Degree,
    alpha: Vec<[f64; MAX_NODES]>,
    boundary_flux: Vec<[f64; MAX_NODES]>,
    diagnostics: Vec<ElementDiagnostics>,
}

impl<'a> PostprocessedField<'a> {
    pub fn alpha(&self, element: usize) -> &[f64] {
        &self.alpha[element][..self.degree.num_nodes()]
    }

    /// Outflow through `∂τ ∩ ∂t_ξ` for each local node of `element`.
    pub fn boundary_flux(&self, element: usize) -> &[f64] {
        &self.boundary_flux[element][..self.degree.num_nodes()]
    }

    pub fn diagnostics(&self) -> &[ElementDiagnostics] {
        &self.diagnostics
    }

    /// Same field with every element's constant shifted by `shift(element)`.
    pub fn with_gauge_shift(&self, shift: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for (t, alpha) in out.alpha.iter_mut().enumerate() {
            let c = shift(t);
            for a in alpha.iter_mut().take(self.degree.num_nodes()) {
                *a += c;
            }
        }
        out
    }

    /// Writes `element,local_dof,x,y,alpha`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "element,local_dof,x,y,alpha")?;
        let basis = ReferenceBasis::new(self.degree);
        for (t, alpha) in self.alpha.iter().enumerate() {
            let geometry = ElementGeometry::new(self.mesh, t)?;
            for (i, a) in alpha.iter().take(basis.len()).enumerate() {
                let p = geometry.to_physical(basis.node(i));
                writeln!(out, "{t},{i},{:e},{:e},{:e}", p.x, p.y, a)?;
            }
        }
        Ok(())
    }
}

impl ElementField for PostprocessedField<'_> {
    fn mesh(&self) -> &TriMesh {
        self.mesh
    }

    fn degree(&self) -> Degree {
        self.degree
    }

    fn local_coefficients(&self, element: usize) -> [f64; MAX_NODES] {
        self.alpha[element]
    }
}

/// Runs the elemental post-processing on every element.
pub fn postprocess_all<'a>(
    mesh: &'a TriMesh,
    dofs: &DofMap,
    partitions: &[SubcellPartition],
    u_h: &FemField,
    problem: &ProblemSpec,
    options: &PostprocessOptions,
) -> Result<PostprocessedField<'a>> {
    let degree = dofs.degree();
    if partitions.len() != mesh.num_triangles() || u_h.degree() != degree {
        return Err(Error::GeometryMismatch("partitions, DOF map and solution disagree".into()));
    }
    let assembler = ElementalAssembler::new(degree, options)?;
    let n = degree.num_nodes();
    let results = map_indexed(mesh.num_triangles(), options.execution, |t| {
        let system = assembler.assemble(&partitions[t], u_h, problem)?;
        let solution = solve_elemental(&system)?;
        let mut alpha = [0.0; MAX_NODES];
        alpha[..n].copy_from_slice(solution.alpha.as_slice());
        let mut flux = [0.0; MAX_NODES];
        flux[..n].copy_from_slice(system.boundary_flux().as_slice());
        let diagnostics = ElementDiagnostics {
            defect: system.defect,
            scale: system.scale,
            residual: solution.residual,
            sigma_second: solution.sigma_second,
            norm: solution.norm,
        };
        Ok::<_, Error>((alpha, flux, diagnostics))
    })?;
    let mut field = PostprocessedField {
        mesh,
        degree,
        alpha: Vec::with_capacity(results.len()),
        boundary_flux: Vec::with_capacity(results.len()),
        diagnostics: Vec::with_capacity(results.len()),
    };
    for (alpha, flux, diag) in results {
        field.alpha.push(alpha);
        field.boundary_flux.push(flux);
        field.diagnostics.push(diag);
    }
    Ok(field)
}

/// Flux `∫ −κ∇ũ·n` through one polyline segment, `n` pointing to its right.
#[derive(Debug, Clone, Copy)]
pub struct PolylineFlux {
    pub start: Point2<f64>,
    pub end: Point2<f64>,
    pub flux: f64,
}

/// Samples the post-processed flux along a polyline. Each segment is cut at
/// element edges; pieces lying on an edge use the average of both sides.
pub fn polyline_fluxes(
    field: &PostprocessedField,
    problem: &ProblemSpec,
    polyline: &[Point2<f64>],
    segment_points: usize,
) -> Result<Vec<PolylineFlux>> {
    let rule = segment_rule(segment_points)?;
    let mesh = field.mesh;
    let basis = ReferenceBasis::new(field.degree);
    let geometries: Vec<ElementGeometry> = (0..mesh.num_triangles()).map(|t| ElementGeometry::new(mesh, t)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for pair in polyline.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        let d = q - p;
        if d.norm() == 0.0 {
            return Err(Error::InvalidConfig("polyline has a zero-length segment".into()));
        }
        let mut cuts = vec![0.0, 1.0];
        for edge in mesh.edges() {
            let a = mesh.vertices()[edge.vertices[0]];
            let e = mesh.vertices()[edge.vertices[1]] - a;
            let denom = d.perp(&e);
            if denom.abs() > 1e-14 * d.norm() * e.norm() {
                let t = (a - p).perp(&e) / denom;
                let s = (a - p).perp(&d) / denom;
                if t > 0.0 && t < 1.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
                    cuts.push(t);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let piece = Segment::new(p + d * w[0], p + d * w[1], crate::dual::SegmentClass::ControlVolume { neighbor: 0 });
            let mid = piece.midpoint();
            let owners: Vec<usize> = (0..geometries.len()).filter(|&t| geometries[t].contains(mid, 1e-12)).collect();
            if owners.is_empty() {
                return Err(Error::InvalidConfig(format!("polyline leaves the mesh near ({}, {})", mid.x, mid.y)));
            }
            let evaluators: Vec<ElementEvaluator> = owners.iter().map(|&t| ElementEvaluator::new(field, &basis, t)).collect();
            total += integrate_segment(&piece, &rule, |x| {
                let g: Vector2<f64> = evaluators.iter().map(|e| e.gradient_at(x)).sum::<Vector2<f64>>() / evaluators.len() as f64;
                -problem.kappa(x) * g.dot(&piece.normal)
            });
        }
        out.push(PolylineFlux { start: p, end: q, flux: total });
    }
    Ok(out)
}
