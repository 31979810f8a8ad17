//! Conservation and accuracy measurements.
//!
//! The control-volume balance of a field `û` at an interior node ξ is
//!
//! ```text
//! LCE_ξ = ∫_{∂C^ξ} −κ∇û·n dl − ∫_{C^ξ} f dx,
//! ```
//!
//! assembled from the interface segments of every polygonal making up
//! `C^ξ`. Both integrals use the quadrature of the post-processor.

use std::io::Write;

use nalgebra::{Point2, Vector2};

use crate::basis::{Degree, ReferenceBasis};
use crate::cgfem::{DofKind, DofMap, ElementIntegrator, ProblemSpec};
use crate::dual::{ControlVolumeIndex, SubcellPartition};
use crate::element::ElementGeometry;
use crate::error::{Error, Result};
use crate::field::{ElementEvaluator, ElementField};
use crate::mesh::TriMesh;
use crate::parallel::{map_indexed, Execution};
use crate::pipeline::{Discretization, RunOptions};
use crate::postprocess::{integrate_segment, PostprocessedField};
use crate::quadrature::{segment_rule, triangle_rule};

/// Absolute LCE bound `1e-10 · max(1, ‖f‖_{L¹})`.
pub fn lce_tolerance(source_l1: f64) -> f64 {
    1e-10 * source_l1.max(1.0)
}

/// `‖f‖_{L¹(Ω)}` by elementwise quadrature.
pub fn source_l1_norm(mesh: &TriMesh, problem: &ProblemSpec, exactness: usize) -> Result<f64> {
    let rule = triangle_rule(exactness)?;
    let mut total = 0.0;
    for t in 0..mesh.num_triangles() {
        let g = ElementGeometry::new(mesh, t)?;
        total += rule.iter().map(|(q, w)| w * g.abs_det() * problem.source(g.to_physical(q)).abs()).sum::<f64>();
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy)]
pub struct LceEntry {
    pub dof: usize,
    pub kind: DofKind,
    pub position: Point2<f64>,
    pub lce: f64,
}

/// LCE of every DOF strictly inside Ω, in DOF order (vertices, edges,
/// element interiors).
#[derive(Debug, Clone)]
pub struct LceReport {
    pub entries: Vec<LceEntry>,
}

impl LceReport {
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.lce.abs()).fold(0.0, f64::max)
    }

    pub fn mean_abs(&self) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            self.entries.iter().map(|e| e.lce.abs()).sum::<f64>() / self.entries.len() as f64
        }
    }

    /// Writes `dof_index,class,x,y,lce`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dof_index,class,x,y,lce")?;
        for e in &self.entries {
            writeln!(out, "{},{},{:e},{:e},{:e}", e.dof, e.kind.as_str(), e.position.x, e.position.y, e.lce)?;
        }
        Ok(())
    }
}

/// Per-element outflow through the interfaces of each polygonal and the
/// source on each polygonal.
fn polygonal_balances<F: ElementField + ?Sized>(
    mesh: &TriMesh,
    partitions: &[SubcellPartition],
    field: &F,
    problem: &ProblemSpec,
    options: &RunOptions,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let degree = field.degree();
    let integrator = ElementIntegrator::new(degree, options.quad_exactness)?;
    let rule = segment_rule(options.segment_points.unwrap_or(degree.default_segment_points()))?;
    let basis = ReferenceBasis::new(degree);
    map_indexed(mesh.num_triangles(), options.execution, |t| {
        let part = &partitions[t];
        let eval = ElementEvaluator::new(field, &basis, t);
        let outflow = part
            .cells
            .iter()
            .map(|cell| {
                cell.cv_segments()
                    .map(|seg| integrate_segment(seg, &rule, |x| -problem.kappa(x) * eval.gradient_at(x).dot(&seg.normal)))
                    .sum()
            })
            .collect();
        let source = integrator.subcell_source(&eval.geometry, problem)[..part.len()].to_vec();
        Ok::<_, Error>((outflow, source))
    })
}

fn check_consistency(mesh: &TriMesh, dofs: &DofMap, cv: &ControlVolumeIndex, partitions: &[SubcellPartition]) -> Result<()> {
    if partitions.len() != mesh.num_triangles() || cv.len() != dofs.len() {
        return Err(Error::GeometryMismatch("control volumes, partitions and DOF map disagree".into()));
    }
    for (t, part) in partitions.iter().enumerate() {
        if part.element != t || part.degree != dofs.degree() {
            return Err(Error::GeometryMismatch(format!("partition {t} does not match the DOF map")));
        }
    }
    Ok(())
}

/// LCE of `field` on every interior control volume.
pub fn compute_lce<F: ElementField + ?Sized>(
    mesh: &TriMesh,
    dofs: &DofMap,
    cv: &ControlVolumeIndex,
    partitions: &[SubcellPartition],
    field: &F,
    problem: &ProblemSpec,
    options: &RunOptions,
) -> Result<LceReport> {
    check_consistency(mesh, dofs, cv, partitions)?;
    let balances = polygonal_balances(mesh, partitions, field, problem, options)?;
    let entries = dofs
        .interior_dofs()
        .map(|g| {
            let (mut outflow, mut source) = (0.0, 0.0);
            for m in cv.members(g) {
                outflow += balances[m.element].0[m.local_dof];
                source += balances[m.element].1[m.local_dof];
            }
            let info = dofs.info(g);
            LceEntry { dof: g, kind: info.kind, position: info.position, lce: outflow - source }
        })
        .collect();
    Ok(LceReport { entries })
}

#[derive(Debug, Clone, Copy)]
pub struct ElementConservation {
    /// `|Σ_ξ (outflow through ∂τ∩∂t_ξ) − ∫_τ f|`.
    pub residual: f64,
    /// Largest `|∫_{∂t_ξ} −κ∇ũ·n − ∫_{t_ξ} f|`, with the prescribed outflow on `∂τ`.
    pub subcell_residual: f64,
    /// Magnitude scale of the element's data.
    pub scale: f64,
    /// `|∫_{∂τ} −κ∇ũ·n − ∫_τ f|` from the raw trace of ∇ũ; informational,
    /// this is not what the post-processing balances.
    pub trace_residual: f64,
}

#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub elements: Vec<ElementConservation>,
}

impl ConservationReport {
    pub fn max_residual(&self) -> f64 {
        self.elements.iter().map(|e| e.residual.max(e.subcell_residual)).fold(0.0, f64::max)
    }

    /// Largest `residual / scale`.
    pub fn max_relative(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| {
                let r = e.residual.max(e.subcell_residual);
                if e.scale > 0.0 {
                    r / e.scale
                } else {
                    r
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn max_trace_residual(&self) -> f64 {
        self.elements.iter().map(|e| e.trace_residual).fold(0.0, f64::max)
    }

    /// Writes `element,residual,subcell_residual,scale,trace_residual`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "element,residual,subcell_residual,scale,trace_residual")?;
        for (t, e) in self.elements.iter().enumerate() {
            writeln!(out, "{t},{:e},{:e},{:e},{:e}", e.residual, e.subcell_residual, e.scale, e.trace_residual)?;
        }
        Ok(())
    }
}

/// Flux balance of the post-processed field on every element and on every
/// polygonal inside it.
pub fn elemental_conservation_report(
    mesh: &TriMesh,
    partitions: &[SubcellPartition],
    field: &PostprocessedField,
    problem: &ProblemSpec,
    options: &RunOptions,
) -> Result<ConservationReport> {
    let balances = polygonal_balances(mesh, partitions, field, problem, options)?;
    let degree = field.degree();
    let rule = segment_rule(options.segment_points.unwrap_or(degree.default_segment_points()))?;
    let basis = ReferenceBasis::new(degree);
    let elements = map_indexed(mesh.num_triangles(), options.execution, |t| {
        let (outflow, source) = &balances[t];
        let boundary = field.boundary_flux(t);
        let element_source: f64 = source.iter().sum();
        let subcell_residual = (0..outflow.len()).map(|i| (outflow[i] + boundary[i] - source[i]).abs()).fold(0.0, f64::max);
        let eval = ElementEvaluator::new(field, &basis, t);
        let trace: f64 = partitions[t]
            .cells
            .iter()
            .flat_map(|c| c.boundary_segments())
            .map(|seg| integrate_segment(seg, &rule, |x| -problem.kappa(x) * eval.gradient_at(x).dot(&seg.normal)))
            .sum();
        Ok::<_, Error>(ElementConservation {
            residual: (boundary.iter().sum::<f64>() - element_source).abs(),
            subcell_residual,
            scale: field.diagnostics()[t].scale,
            trace_residual: (trace - element_source).abs(),
        })
    })?;
    Ok(ConservationReport { elements })
}

/// `|u − field|_{H¹}` for a known gradient of `u`.
pub fn h1_seminorm_error<F: ElementField + ?Sized>(
    field: &F,
    exact_gradient: impl Fn(Point2<f64>) -> Vector2<f64> + Sync,
    exactness: Option<usize>,
    execution: Execution,
) -> Result<f64> {
    let degree = field.degree();
    let basis = ReferenceBasis::new(degree);
    let rule = triangle_rule(exactness.unwrap_or(degree.default_exactness()))?;
    let parts = map_indexed(field.mesh().num_triangles(), execution, |t| {
        let eval = ElementEvaluator::new(field, &basis, t);
        Ok::<_, Error>(
            rule.iter()
                .map(|(q, w)| {
                    let x = eval.geometry.to_physical(q);
                    w * eval.geometry.abs_det() * (exact_gradient(x) - eval.gradient_at_reference(q)).norm_squared()
                })
                .sum::<f64>(),
        )
    })?;
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// `|a − b|_{H¹}` for two fields on the same mesh.
pub fn h1_seminorm_difference<A, B>(a: &A, b: &B, exactness: Option<usize>, execution: Execution) -> Result<f64>
where
    A: ElementField + ?Sized,
    B: ElementField + ?Sized,
{
    if a.degree() != b.degree() || a.mesh().num_triangles() != b.mesh().num_triangles() {
        return Err(Error::GeometryMismatch("fields live on different discretizations".into()));
    }
    let degree = a.degree();
    let basis = ReferenceBasis::new(degree);
    let rule = triangle_rule(exactness.unwrap_or(degree.default_exactness()))?;
    let parts = map_indexed(a.mesh().num_triangles(), execution, |t| {
        let (ea, eb) = (ElementEvaluator::new(a, &basis, t), ElementEvaluator::new(b, &basis, t));
        Ok::<_, Error>(
            rule.iter()
                .map(|(q, w)| w * ea.geometry.abs_det() * (ea.gradient_at_reference(q) - eb.gradient_at_reference(q)).norm_squared())
                .sum::<f64>(),
        )
    })?;
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// Errors below this are treated as exact reproduction.
pub const EXACT_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Slope(f64),
    /// Every error in the column is at rounding level.
    Exact,
}

impl Rate {
    pub fn slope(self) -> Option<f64> {
        match self {
            Rate::Slope(s) => Some(s),
            Rate::Exact => None,
        }
    }
}

impl std::fmt::Display for Rate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rate::Slope(s) => write!(f, "{s:.3}"),
            Rate::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    /// `|u − u_h|_{H¹}`
    pub err_uh: f64,
    /// `|u − ũ_h|_{H¹}`
    pub err_tilde: f64,
    /// `|u_h − ũ_h|_{H¹}`
    pub err_diff: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub degree: Degree,
    pub rows: Vec<ConvergenceRow>,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

impl ConvergenceTable {
    fn rate(&self, column: impl Fn(&ConvergenceRow) -> f64) -> Rate {
        let y: Vec<f64> = self.rows.iter().map(&column).collect();
        if y.iter().all(|&e| e <= EXACT_ERROR) {
            return Rate::Exact;
        }
        let h: Vec<f64> = self.rows.iter().map(|r| r.h).collect();
        Rate::Slope(loglog_slope(&h, &y))
    }

    pub fn rate_uh(&self) -> Rate {
        self.rate(|r| r.err_uh)
    }

    pub fn rate_tilde(&self) -> Rate {
        self.rate(|r| r.err_tilde)
    }

    pub fn rate_diff(&self) -> Rate {
        self.rate(|r| r.err_diff)
    }

    /// Writes `n,h,err_uh,err_tilde,err_diff`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,h,err_uh,err_tilde,err_diff")?;
        for r in &self.rows {
            writeln!(out, "{},{:e},{:e},{:e},{:e}", r.n, r.h, r.err_uh, r.err_tilde, r.err_diff)?;
        }
        Ok(())
    }
}

/// Solves and post-processes on uniform meshes with `n` cells per side for
/// each level and tabulates the H¹ errors.
pub fn convergence_study(problem: &ProblemSpec, degree: Degree, levels: &[usize], options: &RunOptions) -> Result<ConvergenceTable> {
    if levels.len() < 3 {
        return Err(Error::InvalidConfig(format!("a convergence study needs at least 3 levels, got {}", levels.len())));
    }
    let exact = problem
        .exact
        .clone()
        .ok_or_else(|| Error::InvalidConfig("a convergence study needs the exact solution".into()))?;
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let disc = Discretization::structured(n, degree)?;
        let (u_h, tilde) = disc.solve_and_postprocess(problem, options)?;
        let grad = |p: Point2<f64>| (exact.gradient)(p);
        let q = options.quad_exactness;
        rows.push(ConvergenceRow {
            n,
            h: disc.mesh.h(),
            err_uh: h1_seminorm_error(&u_h, grad, q, options.execution)?,
            err_tilde: h1_seminorm_error(&tilde, grad, q, options.execution)?,
            err_diff: h1_seminorm_difference(&u_h, &tilde, q, options.execution)?,
        });
    }
    Ok(ConvergenceTable { degree, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgfem::FemField;
    use crate::mesh::{build_structured_mesh, BoundaryLabel};

    fn example_one() -> ProblemSpec {
        ProblemSpec::new(|_| 1.0, |p| 2.0 * (p.y - p.y * p.y) + 2.0 * (p.x - p.x * p.x))
            .with_dirichlet_everywhere(|_| 0.0)
            .with_exact(
                |p| (p.x - p.x * p.x) * (p.y - p.y * p.y),
                |p| Vector2::new((1.0 - 2.0 * p.x) * (p.y - p.y * p.y), (p.x - p.x * p.x) * (1.0 - 2.0 * p.y)),
            )
    }

    fn lce_pair(disc: &Discretization, problem: &ProblemSpec) -> (LceReport, LceReport) {
        let opts = RunOptions::default();
        let (u_h, tilde) = disc.solve_and_postprocess(problem, &opts).unwrap();
        let a = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &u_h, problem, &opts).unwrap();
        let b = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &tilde, problem, &opts).unwrap();
        (a, b)
    }

    #[test]
    fn postprocessing_restores_conservation() {
        let problem = example_one();
        for d in Degree::ALL {
            let disc = Discretization::structured(6, d).unwrap();
            let (raw, post) = lce_pair(&disc, &problem);
            assert_eq!(post.entries.len(), disc.dofs.interior_dofs().count());
            assert!(post.max_abs() < 1e-12, "k={d}: {}", post.max_abs());
            if d != Degree::Linear {
                assert!(raw.max_abs() > 1e-6, "k={d}: {}", raw.max_abs());
            }
        }
    }

    #[test]
    fn exact_linear_flux_has_no_defect() {
        let problem = ProblemSpec::new(|_| 1.0, |_| 0.0).with_dirichlet_everywhere(|p| 2.0 * p.x - p.y);
        for d in Degree::ALL {
            let disc = Discretization::structured(3, d).unwrap();
            let u = FemField::interpolate(&disc.mesh, &disc.dofs, |p| 2.0 * p.x - p.y);
            let r = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &u, &problem, &RunOptions::default()).unwrap();
            assert!(r.max_abs() < 1e-14);
        }
    }

    #[test]
    fn report_orders_and_formats_dofs() {
        let disc = Discretization::structured(2, Degree::Cubic).unwrap();
        let (_, post) = lce_pair(&disc, &example_one());
        let kinds: Vec<&str> = post.entries.iter().map(|e| e.kind.as_str()).collect();
        let first_edge = kinds.iter().position(|k| *k == "edge").unwrap();
        let first_interior = kinds.iter().position(|k| *k == "interior").unwrap();
        assert!(kinds[..first_edge].iter().all(|k| *k == "vertex"));
        assert!(kinds[first_edge..first_interior].iter().all(|k| *k == "edge"));
        assert!(kinds[first_interior..].iter().all(|k| *k == "interior"));
        // Interior nodes of the (3n + 1)² lattice.
        assert_eq!(post.entries.len(), (3 * 2 - 1) * (3 * 2 - 1));
        let mut out = Vec::new();
        post.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("dof_index,class,x,y,lce\n4,vertex,5e-1,5e-1,"));
    }

    #[test]
    fn neumann_sides_are_not_interior_volumes() {
        let problem = ProblemSpec::new(|p| 1.0 + p.y, |_| 0.0)
            .with_dirichlet(BoundaryLabel::Left, |_| 1.0)
            .with_dirichlet(BoundaryLabel::Right, |_| 0.0)
            .with_neumann(BoundaryLabel::Top)
            .with_neumann(BoundaryLabel::Bottom);
        let disc = Discretization::structured(4, Degree::Quadratic).unwrap();
        let (_, post) = lce_pair(&disc, &problem);
        assert!(post.entries.iter().all(|e| e.position.y > 0.0 && e.position.y < 1.0));
        assert!(post.max_abs() < 1e-12);
    }

    #[test]
    fn lce_is_gauge_invariant() {
        let problem = example_one();
        let disc = Discretization::structured(4, Degree::Quadratic).unwrap();
        let opts = RunOptions::default();
        let (_, tilde) = disc.solve_and_postprocess(&problem, &opts).unwrap();
        let shifted = tilde.with_gauge_shift(|t| (t as f64).sin() * 10.0);
        let a = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &tilde, &problem, &opts).unwrap();
        let b = compute_lce(&disc.mesh, &disc.dofs, &disc.cv, &disc.partitions, &shifted, &problem, &opts).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x.lce - y.lce).abs() < 1e-12);
        }
        assert!(h1_seminorm_difference(&tilde, &shifted, None, Execution::Serial).unwrap() < 1e-12);
    }

    #[test]
    fn elemental_balance_closes() {
        let problem = example_one();
        for d in Degree::ALL {
            let disc = Discretization::structured(4, d).unwrap();
            let opts = RunOptions::default();
            let (_, tilde) = disc.solve_and_postprocess(&problem, &opts).unwrap();
            let report = elemental_conservation_report(&disc.mesh, &disc.partitions, &tilde, &problem, &opts).unwrap();
            assert!(report.max_relative() < 1e-12, "k={d}: {}", report.max_relative());
        }
    }

    #[test]
    fn raw_trace_of_linear_recovery_is_not_balanced() {
        // With k = 1 and κ = 1, ∇ũ is constant per element, so the trace
        // outflow over ∂τ vanishes while ∫_τ f does not.
        let problem = example_one();
        let disc = Discretization::structured(4, Degree::Linear).unwrap();
        let opts = RunOptions::default();
        let (_, tilde) = disc.solve_and_postprocess(&problem, &opts).unwrap();
        let report = elemental_conservation_report(&disc.mesh, &disc.partitions, &tilde, &problem, &opts).unwrap();
        let f_integral = |t: usize| {
            let rule = triangle_rule(8).unwrap();
            let g = ElementGeometry::new(&disc.mesh, t).unwrap();
            rule.iter().map(|(q, w)| w * g.abs_det() * problem.source(g.to_physical(q))).sum::<f64>()
        };
        for (t, e) in report.elements.iter().enumerate() {
            assert!((e.trace_residual - f_integral(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn seminorm_of_interpolated_polynomials() {
        let mesh = build_structured_mesh(3).unwrap();
        for d in Degree::ALL {
            let k = d.order() as i32;
            let dofs = DofMap::new(&mesh, d);
            let u = FemField::interpolate(&mesh, &dofs, move |p| p.x.powi(k) - 3.0 * p.y + 7.0);
            let grad = move |p: Point2<f64>| Vector2::new(k as f64 * p.x.powi(k - 1), -3.0);
            assert!(h1_seminorm_error(&u, grad, None, Execution::Parallel).unwrap() < 1e-10);
        }
        // |x|_{H¹} = 1 on the unit square.
        let dofs = DofMap::new(&mesh, Degree::Linear);
        let zero = FemField::interpolate(&mesh, &dofs, |_| 0.0);
        let e = h1_seminorm_error(&zero, |_| Vector2::new(1.0, 0.0), None, Execution::Serial).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
    }

    #[test]
    fn slopes_from_least_squares() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let y: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        assert!((loglog_slope(&h, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn linear_elements_converge_at_first_order() {
        let table = convergence_study(&example_one(), Degree::Linear, &[4, 8, 16], &RunOptions::default()).unwrap();
        let s = table.rate_uh().slope().unwrap();
        assert!((s - 1.0).abs() < 0.15, "{s}");
        assert!(table.rate_diff().slope().unwrap() > 1.5);
        let mut out = Vec::new();
        table.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 4);
    }

    #[test]
    fn polynomial_problem_reports_exact_rates() {
        let problem = ProblemSpec::new(|_| 1.0, |_| -2.0)
            .with_dirichlet_everywhere(|p| p.x * p.x + p.y)
            .with_exact(|p| p.x * p.x + p.y, |p| Vector2::new(2.0 * p.x, 1.0));
        let table = convergence_study(&problem, Degree::Quadratic, &[1, 2, 3], &RunOptions::default()).unwrap();
        assert_eq!(table.rate_uh(), Rate::Exact);
        assert_eq!(table.rate_tilde(), Rate::Exact);
        assert!(convergence_study(&problem, Degree::Quadratic, &[1, 2], &RunOptions::default()).is_err());
    }
}
